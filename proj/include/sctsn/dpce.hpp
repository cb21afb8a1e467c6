#pragma once

// Default path computation: utilisation-driven link weights with smoothing
// and an update threshold, and minimum-weight paths between switches.

#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sctsn/model.hpp"

namespace sctsn::dpce {

struct Config {
    double u_low = 0.3;
    double w_min = 1.0;
    double w_max = 10.0;
    std::array<double, 3> coefficients{0.5, 0.3, 0.2}; // newest first
    double update_threshold = 0.2;                      // relative, strict
    double period_s = 2.0;                              // statistics collection period
};

/// Piecewise linear: w_min up to u_low, then linear to w_max at u = 1.
/// Throws std::domain_error for u outside [0, 1].
double map_utilization_to_weight(double u, const Config& cfg = {});

/// Weighted average of up to three raw weights, newest first. Coefficients
/// are renormalised over the entries present. Throws on empty history.
double smooth_weight(std::span<const double> history, const Config& cfg = {});

bool should_update(double new_weight, double active_weight, const Config& cfg = {});

/// Per-link weight bookkeeping for one controller.
class LinkWeightState {
public:
    explicit LinkWeightState(std::size_t links, Config cfg = {});

    /// Feeds one collection period of utilisation samples (clamped to
    /// [0, 1]). Returns the links whose active weight changed.
    std::vector<LinkId> observe(std::span<const double> utilization);

    std::span<const double> active() const noexcept { return active_; }
    std::span<const double> utilization() const noexcept { return util_; }
    const std::deque<double>& history(LinkId e) const { return history_.at(e); }
    double smoothed(LinkId e) const { return smooth_weight(std::vector<double>(history_.at(e).begin(), history_.at(e).end()), cfg_); }
    const Config& config() const noexcept { return cfg_; }

private:
    Config cfg_;
    std::vector<double> util_;
    std::vector<std::deque<double>> history_;
    std::vector<double> active_;
};

using SwitchPair = std::pair<NodeId, NodeId>;

struct RoutingTable {
    std::map<SwitchPair, Path> routes;
    std::vector<SwitchPair> disconnected;
};

struct RecomputeResult {
    RoutingTable table;
    std::vector<SwitchPair> changed; // pairs whose path differs from `previous`
};

/// Minimum total weight path for every ordered pair of `endpoints` (all
/// switches when empty). Equal weights are broken by the lexicographically
/// smallest node sequence.
RecomputeResult recompute_default_paths(const Topology& topo, std::span<const double> weights,
                                        std::span<const NodeId> endpoints = {},
                                        const RoutingTable* previous = nullptr);

} // namespace sctsn::dpce
