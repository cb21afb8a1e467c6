#include "sctsn/dpce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sctsn::dpce {

double map_utilization_to_weight(double u, const Config& cfg) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("utilization must lie in [0, 1]");
    if (u <= cfg.u_low) return cfg.w_min;
    return cfg.w_min + (cfg.w_max - cfg.w_min) * (u - cfg.u_low) / (1.0 - cfg.u_low);
}

double smooth_weight(std::span<const double> history, const Config& cfg) {
    if (history.empty()) throw std::invalid_argument("smoothing needs at least one weight");
    const std::size_t n = std::min(history.size(), cfg.coefficients.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += cfg.coefficients[i] * history[i];
        den += cfg.coefficients[i];
    }
    return num / den;
}

bool should_update(double new_weight, double active_weight, const Config& cfg) {
    if (!(active_weight > 0.0)) throw std::invalid_argument("active weight must be positive");
    return std::abs(new_weight - active_weight) / active_weight > cfg.update_threshold;
}

LinkWeightState::LinkWeightState(std::size_t links, Config cfg)
    : cfg_(cfg), util_(links, 0.0), history_(links), active_(links, cfg.w_min) {}

std::vector<LinkId> LinkWeightState::observe(std::span<const double> utilization) {
    if (utilization.size() != util_.size()) throw std::invalid_argument("utilization vector size mismatch");
    std::vector<LinkId> changed;
    for (std::size_t e = 0; e < util_.size(); ++e) {
        util_[e] = std::clamp(utilization[e], 0.0, 1.0);
        auto& h = history_[e];
        h.push_front(map_utilization_to_weight(util_[e], cfg_));
        if (h.size() > cfg_.coefficients.size()) h.pop_back();
        const double w = smooth_weight(std::vector<double>(h.begin(), h.end()), cfg_);
        if (should_update(w, active_[e], cfg_)) {
            active_[e] = w;
            changed.push_back(static_cast<LinkId>(e));
        }
    }
    return changed;
}

namespace {

bool same_weight(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

// (distance, node sequence) ordering; sequences compare lexicographically.
bool better(double da, const std::vector<NodeId>& sa, double db, const std::vector<NodeId>& sb) {
    if (same_weight(da, db)) return sa < sb;
    return da < db;
}

} // namespace

RecomputeResult recompute_default_paths(const Topology& topo, std::span<const double> weights,
                                        std::span<const NodeId> endpoints, const RoutingTable* previous) {
    if (weights.size() != topo.link_count()) throw std::invalid_argument("weight vector size mismatch");
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("link weights must be positive");
    }
    std::vector<NodeId> ends(endpoints.begin(), endpoints.end());
    if (ends.empty()) {
        for (NodeId n = 0; n < topo.node_count(); ++n) ends.push_back(n);
    }
    std::sort(ends.begin(), ends.end());

    const std::size_t n = topo.node_count();
    const double inf = std::numeric_limits<double>::infinity();
    RecomputeResult out;
    for (NodeId src : ends) {
        std::vector<double> dist(n, inf);
        std::vector<std::vector<NodeId>> seq(n);
        std::vector<std::vector<LinkId>> via(n);
        std::vector<char> done(n, 0);
        dist[src] = 0.0;
        seq[src] = {src};
        for (;;) {
            NodeId u = static_cast<NodeId>(n);
            for (NodeId v = 0; v < n; ++v) {
                if (done[v] || dist[v] == inf) continue;
                if (u == n || better(dist[v], seq[v], dist[u], seq[u])) u = v;
            }
            if (u == n) break;
            done[u] = 1;
            for (LinkId id : topo.out_links(u)) {
                const NodeId v = topo.link(id).dst;
                if (done[v]) continue;
                const double d = dist[u] + weights[id];
                auto s = seq[u];
                s.push_back(v);
                if (dist[v] == inf || better(d, s, dist[v], seq[v])) {
                    dist[v] = d;
                    seq[v] = std::move(s);
                    via[v] = via[u];
                    via[v].push_back(id);
                }
            }
        }
        for (NodeId dst : ends) {
            if (dst == src) continue;
            const SwitchPair key{src, dst};
            if (dist[dst] == inf) {
                out.table.disconnected.push_back(key);
                if (previous && previous->routes.contains(key)) out.changed.push_back(key);
                continue;
            }
            Path p{via[dst]};
            if (previous) {
                auto it = previous->routes.find(key);
                if (it == previous->routes.end() || !(it->second == p)) out.changed.push_back(key);
            }
            out.table.routes.emplace(key, std::move(p));
        }
    }
    return out;
}

} // namespace sctsn::dpce
