#pragma once

// Discrete-event simulation of hosts, strict-priority switches and the
// central controller running either the self-configuration loop (learn at
// the ingress edge switch, place on TT classification) or the a-priori
// baseline where every TT stream is placed before traffic starts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sctsn/learner.hpp"
#include "sctsn/port.hpp"
#include "sctsn/scenario.hpp"

namespace sctsn::simnet {

struct StreamInfo {
    std::string id;
    StreamKind kind = StreamKind::tt; // ground truth
    std::size_t src_host = 0;
    std::size_t dst_host = 0;
    NodeId src_switch = 0;
    NodeId dst_switch = 0;
    double period_s = 0.0;            // tt
    double mean_interarrival_s = 0.0; // be
    double start_s = 0.0;
    std::uint32_t frame_bytes = 1522;
};

inline constexpr int untagged = -1;

struct FrameRecord {
    std::uint32_t stream = 0;
    int tag = untagged;   // priority set at the ingress edge switch, -1 if it never left it
    double created = 0.0;
    std::optional<double> delivered;
    bool dropped = false;
    std::uint64_t path_hash = 0;
    std::uint32_t bytes = 0;
};

struct StreamOutcome {
    learner::Verdict verdict = learner::Verdict::undecided; // at the horizon
    bool placed = false;        // currently on an optimised path
    bool unplaced = false;      // placement was infeasible at least once
    std::optional<double> first_tt_time;
    std::size_t migrations = 0; // path or tag switches after the first rule
    double learned_period_s = 0.0;
};

struct Counters {
    std::uint64_t events = 0;
    std::uint64_t packet_ins = 0;       // frames of streams without a rule
    std::uint64_t rule_installs = 0;    // per switch
    std::uint64_t tsor_solves = 0;
    std::uint64_t tsor_infeasible = 0;
    std::uint64_t weight_updates = 0;   // links whose active weight changed
    std::uint64_t routing_changes = 0;  // default-path pairs that changed
    std::uint64_t deviations = 0;
    std::uint64_t drops = 0;
};

struct RunResult {
    std::string scenario;
    Mode mode = Mode::sctsn;
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    double stats_period_s = 0.0;
    std::vector<std::string> link_names;           // inter-switch links
    std::vector<StreamInfo> streams;
    std::vector<StreamOutcome> outcomes;
    std::vector<FrameRecord> frames;
    std::vector<std::vector<double>> utilization; // [collection period][link]
    Counters counters;
};

/// FNV-1a over the link ids, stable across platforms.
std::uint64_t path_hash(const Path& p);

/// Switches whose rule for one stream must change when it moves from `old`
/// (nullptr: no rule yet, so every switch including the egress one) to
/// `next`. The ingress switch also changes when the tag does; switches that
/// keep their next hop (a shared tail) are reused.
std::size_t rule_updates(const Topology& topo, const Path* old, int old_tag, const Path& next, int tag);

/// Source placement and parameters drawn from the scenario seed.
std::vector<StreamInfo> generate_streams(const Scenario& s);

/// Runs the event loop to the horizon. Identical scenarios (including the
/// seed) give identical results. Throws ValidationError for an invalid
/// scenario and std::runtime_error when max_events is exceeded.
RunResult simulate(const Scenario& s);

} // namespace sctsn::simnet
