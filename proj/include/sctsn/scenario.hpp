#pragma once

// Simulation scenario: topology, traffic sources, controller and switch
// parameters. Loaded from a versioned YAML document (docs/formats.md).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sctsn/dpce.hpp"
#include "sctsn/learner.hpp"
#include "sctsn/model.hpp"

namespace sctsn::simnet {

enum class Mode : std::uint8_t { sctsn, srp };

const char* to_string(Mode m);
/// Accepts "sctsn" and "srp"; throws ValidationError otherwise.
Mode parse_mode(std::string_view s);

enum class StreamKind : std::uint8_t { tt, be };

/// A source pinned to named hosts. Generated sources pick hosts at random.
struct StreamSpec {
    StreamKind kind = StreamKind::tt;
    std::string src_host;
    std::string dst_host;
    double period_s = 0.01;            // tt
    double mean_interarrival_s = 0.1;  // be
    std::optional<double> start_s;     // tt default: uniform in [0, period); be: 0
    std::uint32_t frame_bytes = 1522;
};

struct TtSources {
    std::size_t count = 0;
    double period_min_s = 0.002;
    double period_max_s = 0.020;
    std::uint32_t frame_bytes = 1522;
};

struct BeSources {
    std::size_t count = 0;
    double mean_interarrival_s = 0.1;
    std::uint32_t frame_bytes = 1522;
};

struct ControllerParams {
    std::size_t k_paths = 8;
    double rule_install_delay_s = 1e-3; // per switch
    double solve_delay_s = 0.0;         // virtual time charged per optimisation
    bool full_reopt = false;            // re-place every TT stream on each classification
};

struct SwitchParams {
    double processing_delay_s = 5e-6;
    std::size_t queue_bytes = 512 * 1024;
};

struct Scenario {
    std::string name = "scenario";
    std::string topology_path;
    Topology topology; // prepared: roles assigned, hosts materialised
    Mode mode = Mode::sctsn;
    std::uint64_t seed = 1;
    double duration_s = 100.0;
    double stats_period_s = 2.0;
    TtSources tt;
    BeSources be;
    std::vector<StreamSpec> streams; // explicit sources, placed before generated ones
    ControllerParams controller;
    SwitchParams switches;
    learner::Config learner;
    dpce::Config dpce;
    std::uint64_t max_events = 2'000'000'000ULL;
    bool frame_trace = false;
};

/// Throws ValidationError naming the offending field.
void validate_scenario(const Scenario& s);

/// `base_dir` resolves a relative topology path. Throws ParseError or
/// ValidationError.
Scenario parse_scenario(std::string_view yaml, const std::string& base_dir = ".");
Scenario load_scenario_file(const std::string& path);

} // namespace sctsn::simnet
