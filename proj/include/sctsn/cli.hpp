#pragma once

// Command-line harness: single runs, sweeps over an experiment grid, offline
// period learning on trace files, standalone placement and file validation.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sctsn/metrics.hpp"
#include "sctsn/scenario.hpp"

namespace sctsn::cli {

using simnet::Mode;
using simnet::Scenario;

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_infeasible = 2, exit_internal = 3 };

enum class SweepAxis { mu, tt_count, topology };

const char* to_string(SweepAxis a);

/// One point on the sweep axis; only the fields of that axis are set.
struct SweepPoint {
    std::string label;
    std::optional<double> mean_interarrival_s;
    std::optional<std::size_t> tt_count;
    std::optional<std::size_t> be_count;
    std::optional<std::string> topology_path;
};

struct ExperimentSpec {
    std::string name = "experiment";
    std::string scenario_path; // resolved against the experiment file
    SweepAxis axis = SweepAxis::mu;
    std::vector<SweepPoint> points;
    std::vector<Mode> modes{Mode::sctsn, Mode::srp};
    std::vector<std::uint64_t> seeds{1};
    std::optional<double> duration_s;
};

/// Throws ParseError / ValidationError (empty axis, duplicate seeds, ...).
ExperimentSpec parse_experiment(std::string_view yaml, const std::string& base_dir = ".");
ExperimentSpec load_experiment_file(const std::string& path);

/// Base scenario with the point, mode and seed applied, then validated.
Scenario apply_point(const Scenario& base, const SweepPoint& p, Mode mode, std::uint64_t seed,
                     std::optional<double> duration_s = std::nullopt);

struct SweepCell {
    std::string point;
    Mode mode = Mode::sctsn;
    std::uint64_t seed = 0;
    std::optional<simnet::MetricsReport> report;
    std::string error; // set when the cell failed
};

struct SweepOptions {
    std::size_t jobs = 1;
    std::optional<std::size_t> k_paths;
    bool full_reopt = false;
    std::string cell_dir; // per-cell CSVs written atomically when non-empty
};

/// Cells in (point, seed, mode) order regardless of `jobs`. A failing cell
/// is recorded with its error and the sweep continues.
std::vector<SweepCell> run_sweep(const ExperimentSpec& spec, const SweepOptions& opt = {});

/// Columns: axis,point,mode,seed,status,error, then the metrics columns
/// (empty for failed cells).
void write_sweep_csv(std::ostream& os, SweepAxis axis, const std::vector<SweepCell>& cells);

/// Mean over seeds per (point, mode). Columns: axis,point,mode,runs,failed,
/// tt_mean_s,tt_max_s,tt_p99_s,delayed_tt_fraction,be_mean_s,cr,tnr,unplaced,migrations.
void write_sweep_mean_csv(std::ostream& os, SweepAxis axis, const std::vector<SweepCell>& cells);

/// Per collection period and link: utilisation, mapped weight, smoothed
/// weight and the weight in force, replayed from the run's utilisation.
/// Columns: period,link,utilization,raw_weight,smoothed_weight,active_weight.
void write_weights_csv(std::ostream& os, const simnet::MetricsReport& r, const dpce::Config& cfg);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// Entry point without the program name. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sctsn::cli
