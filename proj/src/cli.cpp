#include "sctsn/cli.hpp"

#include <yaml-cpp/yaml.h>

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "sctsn/learner.hpp"
#include "sctsn/text.hpp"
#include "sctsn/tsor_io.hpp"

namespace fs = std::filesystem;

namespace sctsn::cli {

const char* to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::mu: return "mu";
    case SweepAxis::tt_count: return "tt_count";
    case SweepAxis::topology: return "topology";
    }
    return "?";
}

namespace {

std::size_t line_of(const YAML::Node& n) { return static_cast<std::size_t>(n.Mark().line + 1); }

void check_keys(const YAML::Node& n, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!n.IsMap()) throw ParseError(line_of(n), where + " must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(line_of(kv.first), "unknown key '" + key + "' in " + where);
    }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    fs::path p(path);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    return p.lexically_normal().string();
}

SweepAxis parse_axis(const std::string& s, std::size_t line) {
    if (s == "mu") return SweepAxis::mu;
    if (s == "tt_count") return SweepAxis::tt_count;
    if (s == "topology") return SweepAxis::topology;
    throw ParseError(line, "unknown sweep axis '" + s + "' (expected mu, tt_count or topology)");
}

} // namespace

ExperimentSpec parse_experiment(std::string_view yaml, const std::string& base_dir) {
    ExperimentSpec spec;
    try {
        const YAML::Node root = YAML::Load(std::string(yaml));
        check_keys(root, {"version", "name", "scenario", "modes", "seeds", "duration_s", "sweep"}, "experiment");
        if (!root["version"] || root["version"].as<int>() != 1) throw ParseError(1, "experiment needs 'version: 1'");
        if (!root["scenario"]) throw ParseError(1, "experiment needs a 'scenario' path");
        if (!root["sweep"]) throw ParseError(1, "experiment needs a 'sweep' section");
        if (root["name"]) spec.name = root["name"].as<std::string>();
        spec.scenario_path = resolve(root["scenario"].as<std::string>(), base_dir);
        if (const auto n = root["modes"]) {
            spec.modes.clear();
            for (const auto& m : n) spec.modes.push_back(simnet::parse_mode(m.as<std::string>()));
        }
        if (const auto n = root["seeds"]) spec.seeds = n.as<std::vector<std::uint64_t>>();
        if (const auto n = root["duration_s"]) spec.duration_s = n.as<double>();

        const auto sw = root["sweep"];
        check_keys(sw, {"axis", "values", "be_per_tt"}, "sweep");
        if (!sw["axis"] || !sw["values"]) throw ParseError(line_of(sw), "sweep needs 'axis' and 'values'");
        spec.axis = parse_axis(sw["axis"].as<std::string>(), line_of(sw["axis"]));
        if (sw["be_per_tt"] && spec.axis != SweepAxis::tt_count) {
            throw ParseError(line_of(sw["be_per_tt"]), "be_per_tt applies to the tt_count axis only");
        }
        for (const auto& v : sw["values"]) {
            SweepPoint p;
            switch (spec.axis) {
            case SweepAxis::mu:
                p.mean_interarrival_s = v.as<double>();
                p.label = format_double(*p.mean_interarrival_s);
                break;
            case SweepAxis::tt_count:
                p.tt_count = v.as<std::size_t>();
                if (sw["be_per_tt"]) {
                    p.be_count = static_cast<std::size_t>(static_cast<double>(*p.tt_count) * sw["be_per_tt"].as<double>());
                }
                p.label = std::to_string(*p.tt_count);
                break;
            case SweepAxis::topology:
                check_keys(v, {"topology", "tt", "be", "label"}, "topology point");
                if (!v["topology"]) throw ParseError(line_of(v), "topology point needs a 'topology' path");
                p.topology_path = resolve(v["topology"].as<std::string>(), base_dir);
                if (v["tt"]) p.tt_count = v["tt"].as<std::size_t>();
                if (v["be"]) p.be_count = v["be"].as<std::size_t>();
                p.label = v["label"] ? v["label"].as<std::string>() : fs::path(*p.topology_path).stem().string();
                break;
            }
            spec.points.push_back(std::move(p));
        }
    } catch (const YAML::Exception& e) {
        throw ParseError(static_cast<std::size_t>(e.mark.line + 1), e.msg);
    }
    if (spec.points.empty()) throw ValidationError("experiment: sweep values must not be empty");
    if (spec.modes.empty()) throw ValidationError("experiment: modes must not be empty");
    if (spec.seeds.empty()) throw ValidationError("experiment: seeds must not be empty");
    if (std::set<std::uint64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size()) {
        throw ValidationError("experiment: seeds must be distinct");
    }
    std::set<std::string> labels;
    for (const auto& p : spec.points) {
        if (!labels.insert(p.label).second) throw ValidationError("experiment: duplicate sweep point '" + p.label + "'");
        if (p.mean_interarrival_s && !(*p.mean_interarrival_s > 0)) throw ValidationError("experiment: mu must be positive");
    }
    if (spec.duration_s && !(*spec.duration_s > 0)) throw ValidationError("experiment: duration_s must be positive");
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    return parse_experiment(read_file(path), fs::path(path).parent_path().string());
}

Scenario apply_point(const Scenario& base, const SweepPoint& p, Mode mode, std::uint64_t seed,
                     std::optional<double> duration_s) {
    Scenario s = base;
    s.mode = mode;
    s.seed = seed;
    if (duration_s) s.duration_s = *duration_s;
    if (p.mean_interarrival_s) s.be.mean_interarrival_s = *p.mean_interarrival_s;
    if (p.tt_count) s.tt.count = *p.tt_count;
    if (p.be_count) s.be.count = *p.be_count;
    if (p.topology_path) {
        s.topology_path = *p.topology_path;
        s.topology = prepare_topology_file(s.topology_path);
        s.name = fs::path(s.topology_path).stem().string();
    }
    simnet::validate_scenario(s);
    return s;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

namespace {

std::string csv_field(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

std::string cell_stem(const SweepCell& c) {
    return c.point + "_" + simnet::to_string(c.mode) + "_s" + std::to_string(c.seed);
}

} // namespace

std::vector<SweepCell> run_sweep(const ExperimentSpec& spec, const SweepOptions& opt) {
    const Scenario base = simnet::load_scenario_file(spec.scenario_path);
    std::vector<SweepCell> cells;
    std::vector<const SweepPoint*> points;
    for (const auto& p : spec.points) {
        for (auto seed : spec.seeds) {
            for (auto mode : spec.modes) {
                cells.push_back({p.label, mode, seed, std::nullopt, {}});
                points.push_back(&p);
            }
        }
    }

    auto run_cell = [&](std::size_t i) {
        auto& cell = cells[i];
        try {
            Scenario s = apply_point(base, *points[i], cell.mode, cell.seed, spec.duration_s);
            if (opt.k_paths) s.controller.k_paths = *opt.k_paths;
            if (opt.full_reopt) s.controller.full_reopt = true;
            cell.report = simnet::run(s);
            if (!opt.cell_dir.empty()) {
                std::ostringstream os;
                simnet::write_metrics_csv(os, *cell.report);
                write_file_atomic((fs::path(opt.cell_dir) / (cell_stem(cell) + ".csv")).string(), os.str());
            }
        } catch (const std::exception& e) {
            cell.report.reset();
            cell.error = e.what();
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, cells.size()));
    if (jobs == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
        return cells;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
        });
    }
    for (auto& t : workers) t.join();
    return cells;
}

void write_sweep_csv(std::ostream& os, SweepAxis axis, const std::vector<SweepCell>& cells) {
    const auto header = simnet::metrics_header();
    const auto empty_metrics = std::string(static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')), ',');
    os << "axis,point,mode,seed,status,error," << header << '\n';
    for (const auto& c : cells) {
        os << to_string(axis) << ',' << c.point << ',' << simnet::to_string(c.mode) << ',' << c.seed << ',';
        if (c.report) {
            os << "ok,,";
            simnet::write_metrics_row(os, *c.report);
        } else {
            os << "error," << csv_field(c.error) << ',' << empty_metrics << '\n';
        }
    }
}

void write_sweep_mean_csv(std::ostream& os, SweepAxis axis, const std::vector<SweepCell>& cells) {
    struct Acc {
        std::size_t runs = 0, failed = 0;
        double tt_mean = 0, tt_max = 0, tt_p99 = 0, delayed = 0, be_mean = 0, cr = 0, tnr = 0, unplaced = 0, migrations = 0;
    };
    std::vector<std::pair<std::string, Mode>> order;
    std::map<std::pair<std::string, Mode>, Acc> acc;
    for (const auto& c : cells) {
        const auto key = std::make_pair(c.point, c.mode);
        if (!acc.contains(key)) order.push_back(key);
        auto& a = acc[key];
        if (!c.report) {
            ++a.failed;
            continue;
        }
        const auto& r = *c.report;
        ++a.runs;
        a.tt_mean += r.tt.mean_s;
        a.tt_max += r.tt.max_s;
        a.tt_p99 += r.tt.p99_s;
        a.delayed += r.delayed_tt_fraction;
        a.be_mean += r.be.mean_s;
        a.cr += r.cr;
        a.tnr += r.tnr;
        a.unplaced += static_cast<double>(r.unplaced);
        a.migrations += static_cast<double>(r.migrations);
    }
    os << "axis,point,mode,runs,failed,tt_mean_s,tt_max_s,tt_p99_s,delayed_tt_fraction,be_mean_s,cr,tnr,unplaced,migrations\n";
    for (const auto& key : order) {
        const auto& a = acc[key];
        os << to_string(axis) << ',' << key.first << ',' << simnet::to_string(key.second) << ',' << a.runs << ',' << a.failed;
        for (double v : {a.tt_mean, a.tt_max, a.tt_p99, a.delayed, a.be_mean, a.cr, a.tnr, a.unplaced, a.migrations}) {
            os << ',';
            if (a.runs > 0) os << format_double(v / static_cast<double>(a.runs));
        }
        os << '\n';
    }
}

void write_weights_csv(std::ostream& os, const simnet::MetricsReport& r, const dpce::Config& cfg) {
    dpce::LinkWeightState state(r.link_names.size(), cfg);
    os << "period,link,utilization,raw_weight,smoothed_weight,active_weight\n";
    for (std::size_t k = 0; k < r.utilization.size(); ++k) {
        state.observe(r.utilization[k]);
        for (std::size_t e = 0; e < r.link_names.size(); ++e) {
            const double u = state.utilization()[e];
            os << k << ',' << r.link_names[e] << ',' << format_double(u) << ','
               << format_double(dpce::map_utilization_to_weight(u, cfg)) << ','
               << format_double(state.smoothed(static_cast<LinkId>(e))) << ',' << format_double(state.active()[e]) << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> out;
    std::optional<std::size_t> k_paths;
    bool full_reopt = false;
};

std::string out_dir(const Common& c) {
    if (c.out) return *c.out;
    if (const char* env = std::getenv("SCTSN_OUT_DIR"); env && *env) return env;
    return "results";
}

int cmd_run(const std::string& path, const Common& c, std::optional<double> duration, bool trace, std::ostream& out) {
    Scenario s = simnet::load_scenario_file(path);
    if (c.seed) s.seed = *c.seed;
    if (c.mode) s.mode = simnet::parse_mode(*c.mode);
    if (c.k_paths) s.controller.k_paths = *c.k_paths;
    if (c.full_reopt) s.controller.full_reopt = true;
    if (duration) s.duration_s = *duration;
    simnet::validate_scenario(s);

    const auto res = simnet::simulate(s);
    const auto report = simnet::compute_metrics(res);
    const fs::path dir = fs::path(out_dir(c)) / (s.name + "_" + simnet::to_string(s.mode) + "_s" + std::to_string(s.seed));
    auto dump = [&](const char* file, auto&& writer) {
        std::ostringstream os;
        writer(os);
        write_file_atomic((dir / file).string(), os.str());
    };
    dump("metrics.csv", [&](std::ostream& os) { simnet::write_metrics_csv(os, report); });
    dump("summary.txt", [&](std::ostream& os) { simnet::write_summary(os, report); });
    dump("utilization.csv", [&](std::ostream& os) { simnet::write_utilization_csv(os, report); });
    dump("weights.csv", [&](std::ostream& os) { write_weights_csv(os, report, s.dpce); });
    dump("histogram.csv", [&](std::ostream& os) { simnet::write_histogram_csv(os, report); });
    if (trace || s.frame_trace) dump("frames.csv", [&](std::ostream& os) { simnet::write_frame_trace(os, res); });
    simnet::write_summary(out, report);
    out << "wrote " << dir.string() << '\n';
    return exit_ok;
}

int cmd_sweep(const std::string& path, const Common& c, std::size_t jobs, std::optional<double> duration, std::ostream& out,
              std::ostream& err) {
    auto spec = load_experiment_file(path);
    if (c.seed) spec.seeds = {*c.seed};
    if (c.mode) spec.modes = {simnet::parse_mode(*c.mode)};
    if (duration) spec.duration_s = *duration;
    const fs::path dir = fs::path(out_dir(c)) / spec.name;
    SweepOptions opt;
    opt.jobs = jobs;
    opt.k_paths = c.k_paths;
    opt.full_reopt = c.full_reopt;
    opt.cell_dir = (dir / "cells").string();
    const auto cells = run_sweep(spec, opt);

    std::ostringstream rows, means;
    write_sweep_csv(rows, spec.axis, cells);
    write_sweep_mean_csv(means, spec.axis, cells);
    write_file_atomic((dir / "sweep.csv").string(), rows.str());
    write_file_atomic((dir / "sweep_mean.csv").string(), means.str());
    std::size_t failed = 0;
    for (const auto& cell : cells) {
        if (cell.report) continue;
        ++failed;
        err << "cell " << cell_stem(cell) << " failed: " << cell.error << '\n';
    }
    out << means.str() << "wrote " << dir.string() << " (" << cells.size() << " cells, " << failed << " failed)\n";
    return exit_ok;
}

int cmd_learn_test(const std::vector<std::string>& traces, const Common& c, std::optional<double> bin_width,
                   std::ostream& out) {
    learner::Config cfg;
    if (bin_width) cfg.fixed_bin_width_s = *bin_width;
    std::ostringstream csv;
    csv << "trace,arrivals,bin_width_s,period_s,valid,confidence,mean_interarrival_s,verdict\n";
    out << std::left << std::setw(28) << "trace" << std::right << std::setw(9) << "arrivals" << std::setw(12) << "bin[us]"
        << std::setw(12) << "period[us]" << std::setw(8) << "conf" << std::setw(12) << "mean[us]"
        << "  verdict\n";
    for (const auto& path : traces) {
        const auto ts = learner::parse_trace(read_file(path));
        if (ts.size() < 2) throw ValidationError(path + ": a trace needs at least two arrivals");
        const auto est = learner::estimate_from_timestamps(ts, cfg);
        const double mean = learner::mean_interarrival(ts);
        const char* verdict = ts.size() < cfg.n_min                                         ? "undecided"
                              : est.valid && est.confidence >= cfg.confidence_threshold ? "tt"
                                                                                          : "be";
        const auto name = fs::path(path).filename().string();
        csv << name << ',' << ts.size() << ',' << format_double(est.bin_width_s) << ','
            << (est.valid ? format_double(est.period_s) : std::string()) << ',' << (est.valid ? 1 : 0) << ','
            << format_double(est.confidence) << ',' << format_double(mean) << ',' << verdict << '\n';
        std::ostringstream period;
        if (est.valid) period << std::fixed << std::setprecision(1) << est.period_s * 1e6;
        else period << '-';
        out << std::left << std::setw(28) << name << std::right << std::setw(9) << ts.size() << std::setw(12) << std::fixed
            << std::setprecision(1) << est.bin_width_s * 1e6 << std::setw(12) << period.str() << std::setw(8)
            << std::setprecision(3) << est.confidence << std::setw(12) << std::setprecision(1) << mean * 1e6 << "  "
            << verdict << std::defaultfloat << '\n';
    }
    const auto file = fs::path(out_dir(c)) / "learn_test.csv";
    write_file_atomic(file.string(), csv.str());
    out << "wrote " << file.string() << '\n';
    return exit_ok;
}

int cmd_solve(const std::string& path, const Common& c, bool oracle, std::ostream& out, std::ostream& err) {
    const auto inst = tsor::load_instance_file(path);
    const auto res = oracle ? tsor::brute_force_solve(inst) : tsor::solve(inst);
    if (!res.feasible()) {
        const auto& r = *res.infeasible;
        err << "infeasible: " << tsor::to_string(r.family) << " constraint: " << r.detail << '\n';
        return exit_infeasible;
    }
    const auto& sol = *res.solution;
    const auto residuals = tsor::verify_solution(inst, sol);
    std::ostringstream csv, rep;
    tsor::write_solution_csv(csv, inst, sol);
    tsor::write_residuals(rep, residuals);
    const fs::path dir = fs::path(out_dir(c)) / fs::path(path).stem();
    write_file_atomic((dir / "solution.csv").string(), csv.str());
    write_file_atomic((dir / "residuals.txt").string(), rep.str());
    out << "objective " << format_double(sol.objective) << '\n';
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        out << "demand " << inst.demands[d].id << " path " << sol.chosen(d) << ':';
        for (LinkId e : inst.paths[d][sol.chosen(d)].links) out << ' ' << inst.links[e].id;
        out << '\n';
    }
    out << "nodes " << res.stats.nodes << "  max residual " << format_double(residuals.max()) << '\n';
    out << "wrote " << dir.string() << '\n';
    return exit_ok;
}

int cmd_validate(const std::vector<std::string>& files, std::ostream& out) {
    for (const auto& path : files) {
        const auto ext = fs::path(path).extension().string();
        if (ext == ".topo") {
            const auto t = prepare_topology_file(path);
            out << "ok " << path << ": " << t.node_count() << " switches, " << t.edge_switches().size() << " edge, "
                << t.hosts().size() << " hosts\n";
        } else if (ext == ".inst") {
            const auto inst = tsor::load_instance_file(path);
            out << "ok " << path << ": " << inst.links.size() << " links, " << inst.demands.size() << " demands\n";
        } else if (ext == ".trace") {
            const auto ts = learner::parse_trace(read_file(path));
            out << "ok " << path << ": " << ts.size() << " arrivals\n";
        } else if (ext == ".yaml" || ext == ".yml") {
            const YAML::Node root = YAML::LoadFile(path);
            if (root["sweep"]) {
                const auto spec = load_experiment_file(path);
                const auto base = simnet::load_scenario_file(spec.scenario_path);
                for (const auto& p : spec.points) apply_point(base, p, spec.modes.front(), spec.seeds.front(), spec.duration_s);
                out << "ok " << path << ": " << spec.points.size() << " points x " << spec.seeds.size() << " seeds x "
                    << spec.modes.size() << " modes\n";
            } else {
                const auto s = simnet::load_scenario_file(path);
                out << "ok " << path << ": " << simnet::generate_streams(s).size() << " streams on "
                    << s.topology.node_count() << " switches\n";
            }
        } else {
            throw ValidationError(path + ": unknown file type '" + ext + "'");
        }
    }
    return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-configuring TSN controller simulator"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "RNG seed");
        sub->add_option("--mode", common.mode, "sctsn or srp")->check(CLI::IsMember({"sctsn", "srp"}));
        sub->add_option("--out", common.out, "Output directory (default: $SCTSN_OUT_DIR or results)");
        sub->add_option("--k-paths", common.k_paths, "Candidate paths per demand")->check(CLI::PositiveNumber);
        sub->add_flag("--full-reopt", common.full_reopt, "Re-place every TT stream on each new classification");
    };

    std::string scenario, experiment, instance;
    std::vector<std::string> traces, files;
    std::optional<double> duration, bin_width;
    std::size_t jobs = 1;
    bool trace = false, oracle = false;

    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
    run_cmd->add_option("scenario", scenario, "Scenario file")->required();
    run_cmd->add_option("--duration", duration, "Override the horizon in seconds")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--trace", trace, "Also write the per-frame trace");
    add_common(run_cmd);

    auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment grid");
    sweep_cmd->add_option("experiment", experiment, "Experiment file")->required();
    sweep_cmd->add_option("--jobs", jobs, "Cells simulated concurrently")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--duration", duration, "Override the horizon in seconds")->check(CLI::PositiveNumber);
    add_common(sweep_cmd);

    auto* learn_cmd = app.add_subcommand("learn-test", "Estimate periods of arrival traces");
    learn_cmd->add_option("traces", traces, "Trace files")->required();
    learn_cmd->add_option("--bin-width", bin_width, "Fixed bin width in seconds")->check(CLI::PositiveNumber);
    add_common(learn_cmd);

    auto* solve_cmd = app.add_subcommand("solve", "Solve a flow-placement instance");
    solve_cmd->add_option("instance", instance, "Instance file")->required();
    solve_cmd->add_flag("--oracle", oracle, "Use the exhaustive exact solver");
    add_common(solve_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "Check topology, scenario, experiment, instance or trace files");
    validate_cmd->add_option("files", files, "Files to check")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*run_cmd) return cmd_run(scenario, common, duration, trace, out);
        if (*sweep_cmd) return cmd_sweep(experiment, common, jobs, duration, out, err);
        if (*learn_cmd) return cmd_learn_test(traces, common, bin_width, out);
        if (*solve_cmd) return cmd_solve(instance, common, oracle, out, err);
        if (*validate_cmd) return cmd_validate(files, out);
    } catch (const tsor::Infeasible& e) {
        err << "infeasible: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const YAML::Exception& e) {
        err << "error: line " << e.mark.line + 1 << ": " << e.msg << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_internal;
}

} // namespace sctsn::cli
