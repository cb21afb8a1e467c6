#include "sctsn/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <set>

#include "sctsn/text.hpp"

namespace sctsn::simnet {

const char* to_string(Mode m) { return m == Mode::srp ? "srp" : "sctsn"; }

Mode parse_mode(std::string_view s) {
    if (s == "sctsn") return Mode::sctsn;
    if (s == "srp") return Mode::srp;
    throw ValidationError("unknown mode '" + std::string(s) + "' (expected sctsn or srp)");
}

void validate_scenario(const Scenario& s) {
    auto fail = [](const std::string& msg) { throw ValidationError("scenario: " + msg); };
    if (!(s.duration_s > 0)) fail("duration_s must be positive");
    if (!(s.stats_period_s > 0)) fail("stats_period_s must be positive");
    if (!(s.duration_s > s.stats_period_s)) fail("duration_s must exceed stats_period_s");
    if (!(s.tt.period_min_s > 0) || s.tt.period_max_s < s.tt.period_min_s) fail("tt period range is invalid");
    if (!(s.be.mean_interarrival_s > 0)) fail("be.mean_interarrival_s must be positive");
    if (s.tt.frame_bytes == 0 || s.be.frame_bytes == 0) fail("frame_bytes must be positive");
    if (s.controller.k_paths == 0) fail("controller.k_paths must be at least 1");
    if (s.controller.rule_install_delay_s < 0 || s.controller.solve_delay_s < 0) fail("controller delays must be nonnegative");
    if (s.switches.processing_delay_s < 0) fail("switch.processing_delay_s must be nonnegative");
    if (s.switches.queue_bytes < 1522) fail("switch.queue_bytes must hold at least one frame");
    if (!s.topology.roles_assigned()) fail("topology roles are not assigned");
    std::set<NodeId> edge_with_hosts;
    for (const auto& h : s.topology.hosts()) edge_with_hosts.insert(h.attached);
    const std::size_t generated = s.tt.count + s.be.count;
    if (generated > 0 && edge_with_hosts.size() < 2) fail("generated sources need hosts on at least two edge switches");
    for (const auto& st : s.streams) {
        const auto src = s.topology.find_host(st.src_host), dst = s.topology.find_host(st.dst_host);
        if (!src) fail("unknown host '" + st.src_host + "'");
        if (!dst) fail("unknown host '" + st.dst_host + "'");
        if (s.topology.hosts()[*src].attached == s.topology.hosts()[*dst].attached) {
            fail("stream " + st.src_host + " -> " + st.dst_host + " stays on one edge switch");
        }
        if (st.kind == StreamKind::tt && !(st.period_s > 0)) fail("stream period_s must be positive");
        if (st.kind == StreamKind::be && !(st.mean_interarrival_s > 0)) fail("stream mean_interarrival_s must be positive");
        if (st.frame_bytes == 0) fail("stream frame_bytes must be positive");
        if (st.start_s && *st.start_s < 0) fail("stream start_s must be nonnegative");
    }
}

namespace {

void check_keys(const YAML::Node& n, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!n.IsMap()) throw ParseError(static_cast<std::size_t>(n.Mark().line + 1), where + " must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError(static_cast<std::size_t>(kv.first.Mark().line + 1), "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, T& out) {
    if (const auto n = parent[key]) out = n.as<T>();
}

StreamSpec parse_stream(const YAML::Node& n) {
    check_keys(n, {"kind", "src", "dst", "period_s", "mean_interarrival_s", "start_s", "frame_bytes"}, "stream");
    StreamSpec s;
    const auto kind = n["kind"] ? n["kind"].as<std::string>() : std::string("tt");
    if (kind == "tt") s.kind = StreamKind::tt;
    else if (kind == "be") s.kind = StreamKind::be;
    else throw ParseError(static_cast<std::size_t>(n.Mark().line + 1), "stream kind must be tt or be");
    if (!n["src"] || !n["dst"]) throw ParseError(static_cast<std::size_t>(n.Mark().line + 1), "stream needs src and dst");
    s.src_host = n["src"].as<std::string>();
    s.dst_host = n["dst"].as<std::string>();
    read(n, "period_s", s.period_s);
    read(n, "mean_interarrival_s", s.mean_interarrival_s);
    read(n, "frame_bytes", s.frame_bytes);
    if (n["start_s"]) s.start_s = n["start_s"].as<double>();
    return s;
}

} // namespace

Scenario parse_scenario(std::string_view yaml, const std::string& base_dir) {
    Scenario s;
    try {
        const YAML::Node root = YAML::Load(std::string(yaml));
        check_keys(root, {"version", "name", "topology", "mode", "seed", "duration_s", "stats_period_s", "tt", "be", "streams",
                          "controller", "switch", "learner", "dpce", "max_events", "frame_trace"},
                   "scenario");
        if (!root["version"] || root["version"].as<int>() != 1) throw ParseError(1, "scenario needs 'version: 1'");
        if (!root["topology"]) throw ParseError(1, "scenario needs a 'topology' path");
        read(root, "name", s.name);
        s.topology_path = root["topology"].as<std::string>();
        if (root["mode"]) s.mode = parse_mode(root["mode"].as<std::string>());
        read(root, "seed", s.seed);
        read(root, "duration_s", s.duration_s);
        read(root, "stats_period_s", s.stats_period_s);
        read(root, "max_events", s.max_events);
        read(root, "frame_trace", s.frame_trace);
        if (const auto n = root["tt"]) {
            check_keys(n, {"count", "period_min_s", "period_max_s", "frame_bytes"}, "tt");
            read(n, "count", s.tt.count);
            read(n, "period_min_s", s.tt.period_min_s);
            read(n, "period_max_s", s.tt.period_max_s);
            read(n, "frame_bytes", s.tt.frame_bytes);
        }
        if (const auto n = root["be"]) {
            check_keys(n, {"count", "mean_interarrival_s", "frame_bytes"}, "be");
            read(n, "count", s.be.count);
            read(n, "mean_interarrival_s", s.be.mean_interarrival_s);
            read(n, "frame_bytes", s.be.frame_bytes);
        }
        if (const auto n = root["streams"]) {
            for (const auto& st : n) s.streams.push_back(parse_stream(st));
        }
        if (const auto n = root["controller"]) {
            check_keys(n, {"k_paths", "rule_install_delay_s", "solve_delay_s", "full_reopt"}, "controller");
            read(n, "k_paths", s.controller.k_paths);
            read(n, "rule_install_delay_s", s.controller.rule_install_delay_s);
            read(n, "solve_delay_s", s.controller.solve_delay_s);
            read(n, "full_reopt", s.controller.full_reopt);
        }
        if (const auto n = root["switch"]) {
            check_keys(n, {"processing_delay_s", "queue_bytes"}, "switch");
            read(n, "processing_delay_s", s.switches.processing_delay_s);
            read(n, "queue_bytes", s.switches.queue_bytes);
        }
        if (const auto n = root["learner"]) {
            check_keys(n, {"n_min", "window", "reestimate_every", "confidence_threshold", "deviation_threshold", "min_bin_width_s"},
                       "learner");
            read(n, "n_min", s.learner.n_min);
            read(n, "window", s.learner.window);
            read(n, "reestimate_every", s.learner.reestimate_every);
            read(n, "confidence_threshold", s.learner.confidence_threshold);
            read(n, "deviation_threshold", s.learner.deviation_threshold);
            read(n, "min_bin_width_s", s.learner.min_bin_width_s);
        }
        if (const auto n = root["dpce"]) {
            check_keys(n, {"u_low", "w_min", "w_max", "update_threshold"}, "dpce");
            read(n, "u_low", s.dpce.u_low);
            read(n, "w_min", s.dpce.w_min);
            read(n, "w_max", s.dpce.w_max);
            read(n, "update_threshold", s.dpce.update_threshold);
        }
    } catch (const YAML::Exception& e) {
        throw ParseError(static_cast<std::size_t>(e.mark.line + 1), e.msg);
    }
    s.dpce.period_s = s.stats_period_s;
    std::filesystem::path topo(s.topology_path);
    if (topo.is_relative()) topo = std::filesystem::path(base_dir) / topo;
    s.topology_path = topo.lexically_normal().string();
    s.topology = prepare_topology_file(s.topology_path);
    validate_scenario(s);
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    const auto text = read_file(path);
    return parse_scenario(text, std::filesystem::path(path).parent_path().string());
}

} // namespace sctsn::simnet
