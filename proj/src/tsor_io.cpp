#include "sctsn/tsor_io.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "sctsn/text.hpp"

namespace sctsn::tsor {

TsorInstance parse_instance(std::string_view text) {
    TsorInstance inst;
    std::map<std::string, NodeId, std::less<>> nodes;
    std::map<std::string, LinkId, std::less<>> links;
    std::map<std::string, std::size_t, std::less<>> demands;
    bool have_classes = false;

    auto node = [&](std::string_view name) {
        auto it = nodes.find(name);
        if (it != nodes.end()) return it->second;
        const auto id = static_cast<NodeId>(nodes.size());
        nodes.emplace(std::string(name), id);
        return id;
    };
    auto need = [](const std::vector<std::string_view>& tok, std::size_t n, std::size_t line) {
        if (tok.size() < n) throw ParseError(line, "'" + std::string(tok[0]) + "' needs at least " + std::to_string(n - 1) + " fields");
    };

    for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
        const auto kw = tok[0];
        if (kw == "version") {
            need(tok, 2, line);
            if (parse_integer(tok[1], line) != 1) throw ParseError(line, "unsupported version");
        } else if (kw == "classes") {
            need(tok, 2, line);
            inst.classes.clear();
            for (std::size_t i = 1; i < tok.size(); ++i) inst.classes.push_back(static_cast<int>(parse_integer(tok[i], line)));
            have_classes = true;
        } else if (kw == "link") {
            need(tok, 4, line);
            LinkData l;
            l.id = std::string(tok[1]);
            if (links.contains(l.id)) throw ParseError(line, "duplicate link '" + l.id + "'");
            l.src = node(tok[2]);
            l.dst = node(tok[3]);
            for (std::size_t i = 4; i < tok.size(); ++i) {
                auto [k, v] = split_option(tok[i], line);
                if (k == "capacity") l.capacity_bps = parse_si(v, line);
                else if (k == "lo") l.base_delay = parse_number(v, line);
                else if (k == "lq") l.queue_factor = parse_number(v, line);
                else throw ParseError(line, "unknown link option '" + std::string(k) + "'");
            }
            if (!(l.capacity_bps > 0) || l.base_delay < 0 || l.queue_factor < 0) throw ParseError(line, "invalid parameters for link '" + l.id + "'");
            links.emplace(l.id, static_cast<LinkId>(inst.links.size()));
            inst.links.push_back(std::move(l));
        } else if (kw == "demand") {
            need(tok, 4, line);
            Demand d;
            d.id = std::string(tok[1]);
            if (demands.contains(d.id)) throw ParseError(line, "duplicate demand '" + d.id + "'");
            d.src_switch = node(tok[2]);
            d.dst_switch = node(tok[3]);
            for (std::size_t i = 4; i < tok.size(); ++i) {
                auto [k, v] = split_option(tok[i], line);
                if (k == "class") d.cls = static_cast<int>(parse_integer(v, line));
                else if (k == "load") d.load_bps = parse_si(v, line);
                else if (k == "bound") d.latency_bound = parse_number(v, line);
                else if (k == "period") d.period_s = parse_number(v, line);
                else if (k == "frame") d.frame_bytes = static_cast<std::uint32_t>(parse_integer(v, line));
                else throw ParseError(line, "unknown demand option '" + std::string(k) + "'");
            }
            demands.emplace(d.id, inst.demands.size());
            inst.demands.push_back(std::move(d));
            inst.paths.emplace_back();
            inst.preassigned.emplace_back();
        } else if (kw == "path") {
            need(tok, 3, line);
            auto it = demands.find(tok[1]);
            if (it == demands.end()) throw ParseError(line, "path for undeclared demand '" + std::string(tok[1]) + "'");
            Path p;
            for (std::size_t i = 2; i < tok.size(); ++i) {
                auto l = links.find(tok[i]);
                if (l == links.end()) throw ParseError(line, "undeclared link '" + std::string(tok[i]) + "'");
                p.links.push_back(l->second);
            }
            inst.paths[it->second].push_back(std::move(p));
        } else if (kw == "assign") {
            need(tok, 3, line);
            auto it = demands.find(tok[1]);
            if (it == demands.end()) throw ParseError(line, "assignment for undeclared demand '" + std::string(tok[1]) + "'");
            const auto rank = parse_integer(tok[2], line);
            if (rank < 0) throw ParseError(line, "negative path rank");
            if (inst.preassigned[it->second]) throw ParseError(line, "demand '" + std::string(tok[1]) + "' already assigned");
            inst.preassigned[it->second] = static_cast<std::size_t>(rank);
        } else {
            throw ParseError(line, "unknown keyword '" + std::string(kw) + "'");
        }
    });
    if (!have_classes) {
        for (int s = 0; s < class_count; ++s) inst.classes.push_back(s);
    }
    if (inst.demands.empty()) throw ValidationError("instance declares no demands");
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        if (inst.paths[d].empty()) throw Infeasible({ConstraintFamily::assignment, "demand " + inst.demands[d].id + " has no candidate path"});
    }
    validate_instance(inst);
    return inst;
}

TsorInstance load_instance_file(const std::string& path) { return parse_instance(read_file(path)); }

std::string format_instance(const TsorInstance& inst) {
    auto name = [&](std::optional<NodeId> n) { return n ? "n" + std::to_string(*n) : std::string("n?"); };
    std::ostringstream os;
    os << "version 1\nclasses";
    for (int s : inst.classes) os << ' ' << s;
    os << '\n';
    for (const auto& l : inst.links) {
        os << "link " << l.id << ' ' << name(l.src) << ' ' << name(l.dst) << " capacity=" << format_double(l.capacity_bps)
           << " lo=" << format_double(l.base_delay) << " lq=" << format_double(l.queue_factor) << '\n';
    }
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        const auto& dem = inst.demands[d];
        os << "demand " << dem.id << " n" << dem.src_switch << " n" << dem.dst_switch << " class=" << dem.cls
           << " load=" << format_double(dem.load_bps) << " bound=" << format_double(dem.latency_bound) << '\n';
        for (const auto& p : inst.paths[d]) {
            os << "path " << dem.id;
            for (LinkId e : p.links) os << ' ' << inst.links[e].id;
            os << '\n';
        }
        if (inst.preassigned[d]) os << "assign " << dem.id << ' ' << *inst.preassigned[d] << '\n';
    }
    return os.str();
}

void write_solution_csv(std::ostream& os, const TsorInstance& inst, const TsorSolution& sol) {
    os << "kind,demand,path,link,class,value\n";
    os << "objective,,,,," << format_double(sol.objective) << '\n';
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
            os << "x," << inst.demands[d].id << ',' << p << ",,," << format_double(sol.x[d][p]) << '\n';
        }
    }
    std::vector<int> classes = inst.classes;
    std::sort(classes.begin(), classes.end());
    for (std::size_t e = 0; e < inst.links.size(); ++e) {
        for (int s : classes) os << "g,,," << inst.links[e].id << ',' << s << ',' << format_double(sol.g[e][s]) << '\n';
    }
}

void write_residuals(std::ostream& os, const Residuals& r) {
    os << "assignment " << format_double(r.assignment) << '\n'
       << "capacity " << format_double(r.capacity) << '\n'
       << "gate_sum " << format_double(r.gate_sum) << '\n'
       << "latency " << format_double(r.latency) << '\n'
       << "gate_congestion " << format_double(r.gate_congestion) << '\n'
       << "preassignment " << format_double(r.preassignment) << '\n'
       << "bounds " << format_double(r.bounds) << '\n';
}

} // namespace sctsn::tsor
