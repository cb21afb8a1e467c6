#include "sctsn/tsor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace sctsn::tsor {

namespace {

constexpr double tol = 1e-9;

bool in_classes(const TsorInstance& inst, int s) {
    return std::find(inst.classes.begin(), inst.classes.end(), s) != inst.classes.end();
}

// Lowest class of S not in `used`, or -1.
int passive_class(const TsorInstance& inst, const std::set<int>& used) {
    int best = -1;
    for (int s : inst.classes) {
        if (!used.contains(s) && (best < 0 || s < best)) best = s;
    }
    return best;
}

std::vector<int> sorted_classes(const TsorInstance& inst) {
    std::vector<int> s = inst.classes;
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

std::size_t TsorInstance::assignment_variable_count() const {
    std::size_t n = 0;
    for (const auto& p : paths) n += p.size();
    return n;
}

const char* to_string(ConstraintFamily f) {
    switch (f) {
    case ConstraintFamily::assignment: return "assignment";
    case ConstraintFamily::capacity: return "capacity";
    case ConstraintFamily::gate_sum: return "gate_sum";
    case ConstraintFamily::latency: return "latency";
    case ConstraintFamily::gate_congestion: return "gate_congestion";
    case ConstraintFamily::preassignment: return "preassignment";
    }
    return "?";
}

void validate_instance(const TsorInstance& inst) {
    const std::size_t nd = inst.demands.size();
    if (inst.paths.size() != nd || inst.preassigned.size() != nd) {
        throw ValidationError("instance: per-demand vectors differ in length");
    }
    if (inst.classes.empty()) throw ValidationError("instance: empty class set");
    std::set<int> seen_cls;
    for (int s : inst.classes) {
        if (s < 0 || s >= class_count) throw ValidationError("instance: class " + std::to_string(s) + " out of range");
        if (!seen_cls.insert(s).second) throw ValidationError("instance: duplicate class " + std::to_string(s));
    }
    for (const auto& l : inst.links) {
        if (!(l.capacity_bps > 0) || !(l.base_delay >= 0) || !(l.queue_factor >= 0)) {
            throw ValidationError("link " + l.id + ": invalid parameters");
        }
    }
    std::set<std::string> ids;
    for (std::size_t d = 0; d < nd; ++d) {
        const auto& dem = inst.demands[d];
        validate_demand(dem);
        if (!ids.insert(dem.id).second) throw ValidationError("duplicate demand " + dem.id);
        if (!in_classes(inst, dem.cls)) throw ValidationError("demand " + dem.id + ": class outside the class set");
        for (const auto& p : inst.paths[d]) {
            if (p.empty()) throw ValidationError("demand " + dem.id + ": empty candidate path");
            std::set<LinkId> used;
            for (std::size_t i = 0; i < p.links.size(); ++i) {
                const LinkId e = p.links[i];
                if (e >= inst.links.size()) throw ValidationError("demand " + dem.id + ": unknown link in path");
                if (!used.insert(e).second) throw ValidationError("demand " + dem.id + ": path repeats a link");
                const auto& l = inst.links[e];
                if (i > 0) {
                    const auto& prev = inst.links[p.links[i - 1]];
                    if (prev.dst && l.src && *prev.dst != *l.src) {
                        throw ValidationError("demand " + dem.id + ": path is not contiguous");
                    }
                }
            }
            const auto& first = inst.links[p.links.front()];
            const auto& last = inst.links[p.links.back()];
            if ((first.src && *first.src != dem.src_switch) || (last.dst && *last.dst != dem.dst_switch)) {
                throw ValidationError("demand " + dem.id + ": path does not connect its endpoints");
            }
        }
        if (inst.preassigned[d] && *inst.preassigned[d] >= inst.paths[d].size()) {
            throw ValidationError("demand " + dem.id + ": preassigned path is not a candidate");
        }
    }
}

TsorInstance build_instance(const Topology& topo, std::vector<Demand> demands,
                            const std::map<std::string, Path>& existing, std::size_t k) {
    if (demands.empty()) throw std::invalid_argument("build_instance needs at least one demand");
    if (k == 0) throw std::invalid_argument("build_instance needs k >= 1");
    TsorInstance inst;
    for (LinkId e = 0; e < topo.link_count(); ++e) {
        const auto& l = topo.link(e);
        inst.links.push_back({topo.node_name(l.src) + "-" + topo.node_name(l.dst), l.src, l.dst,
                              l.params.capacity_bps, l.params.base_delay, l.params.queue_factor});
    }
    for (int s = 0; s < class_count; ++s) inst.classes.push_back(s);
    for (auto& d : demands) {
        if (d.src_switch == d.dst_switch) throw ValidationError("demand " + d.id + ": source and destination switch coincide");
        auto cands = k_shortest_paths(topo, d.src_switch, d.dst_switch, k);
        if (cands.empty()) throw Infeasible({ConstraintFamily::assignment, "demand " + d.id + " has no candidate path"});
        std::optional<std::size_t> pre;
        if (auto it = existing.find(d.id); it != existing.end()) {
            auto pos = std::find(cands.begin(), cands.end(), it->second);
            if (pos == cands.end()) {
                if (!is_valid_path(topo, it->second)) throw ValidationError("demand " + d.id + ": existing path is invalid");
                cands.push_back(it->second);
                pos = cands.end() - 1;
            }
            pre = static_cast<std::size_t>(pos - cands.begin());
        }
        if (!(d.latency_bound > 0)) {
            double per_pass = 0.0;
            for (LinkId e : cands.front().links) per_pass += inst.links[e].base_delay + inst.links[e].queue_factor;
            d.latency_bound = 2.0 * per_pass;
        }
        inst.paths.push_back(std::move(cands));
        inst.preassigned.push_back(pre);
        inst.demands.push_back(std::move(d));
    }
    validate_instance(inst);
    return inst;
}

LinearizedProgram linearize(const TsorInstance& inst) {
    validate_instance(inst);
    LinearizedProgram out;
    auto& P = out.problem;
    const auto classes = sorted_classes(inst);
    const std::size_t nd = inst.demands.size(), ne = inst.links.size();

    out.x.resize(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
            double c = 0.0;
            for (LinkId e : inst.paths[d][p].links) c += inst.links[e].base_delay + inst.links[e].queue_factor;
            const auto v = P.add_variable("x_" + inst.demands[d].id + "_" + std::to_string(p), 0.0, 1.0, c);
            out.x[d].push_back(v);
            out.binaries.push_back(v);
        }
    }
    out.g.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        for (int s : classes) out.g[e][s] = P.add_variable("g_" + inst.links[e].id + "_" + std::to_string(s), 0.0, 1.0);
    }
    auto count = [&](const char* fam) { ++out.rows_per_family[fam]; };

    for (std::size_t d = 0; d < nd; ++d) {
        lp::Row r{{}, lp::Sense::eq, 1.0, "assign_" + inst.demands[d].id};
        for (auto v : out.x[d]) r.terms.emplace_back(v, 1.0);
        P.add_row(std::move(r));
        count("assignment");
    }
    for (std::size_t e = 0; e < ne; ++e) {
        lp::Row r{{}, lp::Sense::le, inst.links[e].capacity_bps, "cap_" + inst.links[e].id};
        for (std::size_t d = 0; d < nd; ++d) {
            for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
                const auto& links = inst.paths[d][p].links;
                if (std::find(links.begin(), links.end(), e) != links.end()) r.terms.emplace_back(out.x[d][p], inst.demands[d].load_bps);
            }
        }
        P.add_row(std::move(r));
        count("capacity");
    }
    for (std::size_t e = 0; e < ne; ++e) {
        lp::Row r{{}, lp::Sense::eq, 1.0, "gates_" + inst.links[e].id};
        for (int s : classes) r.terms.emplace_back(*out.g[e][s], 1.0);
        P.add_row(std::move(r));
        count("gate_sum");
    }
    for (std::size_t d = 0; d < nd; ++d) {
        lp::Row lat{{}, lp::Sense::le, inst.demands[d].latency_bound, "lat_" + inst.demands[d].id};
        const int s = inst.demands[d].cls;
        for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
            const auto xv = out.x[d][p];
            for (LinkId e : inst.paths[d][p].links) {
                const auto& l = inst.links[e];
                const auto gv = *out.g[e][s];
                const auto z = P.add_variable("z_" + inst.demands[d].id + "_" + std::to_string(p) + "_" + l.id, 0.0, 1.0,
                                              -l.queue_factor);
                ++out.aux_count;
                lat.terms.emplace_back(xv, l.base_delay + l.queue_factor);
                lat.terms.emplace_back(z, -l.queue_factor);
                P.add_row({{{z, 1.0}, {xv, -1.0}}, lp::Sense::le, 0.0, "mc_zx"});
                P.add_row({{{z, 1.0}, {gv, -1.0}}, lp::Sense::le, 0.0, "mc_zg"});
                P.add_row({{{z, 1.0}, {gv, -1.0}, {xv, -1.0}}, lp::Sense::ge, -1.0, "mc_low"});
                out.rows_per_family["mccormick"] += 3;
            }
        }
        P.add_row(std::move(lat));
        count("latency");
    }
    for (std::size_t e = 0; e < ne; ++e) {
        for (int s : classes) {
            lp::Row r{{{*out.g[e][s], 1.0}}, lp::Sense::ge, 0.0, "cong_" + inst.links[e].id + "_" + std::to_string(s)};
            for (std::size_t d = 0; d < nd; ++d) {
                if (inst.demands[d].cls != s) continue;
                for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
                    const auto& links = inst.paths[d][p].links;
                    if (std::find(links.begin(), links.end(), e) != links.end()) {
                        r.terms.emplace_back(out.x[d][p], -inst.demands[d].load_bps / inst.links[e].capacity_bps);
                    }
                }
            }
            P.add_row(std::move(r));
            count("gate_congestion");
        }
    }
    for (std::size_t d = 0; d < nd; ++d) {
        if (!inst.preassigned[d]) continue;
        P.add_row({{{out.x[d][*inst.preassigned[d]], 1.0}}, lp::Sense::ge, 1.0, "pre_" + inst.demands[d].id});
        count("preassignment");
    }
    return out;
}

std::size_t TsorSolution::chosen(std::size_t d) const {
    const auto& row = x.at(d);
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

double evaluate_objective(const TsorInstance& inst, const TsorSolution& sol) {
    double total = 0.0;
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        const int s = inst.demands[d].cls;
        for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
            if (sol.x[d][p] == 0.0) continue;
            double lat = 0.0;
            for (LinkId e : inst.paths[d][p].links) {
                const auto& l = inst.links[e];
                lat += l.base_delay + l.queue_factor * (1.0 - sol.g[e][s]);
            }
            total += sol.x[d][p] * lat;
        }
    }
    return total;
}

double Residuals::max() const {
    return std::max({assignment, capacity, gate_sum, latency, gate_congestion, preassignment, bounds});
}

Residuals verify_solution(const TsorInstance& inst, const TsorSolution& sol) {
    const std::size_t nd = inst.demands.size(), ne = inst.links.size();
    if (sol.x.size() != nd || sol.g.size() != ne) throw std::invalid_argument("solution shape does not match instance");
    Residuals r;
    r.latency_per_demand.assign(nd, 0.0);
    std::vector<double> load(ne, 0.0);
    std::vector<Gates> cls_load(ne, Gates{});
    for (std::size_t d = 0; d < nd; ++d) {
        const auto& dem = inst.demands[d];
        if (sol.x[d].size() != inst.paths[d].size()) throw std::invalid_argument("solution shape does not match instance");
        double sum = 0.0, lat = 0.0;
        for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
            const double x = sol.x[d][p];
            sum += x;
            r.bounds = std::max(r.bounds, std::min(std::abs(x), std::abs(x - 1.0)));
            for (LinkId e : inst.paths[d][p].links) {
                const auto& l = inst.links[e];
                load[e] += x * dem.load_bps;
                cls_load[e][dem.cls] += x * dem.load_bps;
                lat += x * (l.base_delay + l.queue_factor * (1.0 - sol.g[e][dem.cls]));
            }
        }
        r.assignment = std::max(r.assignment, std::abs(sum - 1.0));
        r.latency_per_demand[d] = std::max(0.0, lat - dem.latency_bound);
        r.latency = std::max(r.latency, r.latency_per_demand[d]);
        if (inst.preassigned[d]) r.preassignment = std::max(r.preassignment, 1.0 - sol.x[d][*inst.preassigned[d]]);
    }
    for (std::size_t e = 0; e < ne; ++e) {
        const double c = inst.links[e].capacity_bps;
        r.capacity = std::max(r.capacity, load[e] / c - 1.0);
        double sum = 0.0;
        for (int s = 0; s < class_count; ++s) {
            const double g = sol.g[e][s];
            sum += g;
            r.bounds = std::max({r.bounds, -g, g - 1.0});
            if (!in_classes(inst, s)) r.bounds = std::max(r.bounds, std::abs(g));
            r.gate_congestion = std::max(r.gate_congestion, cls_load[e][s] / c - g);
        }
        r.gate_sum = std::max(r.gate_sum, std::abs(sum - 1.0));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

using Fixing = std::vector<std::optional<std::size_t>>;

struct NodeLp {
    lp::Problem prob;
    std::vector<std::vector<std::size_t>> x;                       // free demands only
    std::vector<std::array<std::optional<std::size_t>, class_count>> g;
    double constant = 0.0;
    bool infeasible = false;
};

// Relaxation with fixed demands substituted (z = g on their paths). Only
// link/class pairs some demand can touch get a gate variable; the remaining
// classes of a link share one slack.
NodeLp build_node_lp(const TsorInstance& inst, const Fixing& fixed, bool with_latency, bool drop_free) {
    NodeLp n;
    const std::size_t nd = inst.demands.size(), ne = inst.links.size();
    std::vector<double> fixed_load(ne, 0.0);
    std::vector<Gates> fixed_cls(ne, Gates{}), fixed_count(ne, Gates{});
    std::vector<std::array<bool, class_count>> active(ne);
    for (auto& a : active) a.fill(false);

    for (std::size_t d = 0; d < nd; ++d) {
        const auto& dem = inst.demands[d];
        if (fixed[d]) {
            for (LinkId e : inst.paths[d][*fixed[d]].links) {
                fixed_load[e] += dem.load_bps;
                fixed_cls[e][dem.cls] += dem.load_bps;
                fixed_count[e][dem.cls] += 1.0;
                active[e][dem.cls] = true;
                n.constant += inst.links[e].base_delay + inst.links[e].queue_factor;
            }
        } else if (!drop_free) {
            for (const auto& p : inst.paths[d]) {
                for (LinkId e : p.links) active[e][dem.cls] = true;
            }
        }
    }

    auto& P = n.prob;
    n.g.resize(ne);
    std::vector<std::optional<std::size_t>> slack(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& l = inst.links[e];
        if (fixed_load[e] > l.capacity_bps * (1.0 + tol)) {
            n.infeasible = true;
            return n;
        }
        bool any = false, passive = false;
        for (int s : inst.classes) {
            if (!active[e][s]) {
                passive = true;
                continue;
            }
            any = true;
            const double lb = std::min(1.0, fixed_cls[e][s] / l.capacity_bps);
            n.g[e][s] = P.add_variable("g", lb, 1.0, -l.queue_factor * fixed_count[e][s]);
        }
        if (!any) continue;
        if (passive) slack[e] = P.add_variable("slack", 0.0, 1.0);
        lp::Row r{{}, lp::Sense::eq, 1.0, "gates"};
        for (int s : inst.classes) {
            if (n.g[e][s]) r.terms.emplace_back(*n.g[e][s], 1.0);
        }
        if (slack[e]) r.terms.emplace_back(*slack[e], 1.0);
        P.add_row(std::move(r));
    }

    n.x.resize(nd);
    std::vector<lp::Row> cap(ne), cong(ne * class_count);
    for (std::size_t d = 0; d < nd; ++d) {
        const auto& dem = inst.demands[d];
        if (fixed[d]) {
            if (!with_latency) continue;
            lp::Row r{{}, lp::Sense::le, dem.latency_bound, "lat"};
            for (LinkId e : inst.paths[d][*fixed[d]].links) {
                const auto& l = inst.links[e];
                r.rhs -= l.base_delay + l.queue_factor;
                if (l.queue_factor != 0.0) r.terms.emplace_back(*n.g[e][dem.cls], -l.queue_factor);
            }
            if (r.terms.empty()) {
                if (r.rhs < -tol) {
                    n.infeasible = true;
                    return n;
                }
                continue;
            }
            P.add_row(std::move(r));
            continue;
        }
        if (drop_free) continue;
        lp::Row assign{{}, lp::Sense::eq, 1.0, "assign"};
        lp::Row lat{{}, lp::Sense::le, dem.latency_bound, "lat"};
        for (std::size_t p = 0; p < inst.paths[d].size(); ++p) {
            double c = 0.0;
            for (LinkId e : inst.paths[d][p].links) c += inst.links[e].base_delay + inst.links[e].queue_factor;
            const auto xv = P.add_variable("x", 0.0, 1.0, c);
            n.x[d].push_back(xv);
            assign.terms.emplace_back(xv, 1.0);
            lat.terms.emplace_back(xv, c);
            for (LinkId e : inst.paths[d][p].links) {
                const auto& l = inst.links[e];
                cap[e].terms.emplace_back(xv, dem.load_bps);
                cong[e * class_count + dem.cls].terms.emplace_back(xv, -dem.load_bps / l.capacity_bps);
                if (l.queue_factor == 0.0) continue;
                const auto gv = *n.g[e][dem.cls];
                const auto z = P.add_variable("z", 0.0, 1.0, -l.queue_factor);
                lat.terms.emplace_back(z, -l.queue_factor);
                P.add_row({{{z, 1.0}, {xv, -1.0}}, lp::Sense::le, 0.0, "mc"});
                P.add_row({{{z, 1.0}, {gv, -1.0}}, lp::Sense::le, 0.0, "mc"});
                P.add_row({{{z, 1.0}, {gv, -1.0}, {xv, -1.0}}, lp::Sense::ge, -1.0, "mc"});
            }
        }
        P.add_row(std::move(assign));
        if (with_latency) P.add_row(std::move(lat));
    }
    for (std::size_t e = 0; e < ne; ++e) {
        if (cap[e].terms.empty()) continue;
        cap[e].sense = lp::Sense::le;
        cap[e].rhs = inst.links[e].capacity_bps - fixed_load[e];
        cap[e].name = "cap";
        P.add_row(std::move(cap[e]));
        for (int s = 0; s < class_count; ++s) {
            auto& r = cong[e * class_count + s];
            if (r.terms.empty()) continue;
            r.terms.emplace_back(*n.g[e][s], 1.0);
            r.sense = lp::Sense::ge;
            r.rhs = fixed_cls[e][s] / inst.links[e].capacity_bps;
            r.name = "cong";
            P.add_row(std::move(r));
        }
    }
    return n;
}

// Canonical gates for a complete assignment: LP values on used classes,
// the spare share on the lowest unused class, BE-only on idle links.
TsorSolution polish(const TsorInstance& inst, const Fixing& assign, const NodeLp& leaf, const std::vector<double>& lpx) {
    const std::size_t nd = inst.demands.size(), ne = inst.links.size();
    TsorSolution sol;
    sol.x.resize(nd);
    std::vector<Gates> lb(ne, Gates{});
    std::vector<std::set<int>> used(ne);
    for (std::size_t d = 0; d < nd; ++d) {
        sol.x[d].assign(inst.paths[d].size(), 0.0);
        sol.x[d][*assign[d]] = 1.0;
        const auto& dem = inst.demands[d];
        for (LinkId e : inst.paths[d][*assign[d]].links) {
            lb[e][dem.cls] += dem.load_bps / inst.links[e].capacity_bps;
            used[e].insert(dem.cls);
        }
    }
    sol.g.assign(ne, Gates{});
    for (std::size_t e = 0; e < ne; ++e) {
        auto& g = sol.g[e];
        const int spare = passive_class(inst, used[e]);
        if (used[e].empty()) {
            g[spare] = 1.0;
            continue;
        }
        double sum = 0.0;
        for (int s : used[e]) {
            g[s] = std::clamp(lpx[*leaf.g[e][s]], std::min(lb[e][s], 1.0), 1.0);
            sum += g[s];
        }
        double rest = 1.0 - sum;
        if (rest >= 0.0) {
            if (spare >= 0) {
                g[spare] += rest;
            } else {
                g[*used[e].rbegin()] += rest;
            }
            continue;
        }
        for (auto it = used[e].rbegin(); it != used[e].rend() && rest < 0.0; ++it) {
            const double take = std::min(-rest, g[*it] - lb[e][*it]);
            if (take <= 0.0) continue;
            g[*it] -= take;
            rest += take;
        }
    }
    sol.objective = evaluate_objective(inst, sol);
    return sol;
}

class BranchAndBound {
public:
    BranchAndBound(const TsorInstance& inst, const SolveOptions& opt, bool with_latency, bool first_feasible)
        : inst_(inst), opt_(opt), with_latency_(with_latency), first_feasible_(first_feasible) {}

    std::optional<TsorSolution> run(SolveStats& stats) {
        Fixing fixed = inst_.preassigned;
        dfs(fixed, stats);
        return best_;
    }

private:
    bool done() const { return first_feasible_ && best_.has_value(); }

    void dfs(Fixing& fixed, SolveStats& stats) {
        if (done()) return;
        if (++stats.nodes > opt_.max_nodes) throw std::runtime_error("branch and bound node limit exceeded");
        const auto node = build_node_lp(inst_, fixed, with_latency_, false);
        if (node.infeasible) return;
        const auto res = lp::solve(node.prob);
        stats.lp_iterations += res.iterations;
        if (res.status != lp::Status::optimal) return;
        const double bound = node.constant + res.objective;
        if (best_ && bound >= best_->objective - opt_.gap) return;

        std::optional<std::size_t> branch;
        Fixing rounded = fixed;
        for (std::size_t d = 0; d < inst_.demands.size() && !branch; ++d) {
            if (fixed[d]) continue;
            for (std::size_t p = 0; p < node.x[d].size(); ++p) {
                const double v = res.x[node.x[d][p]];
                if (v > 1.0 - opt_.integrality_tol) rounded[d] = p;
            }
            if (!rounded[d]) branch = d;
        }
        if (!branch) {
            // Integral relaxation: re-solve with every demand fixed for clean gates.
            const auto leaf = build_node_lp(inst_, rounded, with_latency_, false);
            if (leaf.infeasible) return;
            const auto lr = lp::solve(leaf.prob);
            stats.lp_iterations += lr.iterations;
            if (lr.status != lp::Status::optimal) return;
            auto sol = polish(inst_, rounded, leaf, lr.x);
            if (!best_ || sol.objective < best_->objective - opt_.gap) best_ = std::move(sol);
            return;
        }
        const std::size_t d = *branch;
        for (std::size_t p = 0; p < inst_.paths[d].size(); ++p) {
            fixed[d] = p;
            dfs(fixed, stats);
            fixed[d].reset();
            if (done()) return;
        }
    }

    const TsorInstance& inst_;
    SolveOptions opt_;
    bool with_latency_, first_feasible_;
    std::optional<TsorSolution> best_;
};

std::string capacity_detail(const TsorInstance& inst) {
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        const auto& dem = inst.demands[d];
        bool any_fits = false;
        for (const auto& p : inst.paths[d]) {
            bool fits = true;
            for (LinkId e : p.links) fits = fits && dem.load_bps <= inst.links[e].capacity_bps * (1.0 + tol);
            any_fits = any_fits || fits;
        }
        if (!any_fits) return "demand " + dem.id + " exceeds link capacity on every candidate path";
    }
    return "no path assignment fits within link capacities";
}

std::string latency_detail(const TsorInstance& inst) {
    for (std::size_t d = 0; d < inst.demands.size(); ++d) {
        const auto& dem = inst.demands[d];
        double best = lp::inf;
        for (const auto& p : inst.paths[d]) {
            double base = 0.0;
            for (LinkId e : p.links) base += inst.links[e].base_delay;
            best = std::min(best, base);
        }
        if (best > dem.latency_bound + tol) return "demand " + dem.id + " latency bound is below the base delay of every candidate path";
    }
    return "latency bounds cannot be met jointly";
}

} // namespace

SolveResult solve(const TsorInstance& inst, const SolveOptions& opt) {
    validate_instance(inst);
    SolveResult out;
    BranchAndBound bb(inst, opt, true, false);
    out.solution = bb.run(out.stats);
    if (out.solution) return out;

    const bool any_pre = std::any_of(inst.preassigned.begin(), inst.preassigned.end(), [](const auto& p) { return p.has_value(); });
    if (any_pre) {
        const auto node = build_node_lp(inst, inst.preassigned, true, true);
        if (node.infeasible || lp::solve(node.prob).status != lp::Status::optimal) {
            out.infeasible = InfeasibilityReport{ConstraintFamily::preassignment, "existing assignments alone are infeasible"};
            return out;
        }
    }
    BranchAndBound cap_only(inst, opt, false, true);
    SolveStats extra;
    if (!cap_only.run(extra)) {
        out.infeasible = InfeasibilityReport{ConstraintFamily::capacity, capacity_detail(inst)};
    } else {
        out.infeasible = InfeasibilityReport{ConstraintFamily::latency, latency_detail(inst)};
    }
    out.stats.nodes += extra.nodes;
    out.stats.lp_iterations += extra.lp_iterations;
    return out;
}

} // namespace sctsn::tsor
