// Exhaustive reference solver with exact rational arithmetic.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <set>

#include "sctsn/tsor.hpp"

namespace sctsn::tsor {

namespace {

using Q = boost::multiprecision::cpp_rational;

struct ExactLp {
    std::vector<std::vector<Q>> a; // equality rows, b >= 0
    std::vector<Q> b;
    std::vector<Q> c;
};

// Two-phase tableau simplex with Bland's rule; variables are nonnegative.
std::optional<std::pair<Q, std::vector<Q>>> exact_minimize(const ExactLp& lp) {
    const std::size_t m = lp.b.size(), n = lp.c.size(), cols = n + m;
    std::vector<std::vector<Q>> t(m, std::vector<Q>(cols + 1));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = lp.a[i][j];
        t[i][n + i] = 1;
        t[i][cols] = lp.b[i];
        basis[i] = n + i;
    }
    auto pivot = [&](std::size_t r, std::size_t q) {
        const Q inv = Q(1) / t[r][q];
        for (auto& v : t[r]) v *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || t[i][q] == 0) continue;
            const Q f = t[i][q];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
        }
        basis[r] = q;
    };
    // Returns false when unbounded.
    auto optimize = [&](const std::vector<Q>& cost, std::size_t allowed) {
        for (;;) {
            std::size_t enter = allowed;
            for (std::size_t j = 0; j < allowed && enter == allowed; ++j) {
                if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
                Q d = cost[j];
                for (std::size_t i = 0; i < m; ++i) d -= cost[basis[i]] * t[i][j];
                if (d < 0) enter = j;
            }
            if (enter == allowed) return true;
            std::optional<std::size_t> leave;
            Q best;
            for (std::size_t i = 0; i < m; ++i) {
                if (t[i][enter] <= 0) continue;
                const Q ratio = t[i][cols] / t[i][enter];
                if (!leave || ratio < best || (ratio == best && basis[i] < basis[*leave])) leave = i, best = ratio;
            }
            if (!leave) return false;
            pivot(*leave, enter);
        }
    };

    std::vector<Q> phase1(cols, Q(0));
    for (std::size_t j = n; j < cols; ++j) phase1[j] = 1;
    optimize(phase1, cols);
    Q infeas = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] >= n) infeas += t[i][cols];
    }
    if (infeas > 0) return std::nullopt;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (t[i][j] != 0) {
                pivot(i, j);
                break;
            }
        }
    }
    std::vector<Q> cost(cols, Q(0));
    std::copy(lp.c.begin(), lp.c.end(), cost.begin());
    if (!optimize(cost, n)) return std::nullopt;
    std::vector<Q> v(n, Q(0));
    Q obj = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) v[basis[i]] = t[i][cols];
    }
    for (std::size_t j = 0; j < n; ++j) obj += lp.c[j] * v[j];
    return std::make_pair(obj, v);
}

enum class Outcome { ok, capacity, latency };

struct Evaluation {
    Outcome outcome = Outcome::ok;
    Q objective;
    std::vector<Gates> g;
};

// Exact optimum over the gates for a (possibly partial) path assignment.
Evaluation evaluate(const TsorInstance& inst, const std::vector<std::optional<std::size_t>>& choice) {
    const std::size_t ne = inst.links.size(), nd = inst.demands.size();
    Evaluation ev;
    std::vector<Q> load(ne, Q(0));
    std::vector<std::array<Q, class_count>> lb(ne);
    std::vector<std::array<int, class_count>> count(ne);
    for (auto& c : count) c.fill(0);
    std::vector<std::set<int>> used(ne);
    Q constant = 0;
    for (std::size_t d = 0; d < nd; ++d) {
        if (!choice[d]) continue;
        const auto& dem = inst.demands[d];
        for (LinkId e : inst.paths[d][*choice[d]].links) {
            const auto& l = inst.links[e];
            load[e] += Q(dem.load_bps);
            lb[e][dem.cls] += Q(dem.load_bps) / Q(l.capacity_bps);
            ++count[e][dem.cls];
            used[e].insert(dem.cls);
            constant += Q(l.base_delay) + Q(l.queue_factor);
        }
    }
    for (std::size_t e = 0; e < ne; ++e) {
        if (load[e] > Q(inst.links[e].capacity_bps)) {
            ev.outcome = Outcome::capacity;
            return ev;
        }
    }

    // Columns: y (gate above its lower bound) per used pair, link slack,
    // upper-bound slack per y, latency surplus per demand.
    struct Col {
        std::size_t e;
        int s;
    };
    std::vector<Col> ys;
    std::vector<std::array<std::optional<std::size_t>, class_count>> yidx(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        for (int s : used[e]) {
            yidx[e][s] = ys.size();
            ys.push_back({e, s});
        }
    }
    std::vector<std::optional<std::size_t>> sigma(ne);
    std::size_t ncols = ys.size();
    std::set<int> classes(inst.classes.begin(), inst.classes.end());
    for (std::size_t e = 0; e < ne; ++e) {
        if (used[e].empty()) continue;
        if (used[e].size() < classes.size()) sigma[e] = ncols++;
    }
    const std::size_t ub_base = ncols;
    ncols += ys.size();
    std::vector<std::pair<std::vector<std::pair<std::size_t, Q>>, Q>> rows;
    for (std::size_t e = 0; e < ne; ++e) {
        if (used[e].empty()) continue;
        std::vector<std::pair<std::size_t, Q>> r;
        Q rhs = 1;
        for (int s : used[e]) {
            r.emplace_back(*yidx[e][s], Q(1));
            rhs -= lb[e][s];
        }
        if (sigma[e]) r.emplace_back(*sigma[e], Q(1));
        rows.emplace_back(std::move(r), rhs);
    }
    for (std::size_t k = 0; k < ys.size(); ++k) {
        rows.push_back({{{k, Q(1)}, {ub_base + k, Q(1)}}, Q(1) - lb[ys[k].e][ys[k].s]});
    }
    for (std::size_t d = 0; d < nd; ++d) {
        if (!choice[d]) continue;
        const auto& dem = inst.demands[d];
        Q rhs = -Q(dem.latency_bound);
        std::vector<std::pair<std::size_t, Q>> r;
        for (LinkId e : inst.paths[d][*choice[d]].links) {
            const auto& l = inst.links[e];
            rhs += Q(l.base_delay) + Q(l.queue_factor) - Q(l.queue_factor) * lb[e][dem.cls];
            if (l.queue_factor != 0) r.emplace_back(*yidx[e][dem.cls], Q(l.queue_factor));
        }
        if (rhs <= 0) continue; // always satisfied
        r.emplace_back(ncols++, Q(-1));
        rows.emplace_back(std::move(r), rhs);
    }

    ExactLp lp;
    lp.c.assign(ncols, Q(0));
    Q fixed_gain = 0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        const auto& l = inst.links[ys[k].e];
        const Q w = Q(l.queue_factor) * count[ys[k].e][ys[k].s];
        lp.c[k] = -w;
        fixed_gain += w * lb[ys[k].e][ys[k].s];
    }
    for (auto& [terms, rhs] : rows) {
        std::vector<Q> dense(ncols, Q(0));
        for (auto& [j, v] : terms) dense[j] += v;
        lp.a.push_back(std::move(dense));
        lp.b.push_back(rhs);
    }
    const auto res = exact_minimize(lp);
    if (!res) {
        ev.outcome = Outcome::latency;
        return ev;
    }
    ev.objective = constant - fixed_gain + res->first;

    ev.g.assign(ne, Gates{});
    for (std::size_t e = 0; e < ne; ++e) {
        std::set<int> passive;
        for (int s : classes) {
            if (!used[e].contains(s)) passive.insert(s);
        }
        if (used[e].empty()) {
            ev.g[e][*passive.begin()] = 1.0;
            continue;
        }
        for (int s : used[e]) ev.g[e][s] = static_cast<double>(lb[e][s] + res->second[*yidx[e][s]]);
        if (sigma[e]) ev.g[e][*passive.begin()] = static_cast<double>(res->second[*sigma[e]]);
    }
    return ev;
}

} // namespace

SolveResult brute_force_solve(const TsorInstance& inst) {
    validate_instance(inst);
    const std::size_t nd = inst.demands.size();
    if (nd > 6) throw std::invalid_argument("brute force refuses more than 6 demands");
    std::size_t combos = 1;
    for (const auto& p : inst.paths) {
        combos *= p.size();
        if (combos > 4096) throw std::invalid_argument("brute force refuses more than 4096 assignments");
    }

    SolveResult out;
    if (std::any_of(inst.preassigned.begin(), inst.preassigned.end(), [](const auto& p) { return p.has_value(); })) {
        if (evaluate(inst, inst.preassigned).outcome != Outcome::ok) {
            out.infeasible = InfeasibilityReport{ConstraintFamily::preassignment, "existing assignments alone are infeasible"};
            return out;
        }
    }

    std::vector<std::size_t> radix(nd);
    std::vector<std::optional<std::size_t>> choice(nd);
    bool any_capacity_ok = false;
    std::optional<Evaluation> best;
    std::vector<std::size_t> best_choice;
    for (;;) {
        bool allowed = true;
        for (std::size_t d = 0; d < nd; ++d) {
            choice[d] = radix[d];
            if (inst.preassigned[d] && *inst.preassigned[d] != radix[d]) allowed = false;
        }
        if (allowed) {
            ++out.stats.nodes;
            auto ev = evaluate(inst, choice);
            if (ev.outcome != Outcome::capacity) any_capacity_ok = true;
            if (ev.outcome == Outcome::ok && (!best || ev.objective < best->objective)) {
                best = std::move(ev);
                best_choice = radix;
            }
        }
        std::size_t d = nd;
        for (; d > 0; --d) {
            if (++radix[d - 1] < inst.paths[d - 1].size()) break;
            radix[d - 1] = 0;
        }
        if (d == 0) break;
    }

    if (!best) {
        out.infeasible = any_capacity_ok ? InfeasibilityReport{ConstraintFamily::latency, "no assignment meets every latency bound"}
                                         : InfeasibilityReport{ConstraintFamily::capacity, "no assignment fits within link capacities"};
        return out;
    }
    TsorSolution sol;
    sol.x.resize(nd);
    for (std::size_t d = 0; d < nd; ++d) {
        sol.x[d].assign(inst.paths[d].size(), 0.0);
        sol.x[d][best_choice[d]] = 1.0;
    }
    sol.g = std::move(best->g);
    sol.objective = static_cast<double>(best->objective);
    out.solution = std::move(sol);
    return out;
}

} // namespace sctsn::tsor
