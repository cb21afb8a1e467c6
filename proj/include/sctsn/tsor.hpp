#pragma once

// Time-sensitive optimal routing: assign each time-triggered demand to one
// candidate path and choose per-link, per-class gate-opening frequencies so
// that the summed path latency is minimal.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sctsn/lp.hpp"
#include "sctsn/model.hpp"

namespace sctsn::tsor {

inline constexpr int class_count = 8;
inline constexpr int best_effort_class = 0;
inline constexpr int tt_class = 7;

using Gates = std::array<double, class_count>;

struct LinkData {
    std::string id;
    std::optional<NodeId> src, dst; // known for topology-derived instances
    double capacity_bps = 100e6;
    double base_delay = 1.0;
    double queue_factor = 0.5;
};

struct TsorInstance {
    std::vector<LinkData> links;
    std::vector<Demand> demands;
    std::vector<std::vector<Path>> paths;             // candidates per demand, in rank order
    std::vector<std::optional<std::size_t>> preassigned; // a_dp as a path index
    std::vector<int> classes;                          // service classes S

    std::size_t assignment_variable_count() const;
};

/// Throws ValidationError on shape or invariant violations.
void validate_instance(const TsorInstance& inst);

enum class ConstraintFamily { assignment, capacity, gate_sum, latency, gate_congestion, preassignment };

const char* to_string(ConstraintFamily f);

struct InfeasibilityReport {
    ConstraintFamily family = ConstraintFamily::capacity;
    std::string detail;
};

class Infeasible : public std::runtime_error {
public:
    explicit Infeasible(InfeasibilityReport r)
        : std::runtime_error(std::string(to_string(r.family)) + ": " + r.detail), report_(std::move(r)) {}
    const InfeasibilityReport& report() const noexcept { return report_; }

private:
    InfeasibilityReport report_;
};

/// Candidate paths from k_shortest_paths; an existing assignment outside
/// the top k is appended as an extra candidate. Demands without a latency
/// bound (<= 0) get 2 x (hops of the shortest candidate) x (l^o + l^q).
/// Throws Infeasible (assignment family) for a demand with no path.
TsorInstance build_instance(const Topology& topo, std::vector<Demand> demands,
                            const std::map<std::string, Path>& existing, std::size_t k);

/// Standard-form program with McCormick auxiliaries z = x * g.
struct LinearizedProgram {
    lp::Problem problem;
    std::vector<std::size_t> binaries;
    std::vector<std::vector<std::size_t>> x;          // [d][p]
    std::vector<std::array<std::optional<std::size_t>, class_count>> g; // [e][s]
    std::size_t aux_count = 0;
    std::map<std::string, std::size_t> rows_per_family;
};

LinearizedProgram linearize(const TsorInstance& inst);

struct TsorSolution {
    std::vector<std::vector<double>> x; // [d][p]
    std::vector<Gates> g;               // [e][class]
    double objective = 0.0;

    std::size_t chosen(std::size_t d) const;
};

struct SolveStats {
    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
};

struct SolveResult {
    std::optional<TsorSolution> solution;
    std::optional<InfeasibilityReport> infeasible;
    SolveStats stats;

    bool feasible() const noexcept { return solution.has_value(); }
};

struct SolveOptions {
    double gap = 1e-6;
    double integrality_tol = 1e-9;
    std::size_t max_nodes = 100000;
};

/// Branch and bound over path choices with LP relaxation bounds.
SolveResult solve(const TsorInstance& inst, const SolveOptions& opt = {});

/// Exhaustive reference: every path assignment, exact rational LP over the
/// gates. Refuses instances with more than 6 demands or 4096 assignments.
SolveResult brute_force_solve(const TsorInstance& inst);

/// Summed path latency for a given (x, g).
double evaluate_objective(const TsorInstance& inst, const TsorSolution& sol);

struct Residuals {
    double assignment = 0;
    double capacity = 0; // relative to link capacity
    double gate_sum = 0;
    double latency = 0;
    double gate_congestion = 0;
    double preassignment = 0;
    double bounds = 0; // x outside {0,1}, g outside [0,1] or on a class outside S
    std::vector<double> latency_per_demand;

    double max() const;
};

Residuals verify_solution(const TsorInstance& inst, const TsorSolution& sol);

} // namespace sctsn::tsor
