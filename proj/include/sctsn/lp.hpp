#pragma once

// Dense bounded-variable primal simplex (two phases). Sized for the
// branch-and-bound node relaxations of the flow-placement program.

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sctsn::lp {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };

struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    Sense sense = Sense::le;
    double rhs = 0.0;
    std::string name;
};

/// minimize cost . x  subject to rows and lower <= x <= upper.
/// Every variable needs a finite lower or upper bound.
struct Problem {
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> names;
    std::vector<Row> rows;

    std::size_t add_variable(std::string name, double lb, double ub, double c = 0.0);
    void add_row(Row row) { rows.push_back(std::move(row)); }
    std::size_t variable_count() const noexcept { return cost.size(); }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(Status s);

struct Options {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-10;
    std::size_t max_iterations = 200000;
    std::size_t degenerate_before_bland = 50;
};

struct Result {
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

Result solve(const Problem& problem, const Options& opt = {});

/// Largest bound or row violation of `x`.
double max_violation(const Problem& problem, const std::vector<double>& x);

} // namespace sctsn::lp
