#include "sctsn/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sctsn::lp {

std::size_t Problem::add_variable(std::string name, double lb, double ub, double c) {
    if (lb > ub) throw std::invalid_argument("variable " + name + " has lower bound above upper bound");
    if (!std::isfinite(lb) && !std::isfinite(ub)) throw std::invalid_argument("variable " + name + " is free");
    names.push_back(std::move(name));
    lower.push_back(lb);
    upper.push_back(ub);
    cost.push_back(c);
    return cost.size() - 1;
}

const char* to_string(Status s) {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    }
    return "?";
}

double max_violation(const Problem& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < p.variable_count(); ++j) {
        worst = std::max({worst, p.lower[j] - x[j], x[j] - p.upper[j]});
    }
    for (const auto& r : p.rows) {
        double lhs = 0.0;
        for (auto [j, a] : r.terms) lhs += a * x[j];
        if (r.sense != Sense::ge) worst = std::max(worst, lhs - r.rhs);
        if (r.sense != Sense::le) worst = std::max(worst, r.rhs - lhs);
    }
    return worst;
}

namespace {

// Tableau over columns [structural | slack | artificial]. Row i reads
// sum_j A_ij x_j + s_i = b_i with slack bounds encoding the row sense.
class Tableau {
public:
    Tableau(const Problem& p, const Options& opt) : opt_(opt), m_(p.rows.size()), n_(p.variable_count()) {
        lo_ = p.lower;
        hi_ = p.upper;
        for (const auto& r : p.rows) {
            switch (r.sense) {
            case Sense::le: lo_.push_back(0.0), hi_.push_back(inf); break;
            case Sense::ge: lo_.push_back(-inf), hi_.push_back(0.0); break;
            case Sense::eq: lo_.push_back(0.0), hi_.push_back(0.0); break;
            }
        }
        value_.resize(n_ + m_);
        for (std::size_t j = 0; j < n_ + m_; ++j) value_[j] = std::isfinite(lo_[j]) ? lo_[j] : hi_[j];

        std::vector<double> dense(m_ * (n_ + m_), 0.0);
        std::vector<double> residual(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            double lhs = 0.0;
            for (auto [j, a] : p.rows[i].terms) {
                dense[i * (n_ + m_) + j] += a;
                lhs += a * value_[j];
            }
            dense[i * (n_ + m_) + n_ + i] = 1.0;
            residual[i] = p.rows[i].rhs - lhs;
        }

        // Slack basic where its value stays within bounds, artificial otherwise.
        std::vector<std::size_t> art_rows;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t s = n_ + i;
            const double v = value_[s] + residual[i];
            if (v >= lo_[s] - opt_.feasibility_tol && v <= hi_[s] + opt_.feasibility_tol) continue;
            art_rows.push_back(i);
        }
        cols_ = n_ + m_ + art_rows.size();
        t_.assign(m_ * cols_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            std::copy_n(dense.begin() + static_cast<std::ptrdiff_t>(i * (n_ + m_)), n_ + m_,
                        t_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
        }
        basis_.resize(m_);
        is_basic_.assign(cols_, 0);
        lo_.resize(cols_, 0.0);
        hi_.resize(cols_, inf);
        value_.resize(cols_, 0.0);
        std::vector<char> has_art(m_, 0);
        for (std::size_t k = 0; k < art_rows.size(); ++k) {
            const std::size_t i = art_rows[k], a = n_ + m_ + k;
            has_art[i] = 1;
            const double sign = residual[i] >= 0.0 ? 1.0 : -1.0;
            // Scale the row so the artificial column is +1.
            for (std::size_t j = 0; j < cols_; ++j) at(i, j) *= sign;
            at(i, a) = 1.0;
            basis_[i] = a;
            value_[a] = std::abs(residual[i]);
        }
        for (std::size_t i = 0; i < m_; ++i) {
            if (has_art[i]) continue;
            basis_[i] = n_ + i;
            value_[n_ + i] += residual[i];
        }
        for (auto b : basis_) is_basic_[b] = 1;
        artificials_ = art_rows.size();
    }

    Status run_phase1(std::size_t& iters) {
        if (artificials_ == 0) return Status::optimal;
        std::vector<double> c(cols_, 0.0);
        for (std::size_t a = n_ + m_; a < cols_; ++a) c[a] = 1.0;
        const Status st = optimize(c, iters);
        if (st == Status::iteration_limit) return st;
        double infeas = 0.0;
        for (std::size_t a = n_ + m_; a < cols_; ++a) infeas += value_[a];
        if (infeas > opt_.feasibility_tol * static_cast<double>(std::max<std::size_t>(1, m_)) * 10) return Status::infeasible;
        for (std::size_t a = n_ + m_; a < cols_; ++a) hi_[a] = 0.0;
        return Status::optimal;
    }

    Status run_phase2(const std::vector<double>& cost, std::size_t& iters) {
        std::vector<double> c(cols_, 0.0);
        std::copy(cost.begin(), cost.end(), c.begin());
        return optimize(c, iters);
    }

    std::vector<double> solution() const { return {value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_)}; }

private:
    double& at(std::size_t i, std::size_t j) { return t_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * cols_ + j]; }

    Status optimize(const std::vector<double>& c, std::size_t& iters) {
        std::vector<double> d(c);
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * at(i, j);
        }
        std::size_t degenerate = 0;
        for (;;) {
            if (iters >= opt_.max_iterations) return Status::iteration_limit;
            const bool bland = degenerate >= opt_.degenerate_before_bland;

            std::size_t enter = cols_;
            double best = 0.0, dir = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (is_basic_[j] || hi_[j] - lo_[j] <= 0.0) continue;
                const bool at_lo = std::isfinite(lo_[j]) && value_[j] <= lo_[j];
                const bool at_hi = std::isfinite(hi_[j]) && value_[j] >= hi_[j];
                double score = 0.0, dj = 0.0;
                if (d[j] < -opt_.optimality_tol && !at_hi) score = -d[j], dj = 1.0;
                else if (d[j] > opt_.optimality_tol && !at_lo) score = d[j], dj = -1.0;
                else continue;
                if (bland) {
                    enter = j, dir = dj;
                    break;
                }
                if (score > best) best = score, enter = j, dir = dj;
            }
            if (enter == cols_) return Status::optimal;

            // Ratio test: entering moves by dir * step.
            double step = hi_[enter] - lo_[enter];
            std::size_t leave = m_;
            double leave_pivot = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = dir * at(i, enter);
                if (std::abs(a) <= opt_.pivot_tol) continue;
                const std::size_t b = basis_[i];
                double limit;
                if (a > 0.0) {
                    if (!std::isfinite(lo_[b])) continue;
                    limit = (value_[b] - lo_[b]) / a;
                } else {
                    if (!std::isfinite(hi_[b])) continue;
                    limit = (hi_[b] - value_[b]) / -a;
                }
                limit = std::max(limit, 0.0);
                const bool tie = std::abs(limit - step) <= 1e-12;
                bool take = limit < step && !tie;
                if (tie && leave != m_) {
                    take = bland ? b < basis_[leave] : std::abs(a) > std::abs(leave_pivot);
                }
                if (take) step = limit, leave = i, leave_pivot = a;
            }
            if (!std::isfinite(step)) return Status::unbounded;
            ++iters;
            degenerate = step <= opt_.feasibility_tol ? degenerate + 1 : 0;

            value_[enter] += dir * step;
            for (std::size_t i = 0; i < m_; ++i) value_[basis_[i]] -= dir * step * at(i, enter);
            if (leave == m_) continue; // bound flip

            const std::size_t out = basis_[leave];
            value_[out] = dir * at(leave, enter) > 0.0 ? lo_[out] : hi_[out];
            pivot(leave, enter, d);
            is_basic_[out] = 0;
            is_basic_[enter] = 1;
            basis_[leave] = enter;
        }
    }

    void pivot(std::size_t r, std::size_t q, std::vector<double>& d) {
        const double inv = 1.0 / at(r, q);
        double* row = &t_[r * cols_];
        for (std::size_t j = 0; j < cols_; ++j) row[j] *= inv;
        row[q] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* other = &t_[i * cols_];
            const double f = other[q];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) other[j] -= f * row[j];
            other[q] = 0.0;
        }
        const double f = d[q];
        if (f != 0.0) {
            for (std::size_t j = 0; j < cols_; ++j) d[j] -= f * row[j];
            d[q] = 0.0;
        }
    }

    Options opt_;
    std::size_t m_, n_, cols_ = 0, artificials_ = 0;
    std::vector<double> t_, lo_, hi_, value_;
    std::vector<std::size_t> basis_;
    std::vector<char> is_basic_;
};

} // namespace

Result solve(const Problem& problem, const Options& opt) {
    for (const auto& r : problem.rows) {
        for (auto [j, a] : r.terms) {
            if (j >= problem.variable_count()) throw std::out_of_range("row " + r.name + " references unknown variable");
        }
    }
    Result res;
    Tableau tab(problem, opt);
    Status st = tab.run_phase1(res.iterations);
    if (st == Status::optimal) st = tab.run_phase2(problem.cost, res.iterations);
    res.status = st;
    if (st != Status::optimal) return res;
    res.x = tab.solution();
    for (std::size_t j = 0; j < res.x.size(); ++j) {
        res.x[j] = std::clamp(res.x[j], problem.lower[j], problem.upper[j]);
        res.objective += problem.cost[j] * res.x[j];
    }
    return res;
}

} // namespace sctsn::lp
