#pragma once

// Dense two-phase simplex for  max c.x  s.t.  A x <= b,  x free.
// Bland's rule throughout, so pivoting is deterministic and cannot cycle.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cra_safety/linalg.hpp"

namespace cra {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vec x;
    double objective = 0.0;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc, std::vector<double>& obj) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
        }
        const double f = obj[pc];
        if (f != 0.0)
            for (std::size_t c = 0; c <= cols_; ++c) obj[c] -= f * at(pr, c);
        basis_[pr] = pc;
    }

    // Maximizes with reduced-cost row `obj` (obj[j] > 0 means j improves).
    // Only columns below `allowed` may enter.
    bool optimize(std::vector<double>& obj, std::size_t allowed, double tol) {
        const std::size_t max_iter = 50000 + 50 * (rows_ + cols_);
        for (std::size_t it = 0; it < max_iter; ++it) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < allowed; ++j)
                if (obj[j] > tol) {
                    enter = j;
                    break;
                }
            if (enter == cols_) return true;
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double a = at(r, enter);
                if (a <= tol) continue;
                const double ratio = rhs(r) / a;
                const bool better = leave == rows_ || ratio < best - 1e-12 ||
                                    (ratio <= best + 1e-12 && basis_[r] < basis_[leave]);
                if (better) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave == rows_) return false;
            pivot(leave, enter, obj);
        }
        throw std::runtime_error("lp_solve: iteration limit reached");
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Maximizes objective.x subject to a x <= b with x unrestricted in sign.
inline LpResult lp_solve(const Matrix& a, const Vec& b, const Vec& objective, double tol = 1e-9) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m || objective.size() != n) throw std::invalid_argument("lp_solve: dimension mismatch");

    std::size_t n_art = 0;
    for (double bi : b)
        if (bi < 0.0) ++n_art;
    // Columns: p (n), q (n), slacks (m), artificials (n_art).
    const std::size_t n_struct = 2 * n + m;
    detail::Tableau tab(m, n_struct + n_art);
    std::size_t art = n_struct;
    std::vector<double> phase1(n_struct + n_art + 1, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const double sgn = b[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            tab.at(r, j) = sgn * a(r, j);
            tab.at(r, n + j) = -sgn * a(r, j);
        }
        tab.at(r, 2 * n + r) = sgn;
        tab.rhs(r) = sgn * b[r];
        if (b[r] < 0.0) {
            tab.at(r, art) = 1.0;
            tab.basis()[r] = art++;
            // Phase-1 objective: maximize -sum(artificials), expressed in reduced costs.
            for (std::size_t c = 0; c < n_struct; ++c) phase1[c] += tab.at(r, c);
            phase1.back() += tab.rhs(r);
        } else {
            tab.basis()[r] = 2 * n + r;
        }
    }

    LpResult res;
    if (n_art > 0) {
        tab.optimize(phase1, n_struct, tol);
        const double scale = 1.0 + norm_inf(b);
        if (phase1.back() > tol * scale * 10.0) {
            res.status = LpStatus::Infeasible;
            return res;
        }
        // Drive artificials out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basis()[r] < n_struct) continue;
            for (std::size_t c = 0; c < n_struct; ++c)
                if (std::abs(tab.at(r, c)) > tol) {
                    tab.pivot(r, c, phase1);
                    break;
                }
        }
    }

    std::vector<double> obj(n_struct + n_art + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        obj[j] = objective[j];
        obj[n + j] = -objective[j];
    }
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t bv = tab.basis()[r];
        const double cb = bv < n_struct ? obj[bv] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= n_struct + n_art; ++c) obj[c] -= cb * tab.at(r, c);
    }
    if (!tab.optimize(obj, n_struct, tol)) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    Vec val(n_struct + n_art, 0.0);
    for (std::size_t r = 0; r < m; ++r) val[tab.basis()[r]] = tab.rhs(r);
    res.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) res.x[j] = val[j] - val[n + j];
    res.objective = dot(objective, res.x);
    res.status = LpStatus::Optimal;
    return res;
}

}  // namespace cra
