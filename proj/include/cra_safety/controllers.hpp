#pragma once

// Input generators for the hybrid run: linear state feedback, the CBF
// quadratic-program safety filter, simplex switching, and adversaries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cra_safety/cost.hpp"
#include "cra_safety/linalg.hpp"
#include "cra_safety/plant.hpp"
#include "cra_safety/poly.hpp"

namespace cra {

struct LinearPolicy {
    Matrix gain;  // m x n
    bool saturate_to_u = true;
    bool operator==(const LinearPolicy&) const = default;
};

inline Vec linear_input(const LinearPolicy& p, std::span<const double> x, const Box& input_box) {
    Vec u = p.gain * x;
    return p.saturate_to_u ? saturate(u, input_box) : u;
}

enum class BarrierMode { Zeroing, FiniteTime };

struct CbfQpParams {
    Matrix q = Matrix::identity(1);
    double gamma = 1.0;  // zeroing: alpha(s) = gamma * s
    double rho = 0.0;    // finite-time exponent in [0, 1)
    BarrierMode mode = BarrierMode::Zeroing;

    bool operator==(const CbfQpParams&) const = default;

    void validate(std::size_t m) const {
        if (q.rows() != m || q.cols() != m) throw std::invalid_argument("cbf_qp: Q must be m x m");
        if (!is_symmetric_positive_definite(q))
            throw std::invalid_argument("cbf_qp: Q must be symmetric positive definite");
        if (!(gamma > 0.0)) throw std::invalid_argument("cbf_qp: gamma must be positive");
        if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("cbf_qp: rho must lie in [0, 1)");
    }
};

struct QpResult {
    Vec u;
    bool feasible = true;
    double objective = 0.0;
};

namespace detail {

inline double quad_form(const Matrix& q, std::span<const double> u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j) s += u[i] * q(i, j) * u[j];
    return s;
}

}  // namespace detail

/// min u'Qu  s.t.  a.u >= beta,  u in box.
/// Enumerates every activity pattern (each coordinate free/at-lo/at-hi, affine
/// constraint active or not), solves the reduced KKT system of each, and keeps
/// the cheapest feasible candidate. Exact for the small m used here.
inline QpResult solve_box_qp_one_constraint(const Matrix& q, std::span<const double> a, double beta,
                                            const Box& box, double feas_tol = 1e-10) {
    const std::size_t m = a.size();
    if (box.dim() != m || q.rows() != m) throw std::invalid_argument("qp: dimension mismatch");
    std::size_t patterns = 1;
    for (std::size_t i = 0; i < m; ++i) patterns *= 3;

    QpResult best;
    best.feasible = false;
    best.objective = std::numeric_limits<double>::infinity();
    const double scale = 1.0 + std::abs(beta) + norm_inf(a) * norm_inf(box.hi()) + norm_inf(a) * norm_inf(box.lo());

    for (std::size_t pat = 0; pat < patterns; ++pat) {
        std::vector<int> act(m);  // 0 free, 1 lo, 2 hi
        std::size_t code = pat;
        for (std::size_t i = 0; i < m; ++i) {
            act[i] = static_cast<int>(code % 3);
            code /= 3;
        }
        std::vector<std::size_t> free_idx;
        Vec u(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (act[i] == 0) free_idx.push_back(i);
            else u[i] = act[i] == 1 ? box.lo(i) : box.hi(i);
        }
        const std::size_t nf = free_idx.size();
        for (int with_constraint = 0; with_constraint < 2; ++with_constraint) {
            const std::size_t dim = nf + static_cast<std::size_t>(with_constraint);
            Vec cand = u;
            if (dim > 0) {
                Matrix kkt(dim, dim);
                Vec rhs(dim, 0.0);
                for (std::size_t r = 0; r < nf; ++r) {
                    const std::size_t i = free_idx[r];
                    for (std::size_t s = 0; s < nf; ++s) kkt(r, s) = 2.0 * q(i, free_idx[s]);
                    double fixed = 0.0;
                    for (std::size_t j = 0; j < m; ++j)
                        if (act[j] != 0) fixed += q(i, j) * u[j];
                    rhs[r] = -2.0 * fixed;
                    if (with_constraint) kkt(r, nf) = -a[i];
                }
                if (with_constraint) {
                    double fixed = 0.0;
                    for (std::size_t j = 0; j < m; ++j)
                        if (act[j] != 0) fixed += a[j] * u[j];
                    for (std::size_t s = 0; s < nf; ++s) kkt(nf, s) = a[free_idx[s]];
                    rhs[nf] = beta - fixed;
                }
                const auto sol = solve_linear(kkt, rhs);
                if (!sol) continue;
                for (std::size_t r = 0; r < nf; ++r) cand[free_idx[r]] = (*sol)[r];
                if (with_constraint && (*sol)[nf] < -feas_tol) continue;  // multiplier sign
            } else if (with_constraint) {
                continue;
            }
            if (!box.contains(cand, feas_tol * (1.0 + norm_inf(box.hi()) + norm_inf(box.lo())))) continue;
            if (dot(a, cand) < beta - feas_tol * scale) continue;
            cand = saturate(cand, box);
            const double obj = detail::quad_form(q, cand);
            if (obj < best.objective - 1e-15) {
                best.u = cand;
                best.objective = obj;
                best.feasible = true;
            }
        }
    }
    if (!best.feasible) {
        // Unconstrained-in-box minimizer of the single constraint, then clamped.
        const auto qinv_a = solve_linear(q, Vec(a.begin(), a.end()));
        double denom = qinv_a ? dot(a, *qinv_a) : 0.0;
        Vec u(m, 0.0);
        if (qinv_a && denom > 0.0)
            for (std::size_t i = 0; i < m; ++i) u[i] = beta * (*qinv_a)[i] / denom;
        best.u = saturate(u, box);
        best.objective = detail::quad_form(q, best.u);
    }
    return best;
}

/// CBF-QP safety filter: min u'Qu s.t. db/dx (f + g u) + relax(b) >= 0, u in U.
inline QpResult cbf_qp_input(const CbfQpParams& params, const ControlAffineSystem& sys,
                             const MultiPoly& barrier, std::span<const double> x) {
    params.validate(sys.m);
    const Vec grad = [&] {
        Vec gv(sys.n);
        for (std::size_t i = 0; i < sys.n; ++i) gv[i] = barrier.partial(i).eval(x);
        return gv;
    }();
    const Vec fx = sys.drift(x);
    const Matrix gx = sys.input_matrix(x);
    Vec a(sys.m, 0.0);
    for (std::size_t k = 0; k < sys.m; ++k)
        for (std::size_t i = 0; i < sys.n; ++i) a[k] += grad[i] * gx(i, k);
    const double b = barrier.eval(x);
    double relax = 0.0;
    if (params.mode == BarrierMode::Zeroing) {
        relax = params.gamma * b;
    } else {
        const double sgn = b > 0.0 ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
        relax = params.gamma * sgn * std::pow(std::abs(b), params.rho);
    }
    const double beta = -dot(grad, fx) - relax;
    return solve_box_qp_one_constraint(params.q, a, beta, sys.input_box);
}

enum class ActiveController { Main, Safety };

struct SwitchResult {
    Vec input;
    ActiveController active = ActiveController::Main;
};

/// Simplex switching: the safety controller owns the plant exactly while h(x) < 0.
inline SwitchResult simplex_switch(std::span<const double> x, const SafetySpec& spec, const Vec& main_input,
                                   const std::function<Vec(std::span<const double>)>& safety_policy) {
    if (spec.h.eval(x) < 0.0) return {safety_policy(x), ActiveController::Safety};
    return {main_input, ActiveController::Main};
}

struct BangBangWorst {
    bool operator==(const BangBangWorst&) const = default;
};
struct ScriptedInput {
    std::vector<Vec> sequence;
    bool operator==(const ScriptedInput&) const = default;
};
struct RandomUniformInput {
    std::uint64_t seed = 1;
    bool operator==(const RandomUniformInput&) const = default;
};

using AdversaryMode = std::variant<BangBangWorst, ScriptedInput, RandomUniformInput>;

/// Input applied while the controller is corrupted. Owned by a single run.
class Adversary {
public:
    explicit Adversary(AdversaryMode mode = BangBangWorst{}) : mode_(std::move(mode)) {
        if (const auto* r = std::get_if<RandomUniformInput>(&mode_)) rng_.seed(r->seed);
    }

    const AdversaryMode& mode() const { return mode_; }
    bool script_exhausted() const { return exhausted_; }

    Vec input(const ControlAffineSystem& sys, const SafetySpec& spec, std::span<const double> x) {
        if (std::holds_alternative<BangBangWorst>(mode_)) return worst_vertex(sys, spec, x);
        if (auto* s = std::get_if<ScriptedInput>(&mode_)) {
            if (s->sequence.empty()) throw std::invalid_argument("adversary: empty script");
            if (cursor_ >= s->sequence.size()) {
                exhausted_ = true;
                return s->sequence.back();
            }
            return s->sequence[cursor_++];
        }
        return sample_uniform(sys.input_box, rng_);
    }

    /// argmin over vertices of U of grad h(x) . g(x) u; first vertex wins ties.
    static Vec worst_vertex(const ControlAffineSystem& sys, const SafetySpec& spec, std::span<const double> x) {
        Vec grad(sys.n);
        for (std::size_t i = 0; i < sys.n; ++i) grad[i] = spec.h.partial(i).eval(x);
        const Matrix gx = sys.input_matrix(x);
        Vec a(sys.m, 0.0);
        for (std::size_t k = 0; k < sys.m; ++k)
            for (std::size_t i = 0; i < sys.n; ++i) a[k] += grad[i] * gx(i, k);
        Vec best;
        double best_v = std::numeric_limits<double>::infinity();
        for (auto& v : sys.input_box.vertices()) {
            const double val = dot(a, v);
            if (val < best_v) {
                best_v = val;
                best = std::move(v);
            }
        }
        return best;
    }

    static Vec sample_uniform(const Box& box, std::mt19937_64& rng) {
        Vec u(box.dim());
        for (std::size_t i = 0; i < box.dim(); ++i) {
            std::uniform_real_distribution<double> dist(box.lo(i), box.hi(i));
            u[i] = dist(rng);
        }
        return u;
    }

private:
    AdversaryMode mode_;
    std::size_t cursor_ = 0;
    bool exhausted_ = false;
    std::mt19937_64 rng_{1};
};

/// Controller used in the Normal and safety-controller locations.
using ControllerSpec = std::variant<LinearPolicy, CbfQpParams, RandomUniformInput>;

class Controller {
public:
    explicit Controller(ControllerSpec spec) : spec_(std::move(spec)) {
        if (const auto* r = std::get_if<RandomUniformInput>(&spec_)) rng_.seed(r->seed);
    }

    const ControllerSpec& spec() const { return spec_; }
    long qp_infeasible_count() const { return qp_infeasible_; }

    Vec input(const ControlAffineSystem& sys, const MultiPoly& barrier, std::span<const double> x) {
        if (const auto* lin = std::get_if<LinearPolicy>(&spec_)) return linear_input(*lin, x, sys.input_box);
        if (const auto* qp = std::get_if<CbfQpParams>(&spec_)) {
            auto r = cbf_qp_input(*qp, sys, barrier, x);
            if (!r.feasible) ++qp_infeasible_;
            return r.u;
        }
        return Adversary::sample_uniform(sys.input_box, rng_);
    }

private:
    ControllerSpec spec_;
    std::mt19937_64 rng_{1};
    long qp_infeasible_ = 0;
};

}  // namespace cra
