#pragma once

// Certified grid-plus-Lipschitz verification of polynomial inequalities over
// semialgebraic subsets of the state box X, plus the closed-form budget check.
//
// A cell is certified when a sound lower bound of the expression over the cell
// clears the bound; it is split when undecided. A center that truly lies in
// the set and violates the bound by more than kFalsifyTol is a witness.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cra_safety/cost.hpp"
#include "cra_safety/hybrid.hpp"
#include "cra_safety/linalg.hpp"
#include "cra_safety/plant.hpp"
#include "cra_safety/poly.hpp"

namespace cra {

inline constexpr double kFalsifyTol = 1e-12;

enum class VerdictStatus { Certified, Falsified, Inconclusive };

inline std::string_view to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Certified: return "certified";
        case VerdictStatus::Falsified: return "falsified";
        case VerdictStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct CertifiedVerdict {
    VerdictStatus status = VerdictStatus::Certified;
    double margin = std::numeric_limits<double>::infinity();  // +inf when the domain is empty
    Vec witness_x;
    Vec witness_u;
    double grid_resolution = 0.0;  // finest cell width (inf-norm) visited
    int refinements_used = 0;
    std::size_t cells_evaluated = 0;

    bool certified() const { return status == VerdictStatus::Certified; }
};

/// Worst of several verdicts: falsified beats inconclusive beats certified.
inline CertifiedVerdict combine(const std::vector<CertifiedVerdict>& vs) {
    CertifiedVerdict out;
    auto rank = [](VerdictStatus s) { return s == VerdictStatus::Falsified ? 2 : s == VerdictStatus::Inconclusive ? 1 : 0; };
    for (const auto& v : vs) {
        out.cells_evaluated += v.cells_evaluated;
        out.refinements_used = std::max(out.refinements_used, v.refinements_used);
        out.grid_resolution = out.grid_resolution == 0.0 ? v.grid_resolution
                                                         : (v.grid_resolution == 0.0 ? out.grid_resolution
                                                                                     : std::min(out.grid_resolution, v.grid_resolution));
        const bool worse = rank(v.status) > rank(out.status) ||
                           (rank(v.status) == rank(out.status) && v.margin < out.margin);
        if (worse) {
            out.status = v.status;
            out.margin = v.margin;
            out.witness_x = v.witness_x;
            out.witness_u = v.witness_u;
        }
    }
    return out;
}

struct ClassKParams {
    double kappa = 1.0;
    bool operator==(const ClassKParams&) const = default;
    void validate() const {
        if (!(kappa > 0.0)) throw std::invalid_argument("alpha: kappa must be positive");
    }
};

struct VerifierSettings {
    int initial_cells = 8;  // per axis
    int max_refinements = 6;
    std::size_t max_cells = 4'000'000;
    unsigned threads = 0;  // 0: hardware concurrency, capped by CRA_SAFETY_THREADS

    bool operator==(const VerifierSettings&) const = default;

    VerifierSettings doubled() const {
        VerifierSettings s = *this;
        s.initial_cells *= 2;
        return s;
    }
    void validate() const {
        if (initial_cells < 1) throw std::invalid_argument("verifier: initial_cells must be >= 1");
        if (max_refinements < 0) throw std::invalid_argument("verifier: max_refinements must be >= 0");
    }
};

inline unsigned worker_count(unsigned requested = 0) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CRA_SAFETY_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

/// Runs fn(i) for i in [0, count) across workers. Each index is handled once.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, count / 64)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// {p >= 0} or, when strict, {p > 0}.
struct SetConstraint {
    MultiPoly p;
    bool strict = false;
};
using Region = std::vector<SetConstraint>;

/// One inequality expr(x) >= bound; `u` is recorded as the witness input.
struct Expression {
    MultiPoly expr;
    Vec u;
};

enum class Quantifier {
    All,  // every expression must clear the bound
    Any,  // at least one must
};

struct CertifyProblem {
    Box domain;
    Region region;
    std::vector<Expression> exprs;
    double bound = 0.0;
    Quantifier quantifier = Quantifier::All;
};

namespace detail {

struct CellResult {
    bool relevant = false;
    bool center_in_set = false;
    double center_value = 0.0;  // min (All) or max (Any) across expressions
    std::size_t center_expr = 0;
    double lower = 0.0;  // sound lower bound of the combined expression on the cell
};

inline bool lex_less(const Vec& a, const Vec& b) { return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()); }

}  // namespace detail

inline CertifiedVerdict certify(const CertifyProblem& prob, const VerifierSettings& settings) {
    settings.validate();
    const std::size_t n = prob.domain.dim();
    if (prob.exprs.empty()) throw std::invalid_argument("certify: no expressions");
    for (const auto& e : prob.exprs)
        if (e.expr.n_vars() != n) throw std::invalid_argument("certify: expression dimension mismatch");
    for (const auto& c : prob.region)
        if (c.p.n_vars() != n) throw std::invalid_argument("certify: region dimension mismatch");

    std::vector<std::vector<MultiPoly>> grads;
    for (const auto& e : prob.exprs) grads.push_back(e.expr.gradient());
    const unsigned workers = worker_count(settings.threads);

    // Cells are (lo corner, width) pairs at a common width per level.
    Vec width(n);
    for (std::size_t i = 0; i < n; ++i) width[i] = (prob.domain.hi(i) - prob.domain.lo(i)) / settings.initial_cells;
    std::vector<Vec> cells;
    {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(settings.initial_cells);
        cells.reserve(total);
        for (std::size_t k = 0; k < total; ++k) {
            Vec lo(n);
            std::size_t code = k;
            for (std::size_t i = n; i-- > 0;) {
                lo[i] = prob.domain.lo(i) + static_cast<double>(code % settings.initial_cells) * width[i];
                code /= settings.initial_cells;
            }
            cells.push_back(std::move(lo));
        }
    }

    CertifiedVerdict out;
    double certified_min = std::numeric_limits<double>::infinity();
    bool falsified = false;
    double worst_value = std::numeric_limits<double>::infinity();
    Vec worst_x;
    std::size_t worst_expr = 0;

    for (int level = 0;; ++level) {
        std::vector<detail::CellResult> results(cells.size());
        const Vec w = width;
        parallel_for(cells.size(), workers, [&](std::size_t k) {
            auto& r = results[k];
            Vec lo = cells[k];
            Vec hi(n), center(n);
            for (std::size_t i = 0; i < n; ++i) {
                hi[i] = std::min(lo[i] + w[i], prob.domain.hi(i));
                center[i] = 0.5 * (lo[i] + hi[i]);
            }
            const Box cell(lo, hi);
            r.center_in_set = true;
            for (const auto& c : prob.region) {
                const Interval iv = c.p.range(cell);
                if (c.strict ? !(iv.hi > 0.0) : !(iv.hi >= 0.0)) return;
                const double v = c.p.eval(center);
                if (c.strict ? !(v > 0.0) : !(v >= 0.0)) r.center_in_set = false;
            }
            r.relevant = true;
            const bool any = prob.quantifier == Quantifier::Any;
            r.center_value = any ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
            r.lower = r.center_value;
            for (std::size_t e = 0; e < prob.exprs.size(); ++e) {
                const double v = prob.exprs[e].expr.eval(center);
                double lip = 0.0;
                for (std::size_t i = 0; i < n; ++i) lip += bound_abs(grads[e][i], cell) * 0.5 * (hi[i] - lo[i]);
                const double lb = std::max(v - lip * (1.0 + kOutwardFudge), prob.exprs[e].expr.range(cell).lo);
                if (any ? v > r.center_value : v < r.center_value) {
                    r.center_value = v;
                    r.center_expr = e;
                }
                r.lower = any ? std::max(r.lower, lb) : std::min(r.lower, lb);
            }
        });

        out.cells_evaluated += cells.size();
        double cell_width = 0.0;
        for (std::size_t i = 0; i < n; ++i) cell_width = std::max(cell_width, width[i]);
        out.grid_resolution = cell_width;
        out.refinements_used = level;

        std::vector<std::size_t> undecided;
        double undecided_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto& r = results[k];
            if (!r.relevant) continue;
            if (r.center_in_set) {
                Vec center(n);
                for (std::size_t i = 0; i < n; ++i)
                    center[i] = 0.5 * (cells[k][i] + std::min(cells[k][i] + width[i], prob.domain.hi(i)));
                const bool better = r.center_value < worst_value ||
                                    (r.center_value == worst_value && detail::lex_less(center, worst_x));
                if (better) {
                    worst_value = r.center_value;
                    worst_x = center;
                    worst_expr = r.center_expr;
                }
                if (r.center_value < prob.bound - kFalsifyTol) falsified = true;
            }
            if (r.lower >= prob.bound) {
                certified_min = std::min(certified_min, r.lower - prob.bound);
            } else {
                undecided.push_back(k);
                undecided_min = std::min(undecided_min, r.lower - prob.bound);
            }
        }

        auto fill_witness = [&] {
            out.witness_x = worst_x;
            out.witness_u = worst_x.empty() ? Vec{} : prob.exprs[worst_expr].u;
        };
        const std::size_t children = std::size_t{1} << n;
        if (falsified) {
            // Localize the worst point: keep splitting cells that may hold a lower value.
            std::vector<std::size_t> worse;
            for (std::size_t k = 0; k < cells.size(); ++k)
                if (results[k].relevant && results[k].lower < worst_value) worse.push_back(k);
            if (worse.empty() || level >= settings.max_refinements ||
                out.cells_evaluated + worse.size() * children > settings.max_cells) {
                out.status = VerdictStatus::Falsified;
                out.margin = worst_value - prob.bound;
                fill_witness();
                return out;
            }
            undecided = std::move(worse);
        } else if (undecided.empty()) {
            out.status = VerdictStatus::Certified;
            out.margin = certified_min;
            fill_witness();
            return out;
        } else if (level >= settings.max_refinements || out.cells_evaluated + undecided.size() * children > settings.max_cells) {
            out.status = VerdictStatus::Inconclusive;
            out.margin = undecided_min;
            fill_witness();
            return out;
        }
        std::vector<Vec> next;
        next.reserve(undecided.size() * children);
        for (std::size_t k : undecided)
            for (std::size_t mask = 0; mask < children; ++mask) {
                Vec lo = cells[k];
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (std::size_t{1} << (n - 1 - i))) lo[i] += 0.5 * width[i];
                next.push_back(std::move(lo));
            }
        cells = std::move(next);
        for (auto& wi : width) wi *= 0.5;
    }
}

namespace detail {

inline MultiPoly lie_derivative(const MultiPoly& h, const std::vector<MultiPoly>& field) {
    return dot(h.gradient(), field);
}

inline std::vector<Expression> input_bound_exprs(const ControlAffineSystem& sys, const Matrix& k) {
    std::vector<Expression> out;
    for (std::size_t r = 0; r < sys.m; ++r) {
        const MultiPoly kx = MultiPoly::linear(k.row(r));
        out.push_back({(-1.0) * kx + sys.input_box.hi(r), {}});
        out.push_back({kx - sys.input_box.lo(r), {}});
    }
    return out;
}

}  // namespace detail

/// dh/dx (f + g u) >= -(c+d)/(N delta) on D x U, checked at the vertices of U.
/// c + d = 0 is allowed and gives bound 0.
inline CertifiedVerdict check_5a(const ControlAffineSystem& sys, const SafetySpec& spec, const ShiftedSets& sets,
                                 long n_epochs, double delta, const VerifierSettings& settings = {}) {
    if (n_epochs < 1 || !(delta > 0.0)) throw std::invalid_argument("check_5a: need N >= 1 and delta > 0");
    CertifyProblem prob{sys.state_domain, {{sets.h_d(spec.h), false}}, {}, -(sets.c + sets.d) / (n_epochs * delta)};
    for (const auto& v : sys.input_box.vertices())
        prob.exprs.push_back({detail::lie_derivative(spec.h, sys.closed_field(v)), v});
    return certify(prob, settings);
}

struct PolicyVerdict {
    CertifiedVerdict inequality;
    CertifiedVerdict inputs;  // Kx in U
    CertifiedVerdict combined() const { return combine({inequality, inputs}); }
};

/// dh/dx (f + g K x) >= (c+d) theta on the annulus -d <= h < c, plus Kx in U on D.
inline PolicyVerdict check_5b(const ControlAffineSystem& sys, const SafetySpec& spec, const ShiftedSets& sets,
                              const Matrix& k, double theta, const VerifierSettings& settings = {}) {
    if (!(theta > 0.0)) throw std::invalid_argument("check_5b: theta must be positive");
    PolicyVerdict out;
    if (sets.c + sets.d > 0.0) {
        CertifyProblem prob{sys.state_domain,
                            {{sets.h_d(spec.h), false}, {(-1.0) * sets.h_c(spec.h), true}},
                            {{detail::lie_derivative(spec.h, sys.closed_field(k)), {}}},
                            (sets.c + sets.d) * theta};
        out.inequality = certify(prob, settings);
    }
    CertifyProblem in{sys.state_domain, {{sets.h_d(spec.h), false}}, detail::input_bound_exprs(sys, k), 0.0};
    out.inputs = certify(in, settings);
    return out;
}

/// dh/dx (f + g K x) + kappa (h - c) >= 0 on C1, plus Kx in U on C1.
inline PolicyVerdict check_5c(const ControlAffineSystem& sys, const SafetySpec& spec, const ShiftedSets& sets,
                              const Matrix& k, const ClassKParams& alpha, const VerifierSettings& settings = {}) {
    alpha.validate();
    const MultiPoly hc = sets.h_c(spec.h);
    PolicyVerdict out;
    CertifyProblem prob{sys.state_domain, {{hc, false}},
                        {{detail::lie_derivative(spec.h, sys.closed_field(k)) + alpha.kappa * hc, {}}}, 0.0};
    out.inequality = certify(prob, settings);
    CertifyProblem in{sys.state_domain, {{hc, false}}, detail::input_bound_exprs(sys, k), 0.0};
    out.inputs = certify(in, settings);
    return out;
}

struct BudgetCheck {
    bool ok = true;
    double slack = 0.0;
};

/// B(c+d) - (N delta + 1/theta) * sum_i a_i d^(i+1)/(i+1) >= 0, evaluated exactly.
inline BudgetCheck check_budget_inequality(const SafetySpec& spec, double c, double d, long n_epochs, double delta,
                                           double theta) {
    if (d == 0.0) return {true, spec.budget * c};
    if (!(c + d > 0.0)) throw std::invalid_argument("check_budget_inequality: need c + d > 0 or d = 0");
    if (!(theta > 0.0)) throw std::invalid_argument("check_budget_inequality: theta must be positive");
    const double slack = spec.budget * (c + d) - (n_epochs * delta + 1.0 / theta) * l1_integral(spec, d);
    return {slack >= 0.0, slack};
}

/// Zero-cost regime (d = 0): 5a over C x U with bound -c/(N delta), 5b, 5c.
inline CertifiedVerdict check_strict_safety(const ControlAffineSystem& sys, const SafetySpec& spec, double c,
                                            double theta, const Matrix& k, const ClassKParams& alpha, long n_epochs,
                                            const VerifierSettings& settings = {}) {
    if (!(c >= 0.0) || !(theta > 0.0)) throw std::invalid_argument("check_strict_safety: need c >= 0, theta > 0");
    const ShiftedSets sets(c, 0.0);
    return combine({check_5a(sys, spec, sets, n_epochs, sys.delta, settings),
                    check_5b(sys, spec, sets, k, theta, settings).combined(),
                    check_5c(sys, spec, sets, k, alpha, settings).combined()});
}

/// Simplex safety-controller regime c = d = 0: some vertex of U satisfies the
/// zeroing condition dh/dx (f + g u) + kappa h >= 0 everywhere on C.
inline CertifiedVerdict check_zcbf_feasibility(const ControlAffineSystem& sys, const SafetySpec& spec,
                                               const ClassKParams& alpha, const VerifierSettings& settings = {}) {
    alpha.validate();
    CertifyProblem prob{sys.state_domain, {{spec.h, false}}, {}, 0.0, Quantifier::Any};
    for (const auto& v : sys.input_box.vertices())
        prob.exprs.push_back({detail::lie_derivative(spec.h, sys.closed_field(v)) + alpha.kappa * spec.h, v});
    return certify(prob, settings);
}

struct CertificateCheck {
    CertifiedVerdict v5a;
    PolicyVerdict v5b;
    PolicyVerdict v5c;
    BudgetCheck budget;
    std::optional<bool> schedule_ok;  // A >= tau + N delta
    double bound = 0.0;               // J1 + J2

    bool all_ok() const {
        return v5a.certified() && v5b.combined().certified() && v5c.combined().certified() && budget.ok &&
               schedule_ok.value_or(true);
    }
    bool any_falsified() const {
        return v5a.status == VerdictStatus::Falsified || v5b.combined().status == VerdictStatus::Falsified ||
               v5c.combined().status == VerdictStatus::Falsified;
    }
};

/// Every budget-safety condition for a candidate (c, d, tau, K).
inline CertificateCheck verify_certificate(const ControlAffineSystem& sys, const SafetySpec& spec, double c, double d,
                                           double tau, const Matrix& k, long n_epochs, const ClassKParams& alpha,
                                           const std::optional<AttackSchedule>& schedule,
                                           const VerifierSettings& settings = {}) {
    if (!(tau > 0.0)) throw std::invalid_argument("verify_certificate: tau must be positive");
    const ShiftedSets sets(c, d);
    CertificateCheck out;
    out.v5a = check_5a(sys, spec, sets, n_epochs, sys.delta, settings);
    out.v5b = check_5b(sys, spec, sets, k, 1.0 / tau, settings);
    out.v5c = check_5c(sys, spec, sets, k, alpha, settings);
    out.budget = check_budget_inequality(spec, c, d, n_epochs, sys.delta, 1.0 / tau);
    if (schedule) out.schedule_ok = schedule->satisfies_cycle_bound(tau, n_epochs, sys.delta);
    out.bound = d > 0.0 ? worst_case_bound(spec, c, d, tau, static_cast<int>(n_epochs), sys.delta) : 0.0;
    return out;
}

}  // namespace cra
