#pragma once

// Sweep over (c, d) for a linear policy u = Kx and a recovery rate theta that
// satisfy the budget-safety conditions. At each grid point the best K comes
// from a sampled max-min LP, and the certified verifier has the last word.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cra_safety/cost.hpp"
#include "cra_safety/lp.hpp"
#include "cra_safety/plant.hpp"
#include "cra_safety/verifier.hpp"

namespace cra {

struct SynthesisConfig {
    double eps_c = 0.05;
    double eps_d = 0.05;
    std::optional<double> c_max;  // default: sup of h over a grid on X
    std::optional<double> d_max;  // default: largest d passing the budget pre-check
    double tau_max = 5.0;
    long n_epochs = 4;  // N
    std::size_t sample_count = 400;
    std::size_t min_annulus_samples = 200;
    double lp_margin = 0.05;
    double input_margin = 0.01;  // fraction of each input half-range kept in reserve
    double theta_cap = 1e3;
    double gain_cap = 1e4;
    int max_rounds = 10;
    int c_max_grid = 41;  // points per axis for the sup of h
    ClassKParams alpha;
    VerifierSettings verifier;
    std::uint64_t seed = 7;

    bool operator==(const SynthesisConfig&) const = default;

    void validate() const {
        if (!(eps_c > 0.0) || !(eps_d > 0.0)) throw std::invalid_argument("synthesis: eps_c and eps_d must be positive");
        if (!(tau_max > 0.0)) throw std::invalid_argument("synthesis: tau_max must be positive");
        if (n_epochs < 1) throw std::invalid_argument("synthesis: N must be >= 1");
        if (sample_count < 1) throw std::invalid_argument("synthesis: sample_count must be >= 1");
        if (!(lp_margin >= 0.0 && lp_margin < 1.0)) throw std::invalid_argument("synthesis: lp_margin must lie in [0, 1)");
        if (!(input_margin >= 0.0 && input_margin < 1.0))
            throw std::invalid_argument("synthesis: input_margin must lie in [0, 1)");
        if (c_max && *c_max < 0.0) throw std::invalid_argument("synthesis: c_max must be >= 0");
        if (d_max && *d_max < 0.0) throw std::invalid_argument("synthesis: d_max must be >= 0");
        alpha.validate();
        verifier.validate();
    }
};

struct ThetaResult {
    bool feasible = false;
    double theta = 0.0;
    double t_star = 0.0;  // last LP optimum
    Matrix gain;
    PolicyVerdict v5b;
    PolicyVerdict v5c;
    int rounds = 0;
    std::vector<double> t_history;
    std::string diagnostic;
};

struct SynthesisResult {
    double c = 0.0;
    double d = 0.0;
    double tau = 0.0;
    double theta = 0.0;
    Matrix gain;
    CertifiedVerdict v5a;
    PolicyVerdict v5b;
    PolicyVerdict v5c;
    BudgetCheck budget;
    double bound = 0.0;
    long iterations = 0;
};

struct TraceRow {
    double c = 0.0;
    double d = 0.0;
    std::string stage;  // where the point stopped: budget, 5a, theta, eq7, tau, accepted
    double theta = 0.0;
    std::string note;
};

struct SynthesisOutcome {
    std::optional<SynthesisResult> result;
    long iterations = 0;
    long iteration_bound = 0;
    double c_max = 0.0;
    double d_max = 0.0;
    std::vector<TraceRow> trace;
    std::optional<SynthesisResult> near_miss;  // largest certified theta that failed a later test
};

/// Sup of h over a uniform grid on X.
inline double default_c_max(const ControlAffineSystem& sys, const SafetySpec& spec, int per_axis = 41) {
    const std::size_t n = sys.n;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
    double best = -std::numeric_limits<double>::infinity();
    Vec x(n);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t code = k;
        for (std::size_t i = n; i-- > 0;) {
            const double frac = per_axis > 1 ? static_cast<double>(code % per_axis) / (per_axis - 1) : 0.5;
            x[i] = sys.state_domain.lo(i) + frac * (sys.state_domain.hi(i) - sys.state_domain.lo(i));
            code /= per_axis;
        }
        best = std::max(best, spec.h.eval(x));
    }
    return std::max(0.0, best);
}

/// Largest d with (c + d) B - N delta int_0^d L1 >= 0, capped where D already covers X.
inline double default_d_max(const ControlAffineSystem& sys, const SafetySpec& spec, double c, long n_epochs,
                            int per_axis = 41) {
    double cap = 0.0;
    {
        const std::size_t n = sys.n;
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
        double lo = std::numeric_limits<double>::infinity();
        Vec x(n);
        for (std::size_t k = 0; k < total; ++k) {
            std::size_t code = k;
            for (std::size_t i = n; i-- > 0;) {
                const double frac = per_axis > 1 ? static_cast<double>(code % per_axis) / (per_axis - 1) : 0.5;
                x[i] = sys.state_domain.lo(i) + frac * (sys.state_domain.hi(i) - sys.state_domain.lo(i));
                code /= per_axis;
            }
            lo = std::min(lo, spec.h.eval(x));
        }
        cap = std::max(0.0, -lo);
    }
    const double nd = n_epochs * sys.delta;
    auto g = [&](double d) { return (c + d) * spec.budget - nd * l1_integral(spec, d); };
    if (g(cap) >= 0.0) return cap;
    const int scan = 1000;
    double a = 0.0;
    for (int k = 1; k <= scan; ++k) {
        const double b = cap * k / scan;
        if (g(b) < 0.0) {
            double lo = a, hi = b;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) >= 0.0 ? lo : hi) = mid;
            }
            return lo;
        }
        a = b;
    }
    return cap;
}

namespace detail {

struct SampleSets {
    std::vector<Vec> annulus;
    std::vector<Vec> c1;
    std::vector<Vec> outer;  // D \ (annulus + C1) is empty; kept for witnesses of input bounds
};

inline Vec sample_box(const Box& b, std::mt19937_64& rng) {
    Vec x(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) x[i] = std::uniform_real_distribution<double>(b.lo(i), b.hi(i))(rng);
    return x;
}

inline SampleSets draw_samples(const ControlAffineSystem& sys, const SafetySpec& spec, const ShiftedSets& sets,
                               std::size_t count, std::mt19937_64& rng) {
    SampleSets s;
    const bool has_annulus = sets.c + sets.d > 0.0;
    const std::size_t want_annulus = has_annulus ? count / 2 : 0;
    const std::size_t want_c1 = count - want_annulus;
    const std::size_t max_attempts = 400 * count;
    for (std::size_t k = 0; k < max_attempts && (s.annulus.size() < want_annulus || s.c1.size() < want_c1); ++k) {
        Vec x = sample_box(sys.state_domain, rng);
        const double hv = spec.h.eval(x);
        if (sets.in_annulus(hv)) {
            if (s.annulus.size() < want_annulus) s.annulus.push_back(std::move(x));
        } else if (sets.in_c1(hv)) {
            if (s.c1.size() < want_c1) s.c1.push_back(std::move(x));
        }
    }
    return s;
}

struct LpRows {
    std::vector<Vec> rows;
    Vec rhs;
};

// Variables: K row-major (m*n), then t.
inline void add_rate_row(LpRows& lp, const ControlAffineSystem& sys, const SafetySpec& spec, const Vec& x,
                         bool with_t, double offset) {
    const std::size_t n = sys.n, m = sys.m;
    Vec grad(n);
    for (std::size_t i = 0; i < n; ++i) grad[i] = spec.h.partial(i).eval(x);
    const Vec fx = sys.drift(x);
    const Matrix gx = sys.input_matrix(x);
    Vec row(m * n + 1, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += grad[i] * gx(i, r);
        for (std::size_t j = 0; j < n; ++j) row[r * n + j] = -a * x[j];
    }
    row[m * n] = with_t ? 1.0 : 0.0;
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(dot(grad, fx) + offset);
}

inline void add_input_rows(LpRows& lp, const ControlAffineSystem& sys, const Vec& x, double margin) {
    const std::size_t n = sys.n, m = sys.m;
    for (std::size_t r = 0; r < m; ++r) {
        const double half = 0.5 * (sys.input_box.hi(r) - sys.input_box.lo(r));
        Vec up(m * n + 1, 0.0), dn(m * n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            up[r * n + j] = x[j];
            dn[r * n + j] = -x[j];
        }
        lp.rows.push_back(std::move(up));
        lp.rhs.push_back(sys.input_box.hi(r) - margin * half);
        lp.rows.push_back(std::move(dn));
        lp.rhs.push_back(-(sys.input_box.lo(r) + margin * half));
    }
}

}  // namespace detail

/// Best certified theta and gain K at fixed (c, d).
inline ThetaResult maximize_theta(const ControlAffineSystem& sys, const SafetySpec& spec, double c, double d,
                                  const SynthesisConfig& cfg) {
    cfg.validate();
    const ShiftedSets sets(c, d);
    const std::size_t n = sys.n, m = sys.m;
    const double cd = c + d;
    std::mt19937_64 rng(cfg.seed ^ (std::hash<double>{}(c) * 31 + std::hash<double>{}(d)));
    auto samples = detail::draw_samples(sys, spec, sets, cfg.sample_count, rng);

    ThetaResult res;
    res.gain = Matrix(m, n);
    if (cd > 0.0 && samples.annulus.size() < std::min(cfg.min_annulus_samples, cfg.sample_count / 2)) {
        res.diagnostic = "degenerate annulus: " + std::to_string(samples.annulus.size()) + " samples";
        return res;
    }
    const double t_cap = cd > 0.0 ? cfg.theta_cap * cd : 1.0;

    for (int round = 0; round < cfg.max_rounds; ++round) {
        res.rounds = round + 1;
        detail::LpRows lp;
        for (const auto& x : samples.annulus) {
            detail::add_rate_row(lp, sys, spec, x, true, 0.0);
            detail::add_input_rows(lp, sys, x, cfg.input_margin);
        }
        // with no annulus, t is the 5c margin
        for (const auto& x : samples.c1) {
            detail::add_rate_row(lp, sys, spec, x, cd == 0.0, cfg.alpha.kappa * (spec.h.eval(x) - c));
            detail::add_input_rows(lp, sys, x, cfg.input_margin);
        }
        for (const auto& x : samples.outer) detail::add_input_rows(lp, sys, x, cfg.input_margin);
        {
            Vec cap(m * n + 1, 0.0);
            cap[m * n] = 1.0;
            lp.rows.push_back(cap);
            lp.rhs.push_back(t_cap);
            for (std::size_t v = 0; v < m * n; ++v) {
                Vec up(m * n + 1, 0.0), dn(m * n + 1, 0.0);
                up[v] = 1.0;
                dn[v] = -1.0;
                lp.rows.push_back(up);
                lp.rhs.push_back(cfg.gain_cap);
                lp.rows.push_back(dn);
                lp.rhs.push_back(cfg.gain_cap);
            }
        }
        Vec obj(m * n + 1, 0.0);
        obj[m * n] = 1.0;
        const LpResult sol = lp_solve(Matrix::from_rows(lp.rows), lp.rhs, obj);
        if (sol.status != LpStatus::Optimal) {
            res.diagnostic = sol.status == LpStatus::Infeasible ? "sampled LP infeasible" : "sampled LP unbounded";
            return res;
        }
        res.t_star = sol.x[m * n];
        res.t_history.push_back(res.t_star);
        if (cd > 0.0 ? !(res.t_star > 0.0) : res.t_star < 0.0) {
            res.diagnostic = "no positive recovery rate on samples (t* = " + std::to_string(res.t_star) + ")";
            return res;
        }
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t j = 0; j < n; ++j) res.gain(r, j) = sol.x[r * n + j];
        res.theta = cd > 0.0 ? res.t_star * (1.0 - cfg.lp_margin) / cd : cfg.theta_cap;

        res.v5c = check_5c(sys, spec, sets, res.gain, cfg.alpha, cfg.verifier);
        res.v5b = check_5b(sys, spec, sets, res.gain, res.theta, cfg.verifier);
        if (cd > 0.0 && res.v5b.inequality.status == VerdictStatus::Inconclusive &&
            res.v5c.combined().certified() && res.v5b.inputs.certified()) {
            // Give back more of the sampled optimum before resampling.
            for (int shrink = 0; shrink < 3 && !res.v5b.inequality.certified(); ++shrink) {
                res.theta *= 0.8;
                res.v5b.inequality = check_5b(sys, spec, sets, res.gain, res.theta, cfg.verifier).inequality;
            }
        }
        if (res.v5b.combined().certified() && res.v5c.combined().certified()) {
            res.feasible = true;
            res.diagnostic.clear();
            return res;
        }
        bool added = false;
        auto add = [&](const CertifiedVerdict& v, std::vector<Vec>& into) {
            if (v.certified() || v.witness_x.empty()) return;
            into.push_back(v.witness_x);
            added = true;
        };
        add(res.v5b.inequality, samples.annulus);
        add(res.v5c.inequality, samples.c1);
        add(res.v5b.inputs, samples.outer);
        add(res.v5c.inputs, samples.outer);
        res.diagnostic = "post-verification failed";
        if (!added) return res;
    }
    res.diagnostic = "verification did not converge within " + std::to_string(cfg.max_rounds) + " rounds";
    return res;
}

inline long synthesis_iteration_bound(double c_max, double d_max, double eps_c, double eps_d) {
    return (static_cast<long>(std::floor(c_max / eps_c + 1e-12)) + 1) *
           (static_cast<long>(std::floor(d_max / eps_d + 1e-12)) + 1);
}

/// Outer sweep over c, inner over d; the first accepted point is returned.
inline SynthesisOutcome synthesize(const ControlAffineSystem& sys, const SafetySpec& spec, const SynthesisConfig& cfg) {
    cfg.validate();
    sys.validate();
    SynthesisOutcome out;
    out.c_max = cfg.c_max.value_or(default_c_max(sys, spec, cfg.c_max_grid));
    out.d_max = cfg.d_max.value_or(default_d_max(sys, spec, out.c_max, cfg.n_epochs, cfg.c_max_grid));
    spec.validate(std::max(out.d_max, 1e-9));
    out.iteration_bound = synthesis_iteration_bound(out.c_max, out.d_max, cfg.eps_c, cfg.eps_d);
    const long nc = static_cast<long>(std::floor(out.c_max / cfg.eps_c + 1e-12));
    const long nd = static_cast<long>(std::floor(out.d_max / cfg.eps_d + 1e-12));
    const double nd_delta = cfg.n_epochs * sys.delta;

    for (long ic = 0; ic <= nc; ++ic) {
        const double c = ic * cfg.eps_c;
        for (long id = 0; id <= nd; ++id) {
            const double d = id * cfg.eps_d;
            ++out.iterations;
            TraceRow row{c, d, "", 0.0, ""};
            if (d > 0.0 && (c + d) * spec.budget - nd_delta * l1_integral(spec, d) < 0.0) {
                row.stage = "budget";
                out.trace.push_back(row);
                continue;
            }
            const ShiftedSets sets(c, d);
            const CertifiedVerdict v5a = check_5a(sys, spec, sets, cfg.n_epochs, sys.delta, cfg.verifier);
            if (!v5a.certified()) {
                row.stage = "5a";
                row.note = std::string(to_string(v5a.status));
                out.trace.push_back(row);
                continue;
            }
            ThetaResult th = maximize_theta(sys, spec, c, d, cfg);
            if (!th.feasible) {
                row.stage = "theta";
                row.note = th.diagnostic;
                out.trace.push_back(row);
                continue;
            }
            row.theta = th.theta;
            SynthesisResult cand;
            cand.c = c;
            cand.d = d;
            cand.theta = th.theta;
            cand.tau = 1.0 / th.theta;
            cand.gain = th.gain;
            cand.v5a = v5a;
            cand.v5b = th.v5b;
            cand.v5c = th.v5c;
            cand.budget = check_budget_inequality(spec, c, d, cfg.n_epochs, sys.delta, th.theta);
            cand.bound = d > 0.0 ? worst_case_bound(spec, c, d, cand.tau, static_cast<int>(cfg.n_epochs), sys.delta) : 0.0;
            cand.iterations = out.iterations;
            if (!cand.budget.ok || !(cand.tau < cfg.tau_max)) {
                row.stage = cand.budget.ok ? "tau" : "eq7";
                out.trace.push_back(row);
                if (!out.near_miss || cand.theta > out.near_miss->theta) out.near_miss = cand;
                continue;
            }
            row.stage = "accepted";
            out.trace.push_back(row);
            out.result = cand;
            return out;
        }
    }
    return out;
}

}  // namespace cra
