#pragma once

// Safety cost model. Outside C = {h >= 0} the plant accrues L1(-h(x)); J is the
// time integral over an attack cycle and must stay within the budget B.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cra_safety/plant.hpp"
#include "cra_safety/poly.hpp"

namespace cra {

struct SafetySpec {
    MultiPoly h;
    std::vector<double> l1_coeffs{0.0, 1.0};  // L1(s) = sum a_i s^i
    double budget = 0.0;

    bool operator==(const SafetySpec&) const = default;

    double l1(double s) const {
        double acc = 0.0;
        for (std::size_t i = l1_coeffs.size(); i-- > 0;) acc = acc * s + l1_coeffs[i];
        return acc;
    }

    /// Checks that L1 is non-negative and non-decreasing on (0, d_max].
    void validate(double d_max = 1.0, int grid = 1000) const {
        if (!(budget >= 0.0)) throw std::invalid_argument("spec: budget must be >= 0");
        if (h.n_vars() == 0) throw std::invalid_argument("spec: h must be set");
        if (l1_coeffs.empty()) throw std::invalid_argument("spec: L1 needs at least one coefficient");
        double prev = -std::numeric_limits<double>::infinity();
        for (int k = 1; k <= grid; ++k) {
            const double s = d_max * k / grid;
            const double v = l1(s);
            if (v < -1e-15) throw std::invalid_argument("spec: L1 negative at s=" + std::to_string(s));
            if (v < prev - 1e-12 * (1.0 + std::abs(prev)))
                throw std::invalid_argument("spec: L1 decreasing near s=" + std::to_string(s));
            prev = v;
        }
    }
};

/// Shifted barriers h_c = h - c and h_d = h + d with C1 within C within D.
struct ShiftedSets {
    double c = 0.0;
    double d = 0.0;

    ShiftedSets(double c_, double d_) : c(c_), d(d_) {
        if (!(c >= 0.0) || !(d >= 0.0)) throw std::invalid_argument("shifted sets need c, d >= 0");
    }
    MultiPoly h_c(const MultiPoly& h) const { return h - c; }
    MultiPoly h_d(const MultiPoly& h) const { return h + d; }
    bool in_c1(double hv) const { return hv >= c; }
    bool in_d(double hv) const { return hv >= -d; }
    bool in_annulus(double hv) const { return hv >= -d && hv < c; }
};

/// L(h) = L1(-h) outside C, else 0.
inline double cost_of_barrier(const SafetySpec& spec, double hv) {
    if (hv >= 0.0) return 0.0;
    const double v = spec.l1(-hv);
    if (v < 0.0)
        throw std::domain_error("instantaneous cost: L1(" + std::to_string(-hv) +
                                ") is negative; spec violates the monotone non-negative assumption");
    return v;
}

inline double instantaneous_cost(const SafetySpec& spec, std::span<const double> x) {
    return cost_of_barrier(spec, spec.h.eval(x));
}

/// Composite trapezoid of L(h(x_t)) over samples in [t1, t2], with linear
/// interpolation of the integrand at interval ends that fall between samples.
inline double integrate_cost(const SafetySpec& spec, const Trajectory& traj, double t1, double t2) {
    if (traj.size() < 2 || t2 <= t1) return 0.0;
    const double eps = 1e-12 * (1.0 + std::abs(t2));
    if (t1 < traj.times.front() - eps || t2 > traj.times.back() + eps)
        throw std::invalid_argument("integrate_cost: interval outside trajectory span");
    double total = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double a = traj.times[k - 1];
        const double b = traj.times[k];
        const double lo = std::max(a, t1);
        const double hi = std::min(b, t2);
        if (hi <= lo) continue;
        const double la = instantaneous_cost(spec, traj.states[k - 1]);
        const double lb = instantaneous_cost(spec, traj.states[k]);
        auto at = [&](double t) { return la + (lb - la) * (t - a) / (b - a); };
        total += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    return total;
}

/// Closed form of the integral of L1 over [0, d].
inline double l1_integral(const SafetySpec& spec, double d) {
    if (d < 0.0) throw std::invalid_argument("l1_integral: d must be >= 0");
    double acc = 0.0;
    double pw = d;
    for (std::size_t i = 0; i < spec.l1_coeffs.size(); ++i) {
        acc += spec.l1_coeffs[i] * pw / static_cast<double>(i + 1);
        pw *= d;
    }
    return acc;
}

/// J1 + J2 = (N delta + tau) / (c + d) * int_0^d L1.
inline double worst_case_bound(const SafetySpec& spec, double c, double d, double tau, int n_epochs,
                               double delta) {
    if (d == 0.0) return 0.0;
    if (!(c + d > 0.0)) throw std::invalid_argument("worst_case_bound: c + d must be positive");
    if (!(tau > 0.0) || n_epochs < 1 || !(delta > 0.0))
        throw std::invalid_argument("worst_case_bound: need tau > 0, N >= 1, delta > 0");
    return (n_epochs * delta + tau) / (c + d) * l1_integral(spec, d);
}

}  // namespace cra
