#pragma once

// Control-affine plant x' = f(x) + g(x) u with zero-order-hold actuation:
// the input is constant over each epoch of length delta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cra_safety/linalg.hpp"
#include "cra_safety/location.hpp"
#include "cra_safety/poly.hpp"

namespace cra {

/// Any |x_i| above this aborts a simulation.
inline constexpr double kDivergenceThreshold = 1e6;
inline constexpr int kDefaultSubsteps = 10;

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ControlAffineSystem {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<MultiPoly> f;               // n entries
    std::vector<std::vector<MultiPoly>> g;  // n rows, m columns
    Box state_domain;
    Box input_box;
    double delta = 0.05;

    bool operator==(const ControlAffineSystem&) const = default;

    /// x' = A x + B u as polynomial entries.
    static ControlAffineSystem linear(const Matrix& a, const Matrix& b, Box state_domain,
                                      Box input_box, double delta) {
        if (a.rows() != a.cols() || b.rows() != a.rows())
            throw std::invalid_argument("linear system: A must be n x n and B n x m");
        ControlAffineSystem s;
        s.n = a.rows();
        s.m = b.cols();
        for (std::size_t i = 0; i < s.n; ++i) {
            s.f.push_back(MultiPoly::linear(a.row(i)));
            std::vector<MultiPoly> gi;
            for (std::size_t k = 0; k < s.m; ++k) gi.push_back(MultiPoly::constant(s.n, b(i, k)));
            s.g.push_back(std::move(gi));
        }
        s.state_domain = std::move(state_domain);
        s.input_box = std::move(input_box);
        s.delta = delta;
        s.validate();
        return s;
    }

    void validate() const {
        if (n == 0) throw std::invalid_argument("system: state dimension must be positive");
        if (f.size() != n) throw std::invalid_argument("system: f must have n entries");
        if (g.size() != n) throw std::invalid_argument("system: g must have n rows");
        for (std::size_t i = 0; i < n; ++i) {
            if (f[i].n_vars() != n)
                throw std::invalid_argument("system: f[" + std::to_string(i) + "] has wrong n_vars");
            if (g[i].size() != m)
                throw std::invalid_argument("system: g row " + std::to_string(i) + " needs m entries");
            for (const auto& p : g[i])
                if (p.n_vars() != n) throw std::invalid_argument("system: g entry has wrong n_vars");
        }
        if (state_domain.dim() != n) throw std::invalid_argument("system: state_domain dimension != n");
        if (input_box.dim() != m) throw std::invalid_argument("system: input_box dimension != m");
        if (!(delta > 0.0)) throw std::invalid_argument("system: delta must be positive");
    }

    Vec drift(std::span<const double> x) const {
        Vec out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = f[i].eval(x);
        return out;
    }

    Matrix input_matrix(std::span<const double> x) const {
        Matrix out(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k) out(i, k) = g[i][k].eval(x);
        return out;
    }

    Vec rhs(std::span<const double> x, std::span<const double> u) const {
        Vec out = drift(x);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k)
                if (u[k] != 0.0) out[i] += g[i][k].eval(x) * u[k];
        return out;
    }

    /// Polynomial vector f(x) + g(x) u for a fixed input u.
    std::vector<MultiPoly> closed_field(std::span<const double> u) const {
        std::vector<MultiPoly> out = f;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < m; ++k) out[i] += u[k] * g[i][k];
        return out;
    }

    /// Polynomial vector f(x) + g(x) K x for linear feedback K (m x n).
    std::vector<MultiPoly> closed_field(const Matrix& k) const {
        if (k.rows() != m || k.cols() != n) throw std::invalid_argument("gain must be m x n");
        std::vector<MultiPoly> out = f;
        for (std::size_t r = 0; r < m; ++r) {
            const MultiPoly ur = MultiPoly::linear(k.row(r));
            for (std::size_t i = 0; i < n; ++i) out[i] += g[i][r] * ur;
        }
        return out;
    }
};

/// Componentwise clamp of u into the box.
inline Vec saturate(std::span<const double> u, const Box& box) {
    if (u.size() != box.dim()) throw std::invalid_argument("saturate: dimension mismatch");
    Vec out(u.begin(), u.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], box.lo(i), box.hi(i));
    return out;
}

/// One classical RK4 step with u held constant.
inline Vec rk4_step(const ControlAffineSystem& sys, std::span<const double> x,
                    std::span<const double> u, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    if (x.size() != sys.n || u.size() != sys.m) throw std::invalid_argument("rk4_step: dimension mismatch");
    const std::size_t n = sys.n;
    auto axpy = [n](std::span<const double> a, double s, const Vec& b) {
        Vec r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const Vec k1 = sys.rhs(x, u);
    const Vec k2 = sys.rhs(axpy(x, dt / 2, k1), u);
    const Vec k3 = sys.rhs(axpy(x, dt / 2, k2), u);
    const Vec k4 = sys.rhs(axpy(x, dt, k3), u);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(out[i]))
            throw DivergenceError("rk4_step: non-finite state component x" + std::to_string(i + 1));
    }
    return out;
}

/// Integrates one epoch of length sys.delta with u held (zero-order hold).
inline Vec advance_epoch(const ControlAffineSystem& sys, std::span<const double> x,
                         std::span<const double> u, int substeps = kDefaultSubsteps) {
    if (substeps < 1) throw std::invalid_argument("advance_epoch: substeps must be >= 1");
    const double dt = sys.delta / substeps;
    Vec cur(x.begin(), x.end());
    for (int s = 0; s < substeps; ++s) cur = rk4_step(sys, cur, u, dt);
    return cur;
}

/// Per-substep samples of a simulated execution. inputs[k] is the input held
/// over the step that ends at times[k]; row 0 repeats the first epoch's input.
struct Trajectory {
    std::vector<double> times;
    std::vector<long> epochs;
    std::vector<Vec> states;
    std::vector<Vec> inputs;
    std::vector<Location> locations;
    std::vector<double> h;          // barrier value at the sample
    std::vector<double> cost;       // running cycle cost J at the sample
    std::vector<bool> out_of_domain;

    std::size_t size() const { return times.size(); }

    void push(double t, long epoch, Vec x, Vec u, Location loc, double hv, double j, bool outside) {
        if (!times.empty() && !(t > times.back()))
            throw std::logic_error("Trajectory: times must be strictly increasing");
        times.push_back(t);
        epochs.push_back(epoch);
        states.push_back(std::move(x));
        inputs.push_back(std::move(u));
        locations.push_back(loc);
        h.push_back(hv);
        cost.push_back(j);
        out_of_domain.push_back(outside);
    }
};

}  // namespace cra
