#pragma once

#include <random>

#include "cra_safety.hpp"

namespace fx {

using namespace cra;

inline MultiPoly x_(std::size_t n, std::size_t i) { return MultiPoly::variable(n, i); }

/// h = r - x^2 in one dimension.
inline MultiPoly disk_1d(double r = 1.0) { return MultiPoly::constant(1, r) - x_(1, 0) * x_(1, 0); }

/// x' = a x + b u on X = [-xr, xr], U = [-ur, ur].
inline ControlAffineSystem scalar(double a, double b, double xr = 2.0, double ur = 1.0, double delta = 0.05) {
    return ControlAffineSystem::linear(Matrix{{a}}, Matrix{{b}}, Box(Vec{-xr}, Vec{xr}), Box(Vec{-ur}, Vec{ur}), delta);
}

inline SafetySpec spec_1d(double budget = 10.0) { return SafetySpec{disk_1d(), {0.0, 1.0}, budget}; }

inline ControlAffineSystem boeing(double umax = kBoeingInputBound) {
    return ControlAffineSystem::linear(boeing_a(), boeing_b(), Box(Vec{-0.01, -0.05, -0.01, -0.01}, Vec{0.01, 0.05, 0.01, 0.01}),
                                       Box(Vec{-umax}, Vec{umax}), 0.05);
}

inline SafetySpec boeing_spec() { return SafetySpec{boeing_barrier(), {0.0, 1.0}, 0.02}; }

/// Random polynomial with up to `terms` monomials of total degree <= deg.
inline MultiPoly random_poly(std::mt19937_64& rng, std::size_t n, unsigned deg, int terms, double coef = 10.0) {
    std::uniform_int_distribution<unsigned> e(0, deg);
    std::uniform_real_distribution<double> c(-coef, coef);
    std::vector<Term> ts;
    for (int k = 0; k < terms; ++k) {
        Exponents ex(n, 0);
        unsigned budget = e(rng);
        for (unsigned b = 0; b < budget; ++b) ex[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] += 1;
        ts.push_back({ex, c(rng)});
    }
    return MultiPoly(n, ts);
}

inline Box random_box(std::mt19937_64& rng, std::size_t n, double span = 2.0) {
    std::uniform_real_distribution<double> u(-span, span);
    Vec lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        lo[i] = a;
        hi[i] = b;
    }
    return Box(lo, hi);
}

inline Vec random_point(std::mt19937_64& rng, const Box& b) {
    Vec x(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) x[i] = std::uniform_real_distribution<double>(b.lo(i), b.hi(i))(rng);
    return x;
}

}  // namespace fx
