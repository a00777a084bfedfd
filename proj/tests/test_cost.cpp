#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cra;

namespace {

// Spec whose h is simply x in one dimension, so h(x_t) is scripted by the states.
SafetySpec linear_h_spec(std::vector<double> l1) { return SafetySpec{fx::x_(1, 0), std::move(l1), 1.0}; }

Trajectory ramp(double (*h_of_t)(double), double t_end, int samples) {
    Trajectory t;
    for (int k = 0; k <= samples; ++k) {
        const double s = t_end * k / samples;
        t.push(s, 0, Vec{h_of_t(s)}, Vec{0.0}, Location{}, h_of_t(s), 0.0, false);
    }
    return t;
}

}  // namespace

TEST(InstantaneousCost, Examples) {
    EXPECT_EQ(instantaneous_cost(linear_h_spec({0.0, 1.0}), Vec{0.3}), 0.0);
    EXPECT_DOUBLE_EQ(instantaneous_cost(linear_h_spec({0.0, 1.0}), Vec{-0.1}), 0.1);
    EXPECT_DOUBLE_EQ(instantaneous_cost(linear_h_spec({1.0}), Vec{-5.0}), 1.0);
    EXPECT_EQ(instantaneous_cost(linear_h_spec({1.0}), Vec{0.0}), 0.0);
}

TEST(IntegrateCost, InsideCIsFree) {
    const auto t = ramp([](double s) { return 1.0 + s; }, 1.0, 20);
    EXPECT_EQ(integrate_cost(linear_h_spec({0.0, 1.0}), t, 0.0, 1.0), 0.0);
}

TEST(IntegrateCost, LinearRamp) {
    const auto t = ramp([](double s) { return -0.1 * s; }, 1.0, 200);
    EXPECT_NEAR(integrate_cost(linear_h_spec({0.0, 1.0}), t, 0.0, 1.0), 0.05, 1e-6);
}

TEST(IntegrateCost, TimeOutsideCounter) {
    // outside C for exactly 4 epochs of 0.05 s, sampled at 10 substeps per epoch
    const int per_epoch = 10;
    const double delta = 0.05, dt = delta / per_epoch;
    Trajectory t;
    for (int k = 0; k <= 8 * per_epoch; ++k) {
        const double s = k * dt;
        const bool outside = k >= 2 * per_epoch && k < 6 * per_epoch;
        t.push(s, k / per_epoch, Vec{outside ? -1.0 : 1.0}, Vec{0.0}, Location{}, 0.0, 0.0, false);
    }
    EXPECT_NEAR(integrate_cost(linear_h_spec({1.0}), t, 0.0, 8 * delta), 0.2, dt);
}

TEST(IntegrateCost, AdditiveAndMonotone) {
    const auto t = ramp([](double s) { return std::sin(7 * s) - 0.3; }, 2.0, 400);
    const auto spec = linear_h_spec({0.1, 1.0, 0.5});
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        double a = u(rng), b = u(rng), m = u(rng);
        double v[3] = {a, b, m};
        std::sort(v, v + 3);
        const double whole = integrate_cost(spec, t, v[0], v[2]);
        const double parts = integrate_cost(spec, t, v[0], v[1]) + integrate_cost(spec, t, v[1], v[2]);
        EXPECT_NEAR(whole, parts, 1e-9 * std::max(1.0, whole));
        EXPECT_GE(integrate_cost(spec, t, v[0], v[2]) + 1e-15, integrate_cost(spec, t, v[0], v[1]));
    }
    EXPECT_THROW(integrate_cost(spec, t, 0.0, 3.0), std::invalid_argument);
}

TEST(L1Integral, Examples) {
    EXPECT_NEAR(l1_integral(linear_h_spec({0.0, 1.0}), 0.4), 0.08, 1e-15);
    EXPECT_EQ(l1_integral(linear_h_spec({0.0, 1.0}), 0.0), 0.0);
    EXPECT_NEAR(l1_integral(linear_h_spec({1.0}), 0.4), 0.4, 1e-15);
    EXPECT_THROW(l1_integral(linear_h_spec({1.0}), -1.0), std::invalid_argument);
}

TEST(L1Integral, MatchesAdaptiveQuadrature) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> c(0.0, 3.0), dd(0.0, 2.0);
    std::uniform_int_distribution<int> deg(0, 5);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> a(static_cast<std::size_t>(deg(rng)) + 1);
        for (auto& x : a) x = c(rng);
        const auto spec = linear_h_spec(a);
        const double d = dd(rng);
        const double oracle = oracle::simpson([&](double s) { return spec.l1(s); }, 0.0, d, 1e-14);
        EXPECT_NEAR(l1_integral(spec, d), oracle, 1e-10 * std::max(1e-300, std::abs(oracle)));
    }
}

TEST(WorstCaseBound, Examples) {
    EXPECT_NEAR(worst_case_bound(linear_h_spec({0.0, 1.0}), 0.0, 0.4, 0.16, 4, 0.05), 0.072, 1e-15);
    EXPECT_EQ(worst_case_bound(linear_h_spec({0.0, 1.0}), 0.3, 0.0, 0.16, 4, 0.05), 0.0);
    EXPECT_NEAR(worst_case_bound(linear_h_spec({1.0}), 0.1, 0.1, 0.1, 2, 0.05), 0.1, 1e-15);
}

TEST(SafetySpec, ValidatesL1Shape) {
    EXPECT_NO_THROW(fx::spec_1d().validate());
    EXPECT_THROW((SafetySpec{fx::disk_1d(), {0.0, -1.0}, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((SafetySpec{fx::disk_1d(), {0.0, 1.0, -2.0}, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((SafetySpec{fx::disk_1d(), {0.0, 1.0}, -1.0}.validate()), std::invalid_argument);
}

TEST(ShiftedSets, Nesting) {
    const ShiftedSets s(0.2, 0.3);
    const auto h = fx::disk_1d();
    for (double x = -2.0; x <= 2.0; x += 0.01) {
        const double hv = h.eval(Vec{x});
        if (s.in_c1(hv)) { EXPECT_GE(hv, 0.0); }
        if (hv >= 0.0) { EXPECT_TRUE(s.in_d(hv)); }
        EXPECT_NEAR(s.h_c(h).eval(Vec{x}), hv - 0.2, 1e-15);
        EXPECT_NEAR(s.h_d(h).eval(Vec{x}), hv + 0.3, 1e-15);
    }
    EXPECT_THROW(ShiftedSets(-0.1, 0.0), std::invalid_argument);
}
