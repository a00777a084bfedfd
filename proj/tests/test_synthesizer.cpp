#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace cra;

namespace {

ControlAffineSystem integrator() { return fx::scalar(0.0, 1.0); }

SynthesisConfig one_d_config() {
    SynthesisConfig cfg;
    cfg.n_epochs = 2;
    return cfg;
}

// For x' = u, h = 1 - x^2 and u = Kx: the best rate on the annulus with |Kx| <= u_max on D.
// Returns the largest theta over a fine K grid, or 0 if no K works.
double oracle_theta(double c, double d, double u_max, double input_margin) {
    const double x_inner2 = 1.0 - c;  // annulus is 1 - c < x^2 <= 1 + d
    const double x_outer = std::sqrt(1.0 + d);
    double best = 0.0;
    for (int k = 0; k <= 400000; ++k) {
        const double gain = -4.0 + 1e-5 * k;
        if (std::abs(gain) * x_outer > u_max * (1.0 - input_margin)) continue;
        // 5c on C1 holds for every K <= 0; the annulus rate is -2K x^2 >= (c+d) theta
        if (gain > 0.0) continue;
        best = std::max(best, -2.0 * gain * x_inner2 / (c + d));
    }
    return best;
}

}  // namespace

TEST(MaximizeTheta, OneDimensionalAgainstOracle) {
    const auto cfg = one_d_config();
    const auto r = maximize_theta(integrator(), fx::spec_1d(), 0.5, 0.5, cfg);
    ASSERT_TRUE(r.feasible) << r.diagnostic;
    const double oracle = oracle_theta(0.5, 0.5, 1.0, 0.0);
    EXPECT_NEAR(oracle, 1.0 / std::sqrt(1.5), 1e-4);
    EXPECT_LE(r.theta, oracle);
    EXPECT_GE(r.theta, 0.8 * oracle);
    EXPECT_LT(r.gain(0, 0), 0.0);
    EXPECT_TRUE(r.v5b.combined().certified());
    EXPECT_TRUE(r.v5c.combined().certified());
}

TEST(MaximizeTheta, NoControlAuthorityIsInfeasible) {
    const auto r = maximize_theta(fx::scalar(1.0, 0.0), fx::spec_1d(), 0.5, 0.5, one_d_config());
    EXPECT_FALSE(r.feasible);
    EXPECT_FALSE(r.diagnostic.empty());
}

TEST(MaximizeTheta, ZeroShiftUsesThetaCap) {
    const auto cfg = one_d_config();
    const auto r = maximize_theta(integrator(), fx::spec_1d(), 0.0, 0.0, cfg);
    ASSERT_TRUE(r.feasible) << r.diagnostic;
    EXPECT_EQ(r.theta, cfg.theta_cap);
}

TEST(MaximizeTheta, DegenerateAnnulusSkipped) {
    // X = [-0.5, 0.5] never reaches the annulus around |x| = 1
    const auto sys = fx::scalar(0.0, 1.0, 0.5);
    const auto r = maximize_theta(sys, fx::spec_1d(), 0.01, 0.01, one_d_config());
    EXPECT_FALSE(r.feasible);
    EXPECT_NE(r.diagnostic.find("degenerate"), std::string::npos);
}

TEST(MaximizeThetaProperty, WitnessesLowerTheOptimum) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int multi_round = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const Matrix a{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const Matrix b{{u(rng)}, {u(rng)}};
        const auto sys = ControlAffineSystem::linear(a, b, Box::symmetric(2, 1.0), Box::symmetric(1, 2.0), 0.05);
        const MultiPoly h = MultiPoly::constant(2, 0.5) - fx::x_(2, 0) * fx::x_(2, 0) - fx::x_(2, 1) * fx::x_(2, 1);
        const SafetySpec spec{h, {0.0, 1.0}, 1.0};
        SynthesisConfig cfg;
        cfg.sample_count = 60;
        cfg.min_annulus_samples = 20;
        cfg.lp_margin = 0.0;
        cfg.seed = static_cast<std::uint64_t>(trial);
        const auto r = maximize_theta(sys, spec, 0.1, 0.1, cfg);
        if (r.t_history.size() > 1) ++multi_round;
        for (std::size_t k = 1; k < r.t_history.size(); ++k)
            EXPECT_LT(r.t_history[k], r.t_history[k - 1]) << "trial " << trial << " round " << k;
    }
    EXPECT_GT(multi_round, 0);
}

TEST(Synthesize, OneDimensionalFixture) {
    const auto cfg = one_d_config();
    const auto out = synthesize(integrator(), fx::spec_1d(), cfg);
    ASSERT_TRUE(out.result.has_value());
    const auto& r = *out.result;
    EXPECT_LE(out.iterations, out.iteration_bound);
    EXPECT_EQ(out.iteration_bound, synthesis_iteration_bound(1.0, 3.0, 0.05, 0.05));
    EXPECT_NEAR(out.c_max, 1.0, 1e-12);
    EXPECT_NEAR(out.d_max, 3.0, 1e-12);
    // 5a needs d / (N delta) >= 2 sqrt(1 + d); the first grid point meeting it is d = 0.25
    EXPECT_EQ(r.c, 0.0);
    EXPECT_NEAR(r.d, 0.25, 1e-12);
    EXPECT_LT(r.gain(0, 0), 0.0);
    const double oracle = oracle_theta(r.c, r.d, 1.0, 0.0);
    EXPECT_LE(r.theta, oracle);
    EXPECT_GE(r.theta, 0.8 * oracle);
    EXPECT_LT(r.tau, cfg.tau_max);
    EXPECT_EQ(r.budget.ok, true);
    EXPECT_EQ(r.budget.slack, check_budget_inequality(fx::spec_1d(), r.c, r.d, cfg.n_epochs, 0.05, r.theta).slack);
    EXPECT_EQ(out.trace.back().stage, "accepted");
}

TEST(Synthesize, ResultReverifiesAtDoubledResolution) {
    const auto cfg = one_d_config();
    const auto out = synthesize(integrator(), fx::spec_1d(), cfg);
    ASSERT_TRUE(out.result.has_value());
    const auto& r = *out.result;
    const auto chk = verify_certificate(integrator(), fx::spec_1d(), r.c, r.d, r.tau, r.gain, cfg.n_epochs, cfg.alpha,
                                        std::nullopt, cfg.verifier.doubled());
    EXPECT_FALSE(chk.any_falsified());
    EXPECT_TRUE(chk.budget.ok);
}

TEST(Synthesize, ZeroBudgetForcesStrictBranch) {
    auto cfg = one_d_config();
    const auto spec = fx::spec_1d(0.0);
    const auto out = synthesize(integrator(), spec, cfg);
    EXPECT_EQ(out.d_max, 0.0);
    for (const auto& row : out.trace) EXPECT_EQ(row.d, 0.0);
    if (out.result) { EXPECT_EQ(out.result->d, 0.0); }
}

TEST(Synthesize, ExhaustionCountsEveryGridPoint) {
    auto cfg = one_d_config();
    cfg.c_max = 0.3;
    cfg.d_max = 0.4;
    cfg.eps_c = 0.1;
    cfg.eps_d = 0.1;
    const auto out = synthesize(fx::scalar(1.0, 0.0), fx::spec_1d(), cfg);
    EXPECT_FALSE(out.result.has_value());
    EXPECT_EQ(out.iterations, out.iteration_bound);
    EXPECT_EQ(out.iteration_bound, 4 * 5);

    cfg.eps_c = 0.05;
    cfg.eps_d = 0.05;
    const auto fine = synthesize(fx::scalar(1.0, 0.0), fx::spec_1d(), cfg);
    EXPECT_EQ(fine.iterations, fine.iteration_bound);
    EXPECT_LE(fine.iterations, 4 * out.iterations + 2 * (4 + 5) + 1);
}

TEST(Synthesize, TauLimitProducesNearMiss) {
    auto cfg = one_d_config();
    cfg.tau_max = 1e-3;
    cfg.c_max = 0.0;
    cfg.d_max = 0.5;
    const auto out = synthesize(integrator(), fx::spec_1d(), cfg);
    EXPECT_FALSE(out.result.has_value());
    ASSERT_TRUE(out.near_miss.has_value());
    EXPECT_GT(out.near_miss->theta, 0.0);
    EXPECT_EQ(out.trace.back().stage, "tau");
}

TEST(Synthesize, BitIdenticalAcrossRuns) {
    const auto a = synthesize(integrator(), fx::spec_1d(), one_d_config());
    const auto b = synthesize(integrator(), fx::spec_1d(), one_d_config());
    ASSERT_TRUE(a.result && b.result);
    EXPECT_EQ(a.result->gain, b.result->gain);
    EXPECT_EQ(a.result->theta, b.result->theta);
}

TEST(SynthesisConfig, Validation) {
    SynthesisConfig c;
    c.eps_c = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SynthesisConfig{};
    c.lp_margin = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}
