#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "simland/errors.hpp"
#include "simland/loss.hpp"
#include "simland/sparse_reg.hpp"
#include "test_util.hpp"

using namespace simland;
using simland::testing::random_matrix;
using simland::testing::random_vector;

namespace {

/** Projection onto the L1 ball by bisection on the soft threshold. */
Vector bisect_l1_projection(const Vector& v, double radius) {
    if (norm1(v) <= radius) return v;
    double lo = 0.0, hi = norm_inf(v);
    auto shrink = [&](double t) {
        Vector out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::copysign(std::max(std::abs(v[i]) - t, 0.0), v[i]);
        return out;
    };
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (norm1(shrink(mid)) > radius ? lo : hi) = mid;
    }
    return shrink(hi);
}

FgsConfig random_config(Rng& rng) {
    FgsConfig cfg;
    cfg.c_w = rng.uniform(0.2, 3.0);
    cfg.tolerance = rng.uniform(1e-3, 0.05);
    cfg.beta = rng.uniform(2.0, 50.0);
    cfg.tube = rng.uniform(0.0, 0.2);
    cfg.max_sparsity = 1 + rng.index(12);
    cfg.variant = rng.uniform() < 0.5 ? FgsVariant::plain : FgsVariant::fully_corrective;
    cfg.surrogate = rng.uniform() < 0.5 ? FgsSurrogate::smoothed_eps : FgsSurrogate::squared;
    cfg.corrective_steps = 50;
    return cfg;
}

} // namespace

TEST(SparseReg, ZeroTargetsStopImmediately) {
    Rng rng(1);
    Matrix x = random_matrix(rng, 20, 4);
    Vector y(20, 0.0);
    FgsResult r = fit_fgs(x, y, FgsConfig{});
    EXPECT_TRUE(r.trace.steps.empty());
    EXPECT_TRUE(r.trace.converged);
    EXPECT_EQ(r.trace.final_delta, 0.0);
    EXPECT_EQ(sparsity(r.model), 0u);
    EXPECT_EQ(r.model.diagnostics.iterations, 0u);
}

TEST(SparseReg, DefaultStepBudget) {
    FgsConfig cfg;
    cfg.c_w = 1.0;
    cfg.tolerance = 1.0;
    EXPECT_EQ(cfg.steps(), 8u);
    cfg.c_w = 2.0;
    cfg.tolerance = 0.5;
    EXPECT_EQ(cfg.steps(), 128u);
    cfg.max_sparsity = 5;
    EXPECT_EQ(cfg.steps(), 5u);
    cfg.max_sparsity = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(SparseReg, OneDimensionalFullyCorrective) {
    Matrix x{{1.0}};
    Vector y{0.9};
    FgsConfig cfg;
    cfg.c_w = 1.0;
    cfg.tolerance = 1e-6;
    cfg.variant = FgsVariant::fully_corrective;
    cfg.surrogate = FgsSurrogate::squared;
    FgsResult r = fit_fgs(x, y, cfg);
    ASSERT_FALSE(r.trace.steps.empty());
    EXPECT_EQ(r.trace.steps.front().coordinate, 0u);
    EXPECT_NEAR(r.model.w[0], 0.9, 1e-9);
    EXPECT_LT(squared(predict(r.model, x.row(0)), 0.9), 1e-6);
}

TEST(SparseReg, PlainVariantFollowsUpdateRule) {
    // one step by hand: w0 = 0, theta = mean g_i x_i, r = argmax |theta|
    Matrix x{{1.0, 0.5}, {-0.5, 1.0}, {0.2, -0.3}};
    Vector y{1.0, -1.0, 0.5};
    FgsConfig cfg;
    cfg.c_w = 2.0;
    cfg.beta = 5.0;
    cfg.tube = 0.1;
    cfg.tolerance = 1e-9;
    cfg.max_sparsity = 1;
    Vector theta(2, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        double g = smoothed_eps_grad(0.0, y[i], 0.1, 5.0);
        for (std::size_t j = 0; j < 2; ++j) theta[j] += g * x(i, j) / 3.0;
    }
    std::size_t r = std::abs(theta[0]) >= std::abs(theta[1]) ? 0 : 1;
    double delta = 2.0 * std::abs(theta[r]);
    double eta = std::min(1.0, delta / (4.0 * 4.0 * 5.0));
    FgsResult fit = fit_fgs(x, y, cfg);
    ASSERT_EQ(fit.trace.steps.size(), 1u);
    EXPECT_EQ(fit.trace.steps[0].coordinate, r);
    EXPECT_NEAR(fit.trace.steps[0].delta, delta, 1e-15);
    EXPECT_NEAR(fit.trace.steps[0].eta, eta, 1e-15);
    EXPECT_NEAR(fit.model.w[r], eta * (theta[r] < 0 ? 2.0 : -2.0), 1e-15);
    EXPECT_EQ(fit.model.w[1 - r], 0.0);
}

TEST(SparseReg, TieBreaksToLowestIndex) {
    Matrix x{{1.0, 1.0, 1.0}};
    Vector y{1.0};
    FgsConfig cfg;
    cfg.max_sparsity = 1;
    FgsResult r = fit_fgs(x, y, cfg);
    ASSERT_EQ(r.trace.steps.size(), 1u);
    EXPECT_EQ(r.trace.steps[0].coordinate, 0u);
}

TEST(SparseReg, TraceInvariantsOnRandomProblems) {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.index(30), d = 1 + rng.index(15);
        Matrix x = random_matrix(rng, n, d);
        Vector y = random_vector(rng, n, -2, 2);
        FgsConfig cfg = random_config(rng);
        FgsResult r = fit_fgs(x, y, cfg);
        EXPECT_LE(r.trace.steps.size(), cfg.steps());
        for (const auto& s : r.trace.steps) {
            EXPECT_LE(s.l1_norm, cfg.c_w * (1 + 1e-12));
            EXPECT_LE(s.nonzeros, s.t);
            EXPECT_TRUE(std::isfinite(s.delta));
            EXPECT_GE(s.delta, 0.0);
        }
        EXPECT_LE(norm1(r.model.w), cfg.c_w * (1 + 1e-12));
        EXPECT_LE(sparsity(r.model), r.model.diagnostics.iterations);
    }
}

TEST(SparseReg, PlainObjectiveNonIncreasing) {
    // with |x_ij| <= 1 the smoothed risk is beta-smooth in the L1 geometry, so each step decreases it
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 5 + rng.index(20), d = 2 + rng.index(8);
        Matrix x = random_matrix(rng, n, d);
        Vector y = random_vector(rng, n, -1, 1);
        FgsConfig cfg;
        cfg.c_w = rng.uniform(0.5, 2.0);
        cfg.beta = rng.uniform(1.0, 20.0);
        cfg.tube = 0.05;
        cfg.tolerance = 1e-6;
        cfg.max_sparsity = 40;
        FgsResult r = fit_fgs(x, y, cfg);
        double prev = surrogate_risk(Vector(d, 0.0), x, y, cfg);
        for (const auto& s : r.trace.steps) {
            if (s.eta < 1.0) EXPECT_LE(s.objective, prev + 1e-12);
            prev = s.objective;
        }
    }
}

TEST(SparseReg, GradientMatchesFiniteDifferences) {
    Rng rng(4);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng.index(10), d = 1 + rng.index(5);
        Matrix x = random_matrix(rng, n, d);
        Vector y = random_vector(rng, n);
        FgsConfig cfg;
        cfg.beta = rng.uniform(1, 20);
        cfg.tube = rng.uniform(0, 0.3);
        cfg.surrogate = rng.uniform() < 0.5 ? FgsSurrogate::squared : FgsSurrogate::smoothed_eps;
        Vector w = random_vector(rng, d);
        Vector g = surrogate_gradient(w, x, y, cfg);
        for (std::size_t j = 0; j < d; ++j) {
            Vector wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            double fd = (surrogate_risk(wp, x, y, cfg) - surrogate_risk(wm, x, y, cfg)) / (2 * h);
            EXPECT_LE(std::abs(fd - g[j]), 1e-5 * std::max(1.0, std::abs(fd)) + cfg.beta * h * norm_inf(x.data()));
        }
    }
}

TEST(SparseReg, SmallProblemsReachGridMinimum) {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        std::size_t n = 10, d = 2 + rng.index(2);
        Matrix x = random_matrix(rng, n, d);
        Vector y = random_vector(rng, n);
        FgsConfig cfg;
        cfg.c_w = 1.0;
        cfg.tolerance = 0.1;
        cfg.beta = 10.0;
        cfg.tube = 0.1;
        FgsResult r = fit_fgs(x, y, cfg);
        double grid = simland::testing::l1_grid_minimum(
            d, 1.0, 0.05, [&](const Vector& w) { return surrogate_risk(w, x, y, cfg); });
        EXPECT_LE(r.model.diagnostics.objective, grid + cfg.tolerance);
    }
}

TEST(SparseReg, L1Projection) {
    Rng rng(6);
    for (int trial = 0; trial < 500; ++trial) {
        Vector v = random_vector(rng, 1 + rng.index(8), -3, 3);
        double radius = rng.uniform(0.1, 4);
        Vector p = project_l1_ball(v, radius);
        Vector q = bisect_l1_projection(v, radius);
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-9);
        EXPECT_LE(norm1(p), radius * (1 + 1e-12));
    }
}

TEST(SparseReg, Sparsity) {
    LinearModel m;
    m.w = {0, 0, 0};
    EXPECT_EQ(sparsity(m), 0u);
    m.w = {0, 3, 0};
    EXPECT_EQ(sparsity(m), 1u);
    m.w = {1e-13, -1e-11, 0.5, 0};
    EXPECT_EQ(sparsity(m), 2u);
}

TEST(SparseReg, TraceCsv) {
    FgsTrace t;
    t.steps.push_back({1, 3, 0.5, 0.25, 0.125, 1.0, 1});
    std::ostringstream out;
    write_trace_csv(out, t);
    EXPECT_EQ(out.str(), "t,r_t,delta_t,eta_t,objective\n1,3,0.5,0.25,0.125\n");
}

TEST(SparseReg, Names) {
    EXPECT_EQ(parse_fgs_variant("fully-corrective"), FgsVariant::fully_corrective);
    EXPECT_EQ(parse_fgs_surrogate("smoothed-eps"), FgsSurrogate::smoothed_eps);
    EXPECT_EQ(to_string(FgsVariant::plain), "plain");
    EXPECT_THROW(parse_fgs_variant("lasso"), ConfigError);
}
