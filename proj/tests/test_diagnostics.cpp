#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mlchaos/circle_map.hpp"
#include "mlchaos/diagnostics.hpp"
#include "mlchaos/error.hpp"

using namespace mlchaos;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams delta3(double gamma = 0.01) {
    ModelParams p;
    p.c = 0.6;
    p.e = 0.2;
    p.omega = 0.3;
    p.gamma = gamma;
    return p;
}

ModelParams weak_saddle(double gamma = 1e-3) {
    ModelParams p;
    p.c = 0.55;
    p.e = 0.5;
    p.omega = 0.05;
    p.gamma = gamma;
    return p;
}

// Exact doubling-map orbit read off a random bit stream: x_n = 0.b_n b_{n+1} ...
std::vector<double> doubling_orbit(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> bits(n + 53);
    for (auto& b : bits) b = static_cast<int>(rng() & 1);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0, w = 0.5;
        for (int j = 0; j < 53; ++j, w *= 0.5) v += bits[i + j] * w;
        x[i] = v;
    }
    return x;
}

std::vector<double> rotation_orbit(std::size_t n, double alpha) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2 * kPi * alpha * static_cast<double>(i));
    return x;
}

}  // namespace

TEST(XStar, QuadraticCase) {
    const auto x = x_star(0.1, 2.0);
    ASSERT_TRUE(x);
    EXPECT_NEAR(*x, (1 - std::sqrt(0.6)) / 2, 1e-12);
    EXPECT_LT(2 * *x, 1.0);
    EXPECT_EQ(*x_star(0.0, 2.0), 0.0);
    EXPECT_TRUE(x_star(0.24, 2.0));
    EXPECT_FALSE(x_star(0.25, 2.0));
    EXPECT_FALSE(x_star(0.3, 2.0));
    EXPECT_THROW(x_star(0.1, 1.0), ValidationError);
}

TEST(XStar, FixedPointOfGeneralPower) {
    for (double delta : {1.1, 1.5, 3.0, 7.0})
        for (double g : {1e-6, 1e-3, 0.02}) {
            const auto x = x_star(g, delta);
            ASSERT_TRUE(x) << delta << " " << g;
            EXPECT_NEAR(std::pow(*x, delta) + g, *x, 1e-13);
            EXPECT_LT(delta * std::pow(*x, delta - 1), 1.0);
        }
}

TEST(Annulus, MarginMatchesDirectSampling) {
    const auto p = weak_saddle();
    const auto rep = annulus_check(p, 64, 8);
    ASSERT_TRUE(rep.defined);
    const auto d = derive_constants(p);
    EXPECT_NEAR(rep.hi - rep.lo, 4 * p.gamma * d.sqrt_a1, 1e-15);
    double worst = 1e300;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 64; ++j) {
            const double x = rep.lo + (rep.hi - rep.lo) * i / 7;
            const double s = j / 64.0;
            const double fx = std::pow(x, d.delta) + p.gamma * p.mu1 * (1 - d.sqrt_a1 * std::cos(2 * kPi * s));
            worst = std::min({worst, fx - rep.lo, rep.hi - fx});
        }
    EXPECT_NEAR(rep.worst_margin, worst, 1e-15);
    EXPECT_EQ(rep.invariant, worst >= 0);
}

TEST(Annulus, UndefinedCases) {
    EXPECT_FALSE(annulus_check(delta3(0.0)).defined);
    EXPECT_FALSE(annulus_check(delta3(0.2)).defined);
    EXPECT_FALSE(annulus_check(delta3(0.5)).defined);
    EXPECT_FALSE(annulus_check(delta3(0.5)).note.empty());
}

TEST(Annulus, FixedPointConsistencyAsForcingShrinks) {
    for (double g : {1e-3, 1e-4, 1e-5}) {
        const auto p = weak_saddle(g);
        const auto d = derive_constants(p);
        double mean = 0;
        for (int j = 0; j < 256; ++j) mean += case12_map({*d.x_star, j / 256.0, Modulus::Unit}, p).x / 256;
        EXPECT_LT(std::abs(mean - *d.x_star), 2 * g);
    }
}

TEST(Region, CurveValues) {
    EXPECT_NEAR(t1_curve(65, 0.3, 10), 0.4267497, 1e-7);
    EXPECT_NEAR(t2_curve(65, 0.3), 0.05121, 5e-6);
    EXPECT_NEAR(t1_curve(1e6, 1, 10), 1e-5 / 0.9, 1e-9);
    EXPECT_NEAR(t1_curve(1e-3, 1, 10), 1.0, 1e-12);
    EXPECT_NEAR(t2_curve(1e-9, 1), 1.0, 1e-12);
}

TEST(Region, CurvesDecreaseAndDoNotCross) {
    std::vector<double> xi;
    for (int i = 0; i < 100; ++i) xi.push_back(2 * std::pow(400.0, i / 99.0));
    const auto rows = region_curves(xi, 0.3, 10);
    ASSERT_EQ(rows.size(), 100u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_GT(rows[i].t1, rows[i].t2);
        if (i > 0) {
            EXPECT_LT(rows[i].t1, rows[i - 1].t1);
            EXPECT_LT(rows[i].t2, rows[i - 1].t2);
        }
    }
    EXPECT_THROW(region_curves(xi, 0.3, 2.0), ValidationError);
}

TEST(Region, Labels) {
    EXPECT_EQ(region_label(0.01, 0.4, 0.05), "I");
    EXPECT_EQ(region_label(0.5, 0.4, 0.05), "III");
    EXPECT_EQ(region_label(0.2, 0.4, 0.05), "II/IV");
}

TEST(Horseshoe, LargeTwistHolds) {
    const auto p = delta3();
    const auto h = horseshoe_condition(10, p);
    EXPECT_TRUE(h.holds);
    EXPECT_NEAR(h.t1, 0.4267497, 1e-7);
    EXPECT_NEAR(h.margin, derive_constants(p).sqrt_a1 - h.t1, 1e-15);
    EXPECT_THROW(horseshoe_condition(2.0, p), ValidationError);
}

TEST(Horseshoe, MarginContinuousInOmega) {
    auto p = delta3();
    double prev = 0;
    int flips = 0;
    bool have = false, last = false;
    for (int i = 0; i <= 400; ++i) {
        p.omega = 0.01 + 2.0 * i / 400;
        const auto h = horseshoe_condition(10, p);
        if (have) {
            EXPECT_LT(std::abs(h.margin - prev), 0.1);
            flips += h.holds != last;
        }
        prev = h.margin;
        last = h.holds;
        have = true;
    }
    EXPECT_LE(flips, 1);
}

TEST(Classify, Corners) {
    auto p = delta3(0.01);
    p.omega = 0.3;
    EXPECT_EQ(classify_regime(p).case_tag, 2);
    EXPECT_NEAR(classify_regime(p).gamma_pow, 1e-4, 1e-16);

    auto q = weak_saddle(0.01);
    EXPECT_EQ(classify_regime(q).case_tag, 1);
    EXPECT_NEAR(classify_regime(q).gamma_pow, std::pow(0.01, 0.1), 1e-12);
    EXPECT_EQ(classify_regime(q).attractor, "invariant closed curve");

    p.omega = 10;
    EXPECT_EQ(classify_regime(p).case_tag, 4);
    p.mu1 = 40;
    EXPECT_EQ(classify_regime(p).case_tag, 3);

    p.omega = 1;
    const auto r = classify_regime(p);
    EXPECT_FALSE(r.case_tag);
    EXPECT_EQ(r.attractor, "indeterminate regime");
}

TEST(Classify, CustomThresholds) {
    RegimeThresholds th;
    th.gamma_pow_tol = 1e-5;
    EXPECT_EQ(classify_regime(delta3(0.01), th).case_tag, 1);
    th.omega_small = 0.1;
    EXPECT_FALSE(classify_regime(delta3(0.01), th).case_tag);
}

TEST(Lyapunov2D, DeterminantIdentityOnRandomDraws) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ug(-5, -2), us(0, 1);
    for (int i = 0; i < 20; ++i) {
        const auto p = delta3(std::pow(10.0, ug(rng)));
        const auto l = lyapunov_2d({VariantKind::Case12}, {0.01, us(rng)}, 10000, p, 200);
        EXPECT_GE(l.lambda1, l.lambda2);
        EXPECT_LT(l.sum_residual, 1e-3);
        EXPECT_NEAR(l.lambda1 + l.lambda2, l.mean_log_det, 1e-3);
    }
}

TEST(Lyapunov2D, InvariantCurveIsNeutral) {
    const auto l = lyapunov_2d({VariantKind::Case12}, {1e-3, 0.2}, 20000, weak_saddle());
    EXPECT_LT(std::abs(l.lambda1), 1e-2);
    EXPECT_LT(l.lambda2, -0.05);
}

TEST(Lyapunov2D, Preconditions) {
    EXPECT_THROW(lyapunov_2d({VariantKind::Case12}, {0.01, 0.1}, 9999, delta3()), ValidationError);
}

TEST(Rotation, RigidRotationIsExact) {
    const auto r = rotation_interval(rigid_rotation(0.3), {0.0, 0.4}, 2000);
    EXPECT_NEAR(r.lo, 0.3, 1e-9);
    EXPECT_NEAR(r.hi, 0.3, 1e-9);
    EXPECT_TRUE(r.is_point);
    EXPECT_NEAR(r.seed_min, 0.3, 1e-9);
}

TEST(Rotation, InvertibleSineMapHasPointInterval) {
    for (double w : {0.1, 0.37, 0.61}) {
        const auto r = rotation_interval(sine_circle_map(w, 0.8), {0.0, 0.25, 0.5, 0.75}, 4000);
        EXPECT_TRUE(r.is_point) << w;
        EXPECT_GE(r.seed_min, r.lo - 1e-3);
        EXPECT_LE(r.seed_max, r.hi + 1e-3);
    }
}

TEST(Rotation, InflectionAtCriticalCouplingIsHandled) {
    // k = 1: h' = 1 + cos 2 pi s touches zero without changing sign.
    const auto r = rotation_interval(sine_circle_map(0.3, 1.0), {0.0, 0.5}, 4000);
    EXPECT_TRUE(r.is_point);
}

TEST(Rotation, NoninvertibleSineMapHasInterval) {
    const auto r = rotation_interval(sine_circle_map(0.5, 3.0), {0.1}, 4000);
    EXPECT_GT(r.width, 0.05);
    EXPECT_FALSE(r.is_point);
}

TEST(Rotation, TwistedPhaseMapDichotomy) {
    ModelParams p;
    p.c = 0.55;
    p.e = 0.5;
    p.omega = 10;
    p.gamma = 0.01;
    p.mu1 = 10;  // xi = 6.62 < 2 mu1
    EXPECT_TRUE(rotation_interval(case34_phase_map(p), {0.0, 0.5}, 4000).is_point);
    auto q = delta3(0.01);
    q.omega = 10;  // xi = 65 > 2 mu1
    EXPECT_GT(rotation_interval(case34_phase_map(q), {0.0, 0.5}, 4000).width, 0.01);
}

TEST(Rotation, RejectsHigherDegree) {
    EXPECT_THROW(rotation_interval(doubling_map(), {0.0}, 100), ValidationError);
}

TEST(ZeroOne, RegularAndChaoticFixtures) {
    EXPECT_LT(zero_one_test(rotation_orbit(5000, (std::sqrt(5.0) - 1) / 2), 32, 3).K, 0.1);
    EXPECT_GT(zero_one_test(doubling_orbit(5000, 11), 32, 3).K, 0.9);
}

TEST(ZeroOne, InvariantCurveOrbitIsRegular) {
    const auto p = weak_saddle();
    const auto orbit = iterate_map({VariantKind::Case12}, {1e-3, 0.1}, 6000, p);
    const std::vector<CylinderPoint> tail(orbit.begin() + 1000, orbit.end());
    EXPECT_LT(zero_one_test(phase_observable(tail, p), 32, 7).K, 0.1);
}

TEST(ZeroOne, PhaseObservableIsContinuousAcrossTheWrap) {
    const auto p = delta3();
    const auto obs = phase_observable({{0.1, 0.999999, Modulus::Unit}, {0.1, 0.0, Modulus::Unit},
                                       {0.1, kPi / 0.3 - 1e-9, Modulus::HalfPeriod}},
                                      p);
    EXPECT_NEAR(obs[0], obs[1], 1e-9);
    EXPECT_NEAR(obs[2], 1.0, 1e-9);
}

TEST(ZeroOne, DeterministicPerSeedAndValidated) {
    const auto x = doubling_orbit(2000, 2);
    EXPECT_EQ(zero_one_test(x, 16, 9).K_raw, zero_one_test(x, 16, 9).K_raw);
    EXPECT_EQ(zero_one_test(x, 16, 9).per_frequency.size(), 16u);
    EXPECT_THROW(zero_one_test(std::vector<double>(2000, 0.5), 8, 1), DomainError);
    EXPECT_THROW(zero_one_test(std::vector<double>(999, 0.5), 8, 1), ValidationError);
}

TEST(Autocorrelation, DoublingDecaysAtLogTwo) {
    const auto a = autocorrelation(doubling_orbit(200000, 4), 20);
    EXPECT_NEAR(a.rho[0], 1.0, 1e-12);
    EXPECT_NEAR(a.rho[1], 0.5, 0.02);
    EXPECT_NEAR(a.decay_rate, std::log(2.0), 0.1);
}

TEST(Autocorrelation, RotationDoesNotDecay) {
    const auto a = autocorrelation(rotation_orbit(20000, (std::sqrt(5.0) - 1) / 2), 50);
    EXPECT_LT(a.decay_rate, 0.01);
}

TEST(Autocorrelation, Preconditions) {
    EXPECT_THROW(autocorrelation(std::vector<double>(100, 1.0), 20), ValidationError);
    EXPECT_THROW(autocorrelation(std::vector<double>(1000, 1.0), 20), DomainError);
}

TEST(CurveFit, RecoversFourierCoefficients) {
    std::vector<CylinderPoint> pts;
    for (int i = 0; i < 500; ++i) {
        const double s = std::fmod(i * 0.618034, 1.0);
        pts.push_back({0.3 + 0.1 * std::cos(2 * kPi * s) - 0.05 * std::sin(4 * kPi * s), s, Modulus::Unit});
    }
    const auto f = fit_invariant_curve(pts, 3);
    ASSERT_EQ(f.coefficients.size(), 7u);
    EXPECT_NEAR(f.coefficients[0], 0.3, 1e-12);
    EXPECT_NEAR(f.coefficients[1], 0.1, 1e-12);
    EXPECT_NEAR(f.coefficients[2], 0.0, 1e-12);
    EXPECT_NEAR(f.coefficients[4], -0.05, 1e-12);
    EXPECT_LT(f.max_spread, 1e-12);
    EXPECT_THROW(fit_invariant_curve({pts[0], pts[1]}, 3), ValidationError);
}

TEST(Scan, SeedDependsOnlyOnGamma) {
    EXPECT_EQ(sample_seed(1, 0.01), sample_seed(1, 0.01));
    EXPECT_NE(sample_seed(1, 0.01), sample_seed(1, 0.02));
    EXPECT_NE(sample_seed(1, 0.01), sample_seed(2, 0.01));
}

TEST(Scan, OrderInvariantAndSummarised) {
    ScanOptions o;
    o.iterations = 10000;
    o.burn_in = 200;
    o.zo_length = 1000;
    o.n_c = 8;
    o.rotation_iterations = 500;
    std::vector<double> grid{3e-5, 2e-4, 1e-3, 7e-3};
    const auto a = density_scan(grid, delta3(), o, Execution::Serial);
    std::vector<double> shuffled{1e-3, 3e-5, 7e-3, 2e-4};
    const auto b = density_scan(shuffled, delta3(), o, Execution::Serial);
    ASSERT_EQ(a.samples.size(), 4u);
    EXPECT_EQ(a.fraction, b.fraction);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(a.samples[i].lambda1, b.samples[i].lambda1);
        EXPECT_EQ(a.samples[i].K, b.samples[i].K);
    }
    int chaotic = 0;
    for (const auto& s : a.samples) {
        EXPECT_TRUE(s.ok) << s.error;
        EXPECT_EQ(s.chaotic, s.lambda1 > o.lambda_tol && s.K > o.k_threshold);
        chaotic += s.chaotic;
    }
    EXPECT_DOUBLE_EQ(a.fraction, chaotic / 4.0);
    ASSERT_FALSE(a.prefixes.empty());
    EXPECT_EQ(a.prefixes.back().count, 4);
    for (std::size_t i = 1; i < a.prefixes.size(); ++i) EXPECT_GT(a.prefixes[i].r, a.prefixes[i - 1].r);
    EXPECT_EQ(b.grid, grid);
    EXPECT_THROW(density_scan({0.0, 1e-3}, delta3(), o, Execution::Serial), ValidationError);
    EXPECT_THROW(density_scan({1e-3, 1e-3}, delta3(), o, Execution::Serial), ValidationError);
}
