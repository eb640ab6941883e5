#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mlchaos/circle_map.hpp"
#include "mlchaos/error.hpp"
#include "mlchaos/singular_limit.hpp"
#include "oracles.hpp"

using namespace mlchaos;
using oracle::circle_gap;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams delta3() {
    ModelParams p;
    p.c = 0.6;
    p.e = 0.2;
    p.omega = 0.3;
    return p;
}

const double kKxi = 0.3 * (2.0 / 3.0) / kPi * 65;

}  // namespace

TEST(KMap, RoundTripAndSlope) {
    const auto p = delta3();
    EXPECT_NEAR(k_map(k_inverse(0.37, p), p), 0.37, 1e-12);
    EXPECT_NEAR(kKxi, 4.1380, 1e-4);
    EXPECT_NEAR(k_map(0.5, p), -kKxi * std::log(0.5), 1e-12);
    EXPECT_GT(k_map(0.1, p), k_map(0.5, p));
    EXPECT_THROW(k_map(0, p), DomainError);
}

TEST(GammaSequence, IntegerOffsets) {
    const auto p = delta3();
    for (int n = 13; n < 30; ++n) EXPECT_NEAR(gamma_sequence(n, 0, p), std::exp(-n / kKxi), 1e-15);
    EXPECT_NEAR(gamma_sequence(10, 0, p, 0.1), 0.0892, 1e-4);
    EXPECT_NEAR(std::log(gamma_sequence(10, 0, p, 0.1)), -2.4166, 1e-4);
}

TEST(GammaSequence, AdmissibilityBound) {
    const auto p = delta3();
    const int n0 = admissible_n0(p, 0.05);
    EXPECT_LT(gamma_sequence(n0, 0, p), 0.05);
    EXPECT_GE(std::exp(-(n0 - 1) / kKxi), 0.05);
    EXPECT_THROW(gamma_sequence(n0 - 1, 0.5, p), DomainError);
    EXPECT_THROW(gamma_sequence(n0, 1.0, p), DomainError);
    EXPECT_THROW(gamma_sequence(n0, -0.1, p), DomainError);
}

TEST(GammaSequence, DefiningPropertyAndMonotonicity) {
    const auto p = delta3();
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> un(13, 60);
    std::uniform_real_distribution<double> ua(0, 1);
    for (int i = 0; i < 50; ++i) {
        const int n = un(rng);
        const double a = ua(rng);
        const double g = gamma_sequence(n, a, p);
        const double k = k_map(g, p) - a;
        EXPECT_NEAR(k, std::round(k), 1e-10);
        EXPECT_LT(gamma_sequence(n + 1, a, p), g);
    }
}

TEST(CircleMap, RigidWhenCosineVanishes) {
    CircleMapSpec s{0.2, 0.3, 65, 1, 0};
    const CircleMap h = singular_limit_map(s);
    const double shift = 0.2 + 0.3 / kPi;
    for (int i = 0; i < 32; ++i) EXPECT_NEAR(circle_gap(h(i / 32.0), i / 32.0 + shift), 0.0, 1e-14);
    EXPECT_TRUE(critical_set(h).empty());
}

TEST(CircleMap, UnitDerivativeAtZeroAndHalf) {
    const CircleMap h = singular_limit_map(circle_spec(delta3(), 0.4));
    EXPECT_NEAR(h.d1(0.0), 1.0, 1e-14);
    EXPECT_NEAR(h.d1(0.5), 1.0, 1e-12);
}

TEST(CircleMap, LiftPropertyAndEquivariance) {
    const auto p = delta3();
    const CircleMap h = singular_limit_map(circle_spec(p, 0.1));
    const CircleMap g = singular_limit_map(circle_spec(p, 0.35));
    for (int i = 0; i < 1024; ++i) {
        const double s = i / 1024.0;
        EXPECT_NEAR(h.lift(s + 1) - h.lift(s), 1.0, 1e-12);
        EXPECT_NEAR(circle_gap(g(s), h(s) + 0.25), 0.0, 1e-12);
    }
}

TEST(CircleMap, DerivativesAgainstFiniteDifferences) {
    const CircleMap h = singular_limit_map(circle_spec(delta3(), 0.0));
    for (int i = 0; i < 50; ++i) {
        const double s = (i + 0.5) / 50, d = 1e-5;
        EXPECT_NEAR(h.d1(s), (h.lift(s + d) - h.lift(s - d)) / (2 * d), 1e-4 * std::max(1.0, std::abs(h.d1(s))));
        EXPECT_NEAR(h.d2(s), (h.d1(s + d) - h.d1(s - d)) / (2 * d), 1e-4 * std::max(1.0, std::abs(h.d2(s))));
    }
}

TEST(CircleMap, InvalidSpec) {
    EXPECT_THROW(singular_limit_map({0, 0.3, 65, 1, 1.0}), ValidationError);
    EXPECT_THROW(singular_limit_map({0, 0, 65, 1, 0.5}), ValidationError);
}

TEST(CriticalSet, SubcriticalSineMapIsDiffeomorphism) {
    EXPECT_TRUE(critical_set(sine_circle_map(0.1, 0.9)).empty());
    const auto crit = critical_set(sine_circle_map(0.1, 2.0));
    ASSERT_EQ(crit.size(), 2u);
    // h' = 1 + k cos 2 pi s vanishes where cos 2 pi s = -1/k.
    const double s0 = std::acos(-0.5) / (2 * kPi);
    EXPECT_NEAR(crit[0].s, s0, 1e-10);
    EXPECT_NEAR(crit[1].s, 1 - s0, 1e-10);
}

TEST(CriticalSet, LargeTwistHasTurnPair) {
    const auto p = delta3();
    const auto crit = critical_set(singular_limit_map(circle_spec(p, 0.0)));
    ASSERT_EQ(crit.size(), 2u);
    EXPECT_NE(crit[0].d2 > 0, crit[1].d2 > 0);
    const CircleMap h = singular_limit_map(circle_spec(p, 0.0));
    for (const auto& c : crit) EXPECT_NEAR(h.d1(c.s), 0.0, 1e-10);
    // Oracle: sign changes of h' on a grid eight times finer.
    int changes = 0;
    const int n = 1 << 15;
    for (int i = 0; i < n; ++i) changes += (h.d1(double(i) / n) > 0) != (h.d1(double(i + 1) / n) > 0);
    EXPECT_EQ(changes, 2);
}

TEST(CriticalSet, IndependentOfOffset) {
    const auto p = delta3();
    const auto c0 = critical_set(singular_limit_map(circle_spec(p, 0.0)));
    const auto c1 = critical_set(singular_limit_map(circle_spec(p, 0.77)));
    ASSERT_EQ(c0.size(), c1.size());
    for (std::size_t i = 0; i < c0.size(); ++i) EXPECT_NEAR(c0[i].s, c1[i].s, 1e-12);
}

TEST(CriticalSet, DegenerateTurnRejected) {
    CircleMap m;
    m.lift = [](double s) { return s; };
    m.d1 = [](double s) { return std::pow(s - 0.3, 3); };
    m.d2 = [](double s) { return 3 * std::pow(s - 0.3, 2); };
    EXPECT_THROW(critical_set(m), NumericError);
}

TEST(Convergence, TableShrinksAlongSequence) {
    const auto p = delta3();
    const double a = 0.3;
    const int n0 = admissible_n0(p, 0.05);
    const auto rows = singular_limit_convergence(n0, n0 + 7, a, p);
    ASSERT_EQ(rows.size(), 8u);
    const double q = std::sqrt(0.5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double gp = std::pow(rows[i].gamma, 2.0 / 3.0);
        EXPECT_NEAR(rows[i].sup_f1, gp * (std::pow(rows[i].x_top, 3) + 1 + q), 1e-14);
        if (i > 0) {
            EXPECT_LT(rows[i].total, rows[i - 1].total);
            EXPECT_NEAR(rows[i].sup_f1 / rows[i - 1].sup_f1, std::exp(-(2.0 / 3.0) / kKxi), 0.05 * std::exp(-(2.0 / 3.0) / kKxi));
        }
    }
}

TEST(Convergence, ExactAtTheBoundary) {
    ConvergenceOptions o;
    o.x_max = 0;
    o.x_points = 1;
    const auto rows = singular_limit_convergence(20, 20, 0.3, delta3(), o);
    EXPECT_LT(rows[0].sup_f2, 1e-13);
}

TEST(Misiurewicz, DoublingPassesVacuously) {
    const auto c = misiurewicz_check(doubling_map());
    EXPECT_TRUE(c.critical.empty());
    EXPECT_NEAR(c.lambda0, std::log(2.0), 1e-12);
    EXPECT_EQ(c.critical_orbits.verdict, Verdict::Vacuous);
    EXPECT_TRUE(c.passes());
    EXPECT_TRUE(c.finite_horizon);
    const auto t = transition_matrix(doubling_map(), c.lambda0);
    EXPECT_FALSE(t.applicable);
    ASSERT_TRUE(t.lambda_condition);
    EXPECT_FALSE(*t.lambda_condition);  // 2^(1/3) < 2
}

TEST(Misiurewicz, RotationFailsExpansion) {
    const auto c = misiurewicz_check(rigid_rotation(0.1234));
    EXPECT_EQ(c.outside_a.verdict, Verdict::Fail);
    EXPECT_FALSE(c.passes());
}

TEST(Misiurewicz, LargeTwistReportsEveryCondition) {
    const auto c = misiurewicz_check(singular_limit_map(circle_spec(delta3(), 0.3)));
    EXPECT_EQ(c.critical.size(), 2u);
    EXPECT_EQ(c.U.size(), 2u);
    for (const auto* r : {&c.outside_a, &c.outside_b, &c.critical_orbits, &c.inside_a, &c.inside_b})
        EXPECT_NE(r->verdict, Verdict::Vacuous);
    EXPECT_EQ(c.inside_a.verdict, Verdict::Pass);  // h'' keeps its sign near nondegenerate turns
}

TEST(TransitionMatrix, FullBranchFixture) {
    const auto t = transition_matrix(sine_circle_map(0.0, 20.0));
    ASSERT_TRUE(t.applicable);
    for (const auto& row : t.Q)
        for (int v : row) EXPECT_EQ(v, 1);
    ASSERT_TRUE(t.N);
    EXPECT_EQ(*t.N, 1);
}

TEST(TransitionMatrix, AgreesWithSampledImages) {
    const CircleMap h = singular_limit_map(circle_spec(delta3(), 0.3));
    const auto t = transition_matrix(h);
    const std::size_t r = t.intervals.size();
    ASSERT_EQ(r, 2u);
    for (std::size_t i = 0; i < r; ++i) {
        const auto& J = t.intervals[i];
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k <= 20000; ++k) {
            const double y = h.lift(J.lo + (J.hi - J.lo) * k / 20000.0);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        for (std::size_t m = 0; m < r; ++m) {
            const auto& K = t.intervals[m];
            bool inside = hi - lo >= 1;
            for (int shift = -200; shift <= 200 && !inside; ++shift)
                inside = K.lo + shift >= lo - 1e-9 && K.hi + shift <= hi + 1e-9;
            EXPECT_EQ(t.Q[i][m], inside ? 1 : 0) << i << "," << m;
        }
    }
}

TEST(Lyapunov1D, Fixtures) {
    EXPECT_NEAR(lyapunov_1d(rigid_rotation(0.3), 0.1, 5000).lambda, 0.0, 1e-6);
    EXPECT_NEAR(lyapunov_1d(doubling_map(), 0.1, 5000).lambda, std::log(2.0), 1e-3);
    EXPECT_THROW(lyapunov_1d(doubling_map(), 0.1, 999), ValidationError);
}

TEST(Lyapunov1D, SeedsAgreeOnLargeTwist) {
    const CircleMap h = singular_limit_map(circle_spec(delta3(), 0.3));
    const double l1 = lyapunov_1d(h, 0.11, 200000).lambda;
    const double l2 = lyapunov_1d(h, 0.47, 200000).lambda;
    const double l3 = lyapunov_1d(h, 0.83, 200000).lambda;
    EXPECT_GT(l1, 0);
    EXPECT_NEAR(l1, l2, 1e-2 * std::max(1.0, l1));
    EXPECT_NEAR(l1, l3, 1e-2 * std::max(1.0, l1));
}

TEST(Battery, LargeTwistInstance) {
    const auto p = delta3();
    const auto rep = hypothesis_battery(p, admissible_n0(p, 0.05), 0.3);
    ASSERT_EQ(rep.results.size(), 7u);
    for (int i = 0; i < 7; ++i) EXPECT_EQ(rep.results[i].name, "H" + std::to_string(i + 1));
    EXPECT_EQ(rep.get("H4").verdict, rep.certificate.passes() ? Verdict::Pass : Verdict::Fail);
    EXPECT_TRUE(rep.transitions.applicable);
    const auto& h1 = rep.get("H1");
    ASSERT_TRUE(h1.reference);
    EXPECT_LE(h1.value, *h1.reference * (1 + 1e-10));
    EXPECT_EQ(rep.get("H2").verdict, Verdict::Pass);
    EXPECT_EQ(rep.get("H3").verdict, Verdict::Pass);
    // The x-derivative of the first component vanishes at x = 0 when delta > 1,
    // while the stated value is 1; the battery reports the computed value.
    const auto& h6 = rep.get("H6");
    EXPECT_EQ(h6.value, 0.0);
    ASSERT_TRUE(h6.reference);
    EXPECT_EQ(*h6.reference, 1.0);
    EXPECT_EQ(h6.verdict, Verdict::Fail);
    EXPECT_THROW(rep.get("H9"), ValidationError);
}
