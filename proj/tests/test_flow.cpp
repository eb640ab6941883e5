#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mlchaos/error.hpp"
#include "mlchaos/flow.hpp"
#include "mlchaos/return_map.hpp"

using namespace mlchaos;

namespace {

ModelParams delta3(double gamma = 0) {
    ModelParams p;
    p.c = 0.6;
    p.e = 0.2;
    p.omega = 0.3;
    p.gamma = gamma;
    return p;
}

// Independent transcription of the forced system.
Vec3 oracle_field(double x, double y, double z, double t, const ModelParams& p) {
    const double r = x + y + z;
    const double f = std::sin(2 * p.omega * t);
    return {x * ((1 - r) - p.c * y + p.e * z) + p.gamma * (1 - x) * f * f,
            y * ((1 - r) - p.c * z + p.e * x), z * ((1 - r) - p.c * x + p.e * y)};
}

}  // namespace

TEST(VectorField, OriginIsEquilibrium) {
    const Vec3 v = vector_field({0, 0, 0, 0}, delta3());
    EXPECT_EQ(v, (Vec3{0, 0, 0}));
}

TEST(VectorField, PlusO1PersistsUnderForcing) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(0, 100), g(0, 0.1);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v = vector_field({1, 0, 0, t(rng)}, delta3(g(rng)));
        EXPECT_EQ(v, (Vec3{0, 0, 0}));
    }
}

TEST(VectorField, ForcingMovesO3) {
    auto p = delta3(0.1);
    const double t = std::numbers::pi / (4 * p.omega);  // sin^2(2 omega t) = 1
    const Vec3 v = vector_field({0, 0, 1, t}, p);
    EXPECT_NEAR(v[0], 0.1, 1e-15);
    EXPECT_EQ(v[1], 0.0);
    EXPECT_EQ(v[2], 0.0);
}

TEST(VectorField, MatchesTranscription) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    const auto p = delta3(0.03);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng), y = u(rng), z = u(rng), t = 10 * u(rng);
        const Vec3 a = vector_field({x, y, z, t}, p), b = oracle_field(x, y, z, t, p);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-15);
    }
}

TEST(VectorField, JacobianAgainstFiniteDifferences) {
    const auto p = delta3(0.02);
    const FlowState s{0.3, 0.2, 0.4, 1.7};
    const Mat3 J = field_jacobian(s, p);
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
        FlowState a = s, b = s;
        (j == 0 ? a.x : j == 1 ? a.y : a.z) += h;
        (j == 0 ? b.x : j == 1 ? b.y : b.z) -= h;
        const Vec3 fa = vector_field(a, p), fb = vector_field(b, p);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(J[i][j], (fa[i] - fb[i]) / (2 * h), 1e-8);
    }
}

TEST(Integrate, EquilibriumIsStationary) {
    const auto tr = integrate({1, 0, 0, 0}, 50, delta3(0.05));
    const auto& f = tr.samples.back();
    EXPECT_NEAR(f.x, 1, 1e-12);
    EXPECT_EQ(f.y, 0);
    EXPECT_EQ(f.z, 0);
}

TEST(Integrate, InvariantPlaneStaysExact) {
    const auto tr = integrate({0.3, 0.4, 0, 0}, 200, delta3());
    for (const auto& s : tr.samples) ASSERT_EQ(s.z, 0.0);
}

TEST(Integrate, ApproachesTheCycle) {
    IntegrateOptions o;
    o.coordinates = Coordinates::Log;
    o.control.max_step = 1.0;
    const auto tr = integrate({0.3, 0.2, 0.1, 0}, 600, delta3(), o);
    bool visited[3] = {false, false, false};
    for (const auto& s : tr.samples) {
        visited[0] = visited[0] || s.x > 0.95;
        visited[1] = visited[1] || s.y > 0.95;
        visited[2] = visited[2] || s.z > 0.95;
    }
    EXPECT_TRUE(visited[0] && visited[1] && visited[2]);
    const auto& f = tr.samples.back();
    EXPECT_GT(std::max({f.x, f.y, f.z}), 0.9);
    EXPECT_LT(std::min({f.x, f.y, f.z}), 1e-20);
}

TEST(Integrate, ForwardThenBackward) {
    const auto p = delta3(0.01);
    const FlowState s0{0.2, 0.3, 0.4, 0};
    const auto fwd = integrate(s0, 1.0, p);
    const auto back = integrate(fwd.samples.back(), 0.0, p);
    const auto& r = back.samples.back();
    EXPECT_NEAR(r.x, s0.x, 1e-8);
    EXPECT_NEAR(r.y, s0.y, 1e-8);
    EXPECT_NEAR(r.z, s0.z, 1e-8);
}

TEST(Integrate, DenseInterpolationMatchesSamples) {
    const auto tr = integrate({0.2, 0.3, 0.4, 0}, 10, delta3(0.01));
    ASSERT_GT(tr.samples.size(), 3u);
    const auto mid = tr.at(tr.samples[2].t);
    EXPECT_NEAR(mid.x, tr.samples[2].x, 1e-12);
    EXPECT_THROW(tr.at(11), DomainError);
}

TEST(Integrate, LogModeNeedsPositiveStart) {
    IntegrateOptions o;
    o.coordinates = Coordinates::Log;
    EXPECT_THROW(integrate({0.3, 0, 0.3, 0}, 1, delta3(), o), ValidationError);
}

TEST(Equilibria, TabulatedSpectrum) {
    const auto recs = equilibria_spectrum(delta3());
    ASSERT_EQ(recs.size(), 6u);
    const auto& o1 = recs[0];
    EXPECT_EQ(o1.label, "+O1");
    EXPECT_NEAR(o1.eigenvalues[0], 0.2, 1e-12);
    EXPECT_NEAR(o1.eigenvalues[1], -1.0, 1e-12);
    EXPECT_NEAR(o1.eigenvalues[2], -0.6, 1e-12);
    // Expanding direction of +O1 is ((1+c)/(1+e), -1, 0) up to scale.
    const double q = 1.6 / 1.2, n = std::hypot(q, 1.0);
    EXPECT_NEAR(std::abs(o1.eigenvectors[0][0]), q / n, 1e-10);
    EXPECT_NEAR(std::abs(o1.eigenvectors[0][1]), 1 / n, 1e-10);
    EXPECT_NEAR(o1.eigenvectors[0][2], 0.0, 1e-12);
    const auto& o3 = recs[4];
    EXPECT_EQ(o3.label, "+O3");
    EXPECT_NEAR(std::abs(o3.eigenvectors[1][2]), 1.0, 1e-12);
    EXPECT_NEAR(o3.eigenvalues[1], -1.0, 1e-12);
}

TEST(Equilibria, RandomParameters) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        ModelParams p;
        p.c = u(rng);
        p.e = u(rng);
        if (p.e > p.c) std::swap(p.c, p.e);
        if (p.c - p.e < 0.02) continue;
        for (const auto& r : equilibria_spectrum(p)) {
            EXPECT_LT(r.eigenvalue_error, 1e-9) << r.label;
            EXPECT_LT(r.eigenvector_error, 1e-9) << r.label;
        }
    }
}

TEST(Equilibria, RequiresUnforcedFlow) { EXPECT_THROW(equilibria_spectrum(delta3(0.01)), ValidationError); }

TEST(NormalForm, SquaringCarriesTheField) {
    const auto p = delta3();
    const auto k = normal_form_for(p);
    EXPECT_EQ(gh_to_ml({1, 0, 0}), (Vec3{1, 0, 0}));
    EXPECT_EQ(gh_to_ml({0.5, 0.5, 0.5}), (Vec3{0.25, 0.25, 0.25}));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 100; ++i) {
        const Vec3 g{u(rng), u(rng), u(rng)};
        const Vec3 m = gh_to_ml(g);
        const Vec3 fm = vector_field({m[0], m[1], m[2], 0}, p);
        const Vec3 fg = gh_vector_field(g, k);
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(fm[j], 2 * g[j] * fg[j], 1e-14);
    }
}

TEST(NormalForm, MappedArcSolvesTheFlow) {
    const auto p = delta3();
    const auto k = normal_form_for(p);
    const Vec3 g0{0.5, 0.4, 0.3};
    Dopri5 gh([&](double, const Vec3& v) { return gh_vector_field(v, k); }, 0, g0, 1.0, {});
    while (gh.t() < 5) gh.step(5);
    const Vec3 m0 = gh_to_ml(g0);
    const auto ml = integrate({m0[0], m0[1], m0[2], 0}, 5, p);
    const Vec3 mapped = gh_to_ml(gh.y());
    EXPECT_NEAR(mapped[0], ml.samples.back().x, 1e-8);
    EXPECT_NEAR(mapped[1], ml.samples.back().y, 1e-8);
    EXPECT_NEAR(mapped[2], ml.samples.back().z, 1e-8);
}

TEST(Section, UnforcedReturnsFollowPowerLaw) {
    SectionOptions o;
    o.mode = ReturnMode::PerSaddle;
    o.integrate.coordinates = Coordinates::Log;
    o.integrate.control.max_step = 50;
    const auto run = section_returns(section_start(1e-3, 0, delta3()), 6, delta3(), o);
    ASSERT_EQ(run.events.size(), 6u);
    for (std::size_t k = 3; k + 1 < run.events.size(); ++k) {
        EXPECT_NEAR(run.events[k + 1].log_x / run.events[k].log_x, 3.0, 0.05);
        EXPECT_GT(run.events[k + 1].t_raw - run.events[k].t_raw, run.events[k].t_raw - run.events[k - 1].t_raw);
    }
    for (const auto& ev : run.events) {
        EXPECT_GE(ev.s, 0);
        EXPECT_LT(ev.s, std::numbers::pi / 0.3);
    }
}

TEST(Section, StartValidation) {
    EXPECT_THROW(section_start(0.5, 0, delta3()), ValidationError);
    EXPECT_THROW(section_start(0, 0, delta3()), ValidationError);
}

TEST(Dwell, ClosedForm) {
    auto p = delta3(0.01);
    EXPECT_NEAR(dwell_time_estimate(1.0, p), 5 * std::log(100.0), 1e-12);
    EXPECT_LT(dwell_time_estimate(99.999, p), 1e-3);
    EXPECT_THROW(dwell_time_estimate(100.0, p), DomainError);
}

TEST(Dwell, MeasuredAgainstEstimate) {
    for (double g : {1e-4, 1e-3}) {
        auto p = delta3(g);
        for (double x_in : {0.0, g * 0.5, g * 2}) {
            const double xs = std::max(x_in, 1e-300);
            const auto m = measure_dwell(section_start(xs, 1.3, p), p);
            EXPECT_NEAR(m.measured / m.estimated, 1.0, 0.15) << "gamma " << g << " x_in " << x_in;
        }
    }
}

TEST(Dwell, EstimateImprovesAsForcingShrinks) {
    double prev = 1e300;
    for (double g : {1e-2, 1e-3, 1e-4}) {
        auto p = delta3(g);
        const auto m = measure_dwell(section_start(1e-300, 1.3, p), p);
        const double err = std::abs(m.measured / m.estimated - 1.0);
        EXPECT_LT(err, prev) << "gamma " << g;
        prev = err;
    }
}

TEST(GlobalFit, RecoversGeneratingConstants) {
    auto p = delta3(1e-3);
    const double to_time = std::numbers::pi / p.omega;
    const auto orbit = iterate_map({VariantKind::Case12, 0, 0}, {0.01, 0.2, Modulus::Unit}, 200, p);
    std::vector<SectionEvent> ev;
    for (const auto& q : orbit) {
        SectionEvent e;
        e.x = q.x;
        e.log_x = std::log(q.x);
        e.s = q.s * to_time;
        ev.push_back(e);
    }
    const auto fit = fit_global_constants(ev, p);
    EXPECT_NEAR(fit.mu1, 1.0, 1e-6);
    EXPECT_NEAR(fit.mu, 1.0, 1e-6);
    EXPECT_NEAR(fit.mu1_sqrt_a1, std::sqrt(0.5), 1e-6);
    EXPECT_NEAR(fit.mu3, 1.0, 1e-6);
    EXPECT_LT(fit.phase_spread, 1e-10);
}

TEST(GlobalFit, NoisyRecovery) {
    auto p = delta3(1e-3);
    const double to_time = std::numbers::pi / p.omega;
    std::mt19937_64 rng(23);
    std::normal_distribution<double> noise(0, 1e-4);
    for (int draw = 0; draw < 20; ++draw) {
        const auto orbit = iterate_map({VariantKind::Case12, 0, 0}, {0.01, 0.05 * draw, Modulus::Unit}, 200, p);
        std::vector<SectionEvent> ev;
        for (const auto& q : orbit) {
            SectionEvent e;
            e.x = q.x * (1 + noise(rng));
            e.log_x = std::log(e.x);
            e.s = q.s * to_time;
            ev.push_back(e);
        }
        EXPECT_NEAR(fit_global_constants(ev, p).mu1, 1.0, 1e-2);
    }
}

TEST(GlobalFit, Preconditions) {
    auto p = delta3(1e-3);
    std::vector<SectionEvent> few(10);
    EXPECT_THROW(fit_global_constants(few, p), ValidationError);
    std::vector<SectionEvent> flat(60);
    for (auto& e : flat) {
        e.x = 0.01;
        e.log_x = std::log(0.01);
        e.s = 1.0;
    }
    EXPECT_THROW(fit_global_constants(flat, p), NumericError);
}
