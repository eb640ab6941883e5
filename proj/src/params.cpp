#include "mlchaos/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mlchaos/diagnostics.hpp"
#include "mlchaos/error.hpp"

namespace mlchaos {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

double rel(double value, double reference) {
    return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(c) && std::isfinite(e), "model.c and model.e must be finite");
    require(e > 0.0, "model.e must be > 0");
    require(c > e, "model.c must exceed model.e (saddle value c/e > 1)");
    require(c < 1.0, "model.c must be < 1");
    require(std::isfinite(gamma) && gamma >= 0.0, "model.gamma must be >= 0");
    require(std::isfinite(omega) && omega > 0.0, "model.omega must be > 0");
    require(Delta1 >= 0.0 && Delta2 >= 0.0 && Delta3 >= 0.0,
            "global-maps.Delta1..Delta3 must be >= 0");
    for (double v : {mu, mu1, mu2, mu3, mu4, mu5})
        require(std::isfinite(v), "global-maps.mu* must be finite");
    require(eps_tilde > 0.0 && eps_tilde <= 1.0, "section.eps_tilde must lie in (0, 1]");
}

TrigCoefficients trig_coefficients(double c, double e, double omega) {
    const double w2 = 4.0 * omega * omega;
    return {c * c / (c * c + w2), e * e / (e * e + w2), 2.0 * c * omega / (c * c + w2),
            2.0 * e * omega / (e * e + w2)};
}

DerivedConstants derive_constants(const ModelParams& params) {
    params.validate();
    DerivedConstants d;
    const double c = params.c, e = params.e;
    d.delta = c / e;
    d.xi = (e * e + c * e + c * c) / (e * e * e);
    const auto t = trig_coefficients(c, e, params.omega);
    d.a1 = t.a1;
    d.a2 = t.a2;
    d.b1 = t.b1;
    d.b2 = t.b2;
    d.sqrt_a1 = std::sqrt(d.a1);
    d.p = (d.delta - 1.0) / d.delta;
    d.K_omega = params.omega * d.p / std::numbers::pi;
    d.x_star = x_star(params.gamma, d.delta);
    return d;
}

void DiophantineCheckSpec::validate() const {
    require(d1 > 0.0, "certify.d1 must be > 0");
    require(d2 > 0.0, "certify.d2 must be > 0");
    require(n_max >= 2, "certify.n_max must be >= 2");
}

DiophantineReport check_c1a_c1b(const ModelParams& params, const DiophantineCheckSpec& spec) {
    spec.validate();
    DiophantineReport r;
    r.c1a = 0.0 < params.e && params.e < params.c && params.c < 1.0;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (int m = -spec.n_max; m <= spec.n_max; ++m) {
        const int rest = spec.n_max - std::abs(m);
        for (int n = -rest; n <= rest; ++n) {
            if (m == 0 && n == 0) continue;
            const double norm = std::abs(m) + std::abs(n);
            const double margin =
                std::abs(m * params.c - n * params.e) - spec.d1 * std::pow(norm, -spec.d2);
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_pair = {m, n};
            }
        }
    }
    r.c1b_up_to_n_max = r.worst_margin > 0.0;
    return r;
}

TrigCollapse trig_collapse(double xc, double yc) {
    if (xc == 0.0 && yc == 0.0) throw DomainError("trig_collapse: zero vector has no phase");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double phase = std::fmod(-std::atan2(yc, xc), two_pi);
    if (phase < 0.0) phase += two_pi;
    if (phase >= two_pi) phase = 0.0;
    return {std::hypot(xc, yc), phase};
}

double IdentityResiduals::max() const {
    return std::max({pythagorean_1, pythagorean_2, small_omega, large_omega, xi_identity,
                     sqrt_a2_ratio, sqrt_a2_diff, b2_over_a2});
}

IdentityResiduals check_constant_identities(double c, double e, double omega,
                                            double omega_small, double omega_large) {
    IdentityResiduals r{};
    const auto t = trig_coefficients(c, e, omega);
    r.pythagorean_1 = rel(t.a1 * t.a1 + t.b1 * t.b1, t.a1);
    r.pythagorean_2 = rel(t.a2 * t.a2 + t.b2 * t.b2, t.a2);

    const auto s = trig_coefficients(c, e, omega_small);
    r.small_omega = std::max({std::abs(s.a1 - 1.0), std::abs(s.a2 - 1.0), std::abs(s.b1),
                              std::abs(s.b2)});
    const auto l = trig_coefficients(c, e, omega_large);
    r.large_omega = std::max({std::abs(l.a1), std::abs(l.a2), std::abs(l.b1), std::abs(l.b2)});

    const double delta = c / e;
    const double xi = (e * e + c * e + c * c) / (e * e * e);
    const double poly = 1.0 + delta + delta * delta;
    r.xi_identity = std::max(rel(e * xi, poly), rel(c * xi, delta * poly));

    r.sqrt_a2_ratio = std::abs(std::sqrt(l.a2) * 2.0 * omega_large / e - 1.0);
    r.sqrt_a2_diff = std::abs(std::sqrt(l.a2) - e / (2.0 * omega_large));
    r.b2_over_a2 = rel(t.b2 / t.a2, 2.0 * omega / e);
    return r;
}

}  // namespace mlchaos
