#include "mlchaos/return_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mlchaos/error.hpp"
#include "mlchaos/quadrature.hpp"
#include "mlchaos/singular_limit.hpp"

namespace mlchaos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double g_forcing(double tau, double omega) {
    const double s = std::sin(omega * tau);
    return s * s;
}

/// -a cos(2 w t) - b sin(2 w t) and its derivative in t.
double osc(double t, double a, double b, double w) {
    return -a * std::cos(2 * w * t) - b * std::sin(2 * w * t);
}
double osc_d(double t, double a, double b, double w) {
    return 2 * w * (a * std::sin(2 * w * t) - b * std::cos(2 * w * t));
}

double tail_derivative(double s, const ModelParams& p, const DerivedConstants& d) {
    const double w = p.omega, e = p.e;
    const double eta_d = -e * e * w * std::sin(2 * w * s) / (e * e + 4 * w * w);
    return (eta_d + 2 * w * d.a2 * std::sin(2 * w * s) + w * d.b2 * std::cos(2 * w * s)) / e;
}

void require_positive_x(double x, const char* who) {
    if (!(x > 0)) throw DomainError(std::string(who) + ": x must be > 0");
}

}  // namespace

VariantKind parse_variant(const std::string& name) {
    if (name == "full") return VariantKind::Full;
    if (name == "case12") return VariantKind::Case12;
    if (name == "case34") return VariantKind::Case34;
    if (name == "rescaled") return VariantKind::Rescaled;
    throw ValidationError("unknown map variant '" + name + "' (full|case12|case34|rescaled)");
}

std::string variant_name(VariantKind kind) {
    switch (kind) {
        case VariantKind::Full: return "full";
        case VariantKind::Case12: return "case12";
        case VariantKind::Case34: return "case34";
        case VariantKind::Rescaled: return "rescaled";
    }
    return "?";
}

double reduce(double s, double m) {
    double r = s - m * std::floor(s / m);
    if (r >= m || r < 0) r = 0;
    return r;
}

double eta_omega(double s, const ModelParams& p) {
    const double cw = std::cos(p.omega * s);
    return (p.e * p.e * cw * cw + 2 * p.omega * p.omega) /
           (p.e * p.e + 4 * p.omega * p.omega);
}

double forcing_tail(double s, const ModelParams& p) {
    const auto t = trig_coefficients(p.c, p.e, p.omega);
    const double w2s = 2 * p.omega * s;
    return (eta_omega(s, p) - t.a2 * std::cos(w2s) + 0.5 * t.b2 * std::sin(w2s)) / p.e;
}

KernelValues kernels(const CylinderPoint& point, const ModelParams& p) {
    require_positive_x(point.x, "kernels");
    const auto d = derive_constants(p);
    const double x = point.x, s = point.s, c = p.c, e = p.e, w = p.omega;
    const double lx = std::log(x);
    KernelValues k;
    k.eta = eta_omega(s, p);
    k.T1 = s - lx / e;
    k.T2 = s + p.Delta1 - (e + c) / (e * e) * lx;
    k.T3_unforced = s + p.Delta1 + p.Delta2 - d.xi * lx;
    // exp(-e (T1 - s)) = x, so the finite-horizon integral is a difference of tails.
    k.L2 = forcing_tail(s, p) - x * forcing_tail(k.T1, p);
    k.T3 = k.T3_unforced - p.gamma * d.xi / x * k.L2;

    auto g = [w](double tau) { return g_forcing(tau, w); };

    // The two exponentials of L1 combine to exp(-c (T3 - tau)); anything older than
    // 50/c contributes below 1e-21 and is cut off.
    const double upper = k.T3_unforced;
    const double lower = std::max(k.T2 + p.Delta3, upper - 50.0 / c);
    k.L1 = integrate_adaptive([&](double tau) { return std::exp(-c * (upper - tau)) * g(tau); },
                              lower, upper)
               .value;

    const double P = kPi / w;
    const double g1 = integrate_adaptive(
                          [&](double tau) { return std::exp(c * (tau - P)) * g(k.T3 + tau); }, 0,
                          P)
                          .value;
    k.G1 = g1 / (1.0 - std::exp(-c * P));
    const double g2 = integrate_adaptive(
                          [&](double tau) { return std::exp(-e * tau) * g(k.T3 + p.Delta3 + tau); },
                          0, P)
                          .value;
    k.G2 = g2 / (std::exp(-e * P) - 1.0);
    return k;
}

CylinderPoint full_map(const CylinderPoint& point, const ModelParams& p) {
    require_positive_x(point.x, "full_map");
    const auto d = derive_constants(p);
    const double x = point.x, s = point.s, w = p.omega;
    const double lx = std::log(x);
    const double phi = s + p.mu3 - d.xi * lx;
    const double f2 = phi - p.gamma * d.xi / x * forcing_tail(s, p);
    const double f1 =
        p.mu * std::pow(x, d.delta) +
        p.gamma * (p.mu1 + p.mu2 * osc(phi, d.a1, d.b1, w) -
                   p.mu4 * osc(f2 - p.Delta3, d.a1, d.b1, w) - p.mu5 * osc(f2, d.a2, d.b2, w));
    return {f1, reduce(f2, kPi / w), Modulus::HalfPeriod};
}

CylinderPoint case12_map(const CylinderPoint& point, const ModelParams& p) {
    if (point.x < 0) throw DomainError("case12_map: x must be >= 0");
    const auto d = derive_constants(p);
    const double f1 =
        std::pow(point.x, d.delta) + p.gamma * p.mu1 * (1 - d.sqrt_a1 * std::cos(kTwoPi * point.s));
    if (!(f1 > 0)) throw DomainError("case12_map: first component is not positive");
    const double k = d.xi * p.omega / kPi;
    const double f2 = point.s + p.mu3 * p.omega / kPi - k * std::log(f1);
    return {f1, reduce(f2, 1.0), Modulus::Unit};
}

CylinderPoint case34_map(const CylinderPoint& point, const ModelParams& p) {
    if (!(p.mu1 > 0)) throw ValidationError("case34_map: mu1 must be > 0");
    if (!(p.gamma > 0)) throw ValidationError("case34_map: gamma must be > 0");
    const auto d = derive_constants(p);
    const double w = p.omega;
    const double f1 = p.gamma * p.mu1;
    const double f2 = point.s + p.mu3 * w / kPi - d.xi * w / kPi * std::log(f1) -
                      d.xi * w / (2 * p.e * kPi * p.mu1) +
                      d.xi / (kTwoPi * p.mu1) * std::sin(kTwoPi * point.s);
    return {f1, reduce(f2, 1.0), Modulus::Unit};
}

CylinderPoint rescaled_map_at(const CylinderPoint& point, double gamma, double a,
                              const ModelParams& p) {
    if (point.x < 0) throw DomainError("rescaled_map: x must be >= 0");
    if (!(gamma > 0)) throw DomainError("rescaled_map: gamma must be > 0");
    const auto d = derive_constants(p);
    const double u = std::pow(point.x, d.delta) + 1 - d.sqrt_a1 * std::cos(kTwoPi * point.s);
    const double k = d.xi * p.omega / kPi;
    const double f2 = point.s + p.mu3 * p.omega / kPi + a - k * std::log(u);
    return {std::pow(gamma, d.p) * u, reduce(f2, 1.0), Modulus::Unit};
}

CylinderPoint rescaled_map(const CylinderPoint& point, int n, double a, const ModelParams& p,
                           double gamma_plus) {
    return rescaled_map_at(point, gamma_sequence(n, a, p, gamma_plus), a, p);
}

double phase_offset(double gamma, const ModelParams& p) {
    if (!(gamma > 0)) throw DomainError("phase_offset: gamma must be > 0");
    const auto d = derive_constants(p);
    return reduce(-d.xi * p.omega / kPi * std::log(gamma), 1.0);
}

CylinderPoint rescale(const CylinderPoint& point, double gamma, const ModelParams& p) {
    const auto d = derive_constants(p);
    return {point.x / std::pow(gamma, 1.0 / d.delta), point.s, point.modulus};
}

CylinderPoint apply(const ReturnMapVariant& v, const CylinderPoint& point, const ModelParams& p) {
    switch (v.kind) {
        case VariantKind::Full: return full_map(point, p);
        case VariantKind::Case12: return case12_map(point, p);
        case VariantKind::Case34: return case34_map(point, p);
        case VariantKind::Rescaled: return rescaled_map_at(point, v.gamma, v.a, p);
    }
    throw ValidationError("unknown variant");
}

MapJacobian jacobian(const CylinderPoint& point, const ReturnMapVariant& v, const ModelParams& p) {
    require_positive_x(point.x, "jacobian");
    const auto dc = derive_constants(p);
    const double x = point.x, s = point.s, delta = dc.delta;
    const double dxd = delta * std::pow(x, delta - 1);
    const double k = dc.xi * p.omega / kPi;
    MapJacobian J;
    J.det_closed_form = std::numeric_limits<double>::quiet_NaN();
    auto& m = J.d;
    switch (v.kind) {
        case VariantKind::Case12: {
            const double f1 = std::pow(x, delta) + p.gamma * p.mu1 * (1 - dc.sqrt_a1 * std::cos(kTwoPi * s));
            const double f1s = kTwoPi * p.gamma * p.mu1 * dc.sqrt_a1 * std::sin(kTwoPi * s);
            m = {{{dxd, f1s}, {-k * dxd / f1, 1 - k * f1s / f1}}};
            J.det_closed_form = dxd;
            break;
        }
        case VariantKind::Rescaled: {
            const double gp = std::pow(v.gamma, dc.p);
            const double u = std::pow(x, delta) + 1 - dc.sqrt_a1 * std::cos(kTwoPi * s);
            const double us = kTwoPi * dc.sqrt_a1 * std::sin(kTwoPi * s);
            m = {{{gp * dxd, gp * us}, {-k * dxd / u, 1 - k * us / u}}};
            J.det_closed_form = gp * dxd;
            break;
        }
        case VariantKind::Case34: {
            m = {{{0, 0}, {0, 1 + dc.xi / p.mu1 * std::cos(kTwoPi * s)}}};
            J.det_closed_form = 0;
            J.rank_one = true;
            break;
        }
        case VariantKind::Full: {
            const double w = p.omega;
            const double lx = std::log(x);
            const double tail = forcing_tail(s, p);
            const double phi = s + p.mu3 - dc.xi * lx;
            const double f2 = phi - p.gamma * dc.xi / x * tail;
            const double f2x = -dc.xi / x + p.gamma * dc.xi * tail / (x * x);
            const double f2s = 1 - p.gamma * dc.xi / x * tail_derivative(s, p, dc);
            const double o1 = osc_d(phi, dc.a1, dc.b1, w);
            const double o4 = osc_d(f2 - p.Delta3, dc.a1, dc.b1, w);
            const double o5 = osc_d(f2, dc.a2, dc.b2, w);
            const double f1x = p.mu * dxd + p.gamma * (p.mu2 * o1 * (-dc.xi / x) -
                                                       p.mu4 * o4 * f2x - p.mu5 * o5 * f2x);
            const double f1s =
                p.gamma * (p.mu2 * o1 - p.mu4 * o4 * f2s - p.mu5 * o5 * f2s);
            m = {{{f1x, f1s}, {f2x, f2s}}};
            break;
        }
    }
    J.det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return J;
}

double case34_invertibility_threshold(const ModelParams& p, double factor) {
    return factor * p.mu1;
}

}  // namespace mlchaos

namespace mlchaos {

std::vector<CylinderPoint> iterate_map(const ReturnMapVariant& variant, const CylinderPoint& point0,
                                       int iterations, const ModelParams& params) {
    if (iterations < 0) throw ValidationError("iterate_map: iterations must be >= 0");
    std::vector<CylinderPoint> orbit;
    orbit.reserve(static_cast<std::size_t>(iterations) + 1);
    CylinderPoint p = point0;
    p.modulus = variant.modulus();
    orbit.push_back(p);
    for (int i = 0; i < iterations; ++i) {
        p = apply(variant, p, params);
        orbit.push_back(p);
    }
    return orbit;
}

}  // namespace mlchaos
