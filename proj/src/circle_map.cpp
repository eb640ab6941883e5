#include "mlchaos/circle_map.hpp"

#include <cmath>
#include <numbers>

#include "mlchaos/error.hpp"
#include "mlchaos/return_map.hpp"

namespace mlchaos {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

void CircleMapSpec::validate() const {
    if (!(sqrt_a1 >= 0 && sqrt_a1 < 1))
        throw ValidationError("circle map needs 0 <= sqrt_a1 < 1 (log singularity otherwise)");
    if (!(omega > 0)) throw ValidationError("circle map needs omega > 0");
    if (!std::isfinite(xi) || !std::isfinite(a) || !std::isfinite(mu3))
        throw ValidationError("circle map constants must be finite");
}

CircleMapSpec circle_spec(const ModelParams& params, double a) {
    const auto d = derive_constants(params);
    return {a, params.omega, d.xi, params.mu3, d.sqrt_a1};
}

double CircleMap::operator()(double s) const { return reduce(lift(s), 1.0); }

CircleMap singular_limit_map(const CircleMapSpec& spec) {
    spec.validate();
    const double shift = spec.a + spec.mu3 * spec.omega / kPi;
    const double k = spec.xi * spec.omega / kPi;
    const double q = spec.sqrt_a1;
    CircleMap m;
    m.name = "singular-limit";
    m.lift = [=](double s) { return s + shift - k * std::log(1 - q * std::cos(kTwoPi * s)); };
    m.d1 = [=](double s) {
        const double th = kTwoPi * s;
        return 1 - 2 * spec.xi * spec.omega * q * std::sin(th) / (1 - q * std::cos(th));
    };
    m.d2 = [=](double s) {
        const double th = kTwoPi * s;
        const double den = 1 - q * std::cos(th);
        return -4 * kPi * spec.xi * spec.omega * q * (std::cos(th) - q) / (den * den);
    };
    return m;
}

CircleMap rigid_rotation(double alpha) {
    CircleMap m;
    m.name = "rotation";
    m.lift = [alpha](double s) { return s + alpha; };
    m.d1 = [](double) { return 1.0; };
    m.d2 = [](double) { return 0.0; };
    return m;
}

CircleMap doubling_map() {
    CircleMap m;
    m.name = "doubling";
    m.degree = 2;
    m.lift = [](double s) { return 2 * s; };
    m.d1 = [](double) { return 2.0; };
    m.d2 = [](double) { return 0.0; };
    return m;
}

CircleMap sine_circle_map(double omega, double k) {
    CircleMap m;
    m.name = "sine";
    m.lift = [=](double s) { return s + omega + k / kTwoPi * std::sin(kTwoPi * s); };
    m.d1 = [=](double s) { return 1 + k * std::cos(kTwoPi * s); };
    m.d2 = [=](double s) { return -kTwoPi * k * std::sin(kTwoPi * s); };
    return m;
}

CircleMap case34_phase_map(const ModelParams& params) {
    if (!(params.mu1 > 0) || !(params.gamma > 0))
        throw ValidationError("case34 phase map needs mu1 > 0 and gamma > 0");
    const auto d = derive_constants(params);
    const double w = params.omega;
    const double shift = params.mu3 * w / kPi - d.xi * w / kPi * std::log(params.gamma * params.mu1) -
                         d.xi * w / (2 * params.e * kPi * params.mu1);
    CircleMap m = sine_circle_map(shift, d.xi / params.mu1);
    m.name = "case34-phase";
    return m;
}

}  // namespace mlchaos
