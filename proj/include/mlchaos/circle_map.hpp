#pragma once

#include <functional>
#include <string>

#include "mlchaos/params.hpp"

namespace mlchaos {

/// Constants entering the singular-limit circle map
/// h_a(s) = s + a + mu3 omega / pi - (xi omega / pi) ln(1 - sqrt_a1 cos 2 pi s).
struct CircleMapSpec {
    double a = 0;
    double omega = 0.3;
    double xi = 65;
    double mu3 = 1;
    double sqrt_a1 = 0;

    void validate() const;
};

CircleMapSpec circle_spec(const ModelParams& params, double a);

/// A circle map given by a lift and its first two derivatives.
struct CircleMap {
    std::string name;
    int degree = 1;
    std::function<double(double)> lift;
    std::function<double(double)> d1;
    std::function<double(double)> d2;

    double operator()(double s) const;  ///< lift reduced to [0, 1)
};

CircleMap singular_limit_map(const CircleMapSpec& spec);
CircleMap rigid_rotation(double alpha);
CircleMap doubling_map();
/// s + omega + (k / 2 pi) sin 2 pi s (the canonical family).
CircleMap sine_circle_map(double omega, double k);
/// Phase component of case34_map.
CircleMap case34_phase_map(const ModelParams& params);

}  // namespace mlchaos
