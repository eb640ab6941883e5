#pragma once

#include <functional>

namespace mlchaos {

struct QuadratureResult {
    double value = 0;
    double error = 0;   ///< Gauss-Kronrod error estimate
    double l1 = 0;      ///< integral of |f|
};

/// Adaptive 31-point Gauss-Kronrod quadrature on [a, b] (a > b is allowed).
/// Throws NumericError unless error <= max(abs_tol, rel_tol * l1).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-10);

}  // namespace mlchaos
