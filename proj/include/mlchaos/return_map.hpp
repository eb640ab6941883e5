#pragma once

#include <array>
#include <string>
#include <vector>

#include "mlchaos/params.hpp"

namespace mlchaos {

/// Which period the phase coordinate is reduced by.
enum class Modulus {
    HalfPeriod,  ///< s mod pi/omega (time units)
    Unit         ///< s mod 1 (after s -> omega s / pi)
};

struct CylinderPoint {
    double x = 0;
    double s = 0;
    Modulus modulus = Modulus::Unit;
};

enum class VariantKind { Full, Case12, Case34, Rescaled };

struct ReturnMapVariant {
    VariantKind kind = VariantKind::Case12;
    double gamma = 0;   ///< Rescaled only: the amplitude gamma_(n,a)
    double a = 0;       ///< Rescaled only: phase offset

    Modulus modulus() const {
        return kind == VariantKind::Full ? Modulus::HalfPeriod : Modulus::Unit;
    }
};

VariantKind parse_variant(const std::string& name);
std::string variant_name(VariantKind kind);

/// Floor-based reduction to [0, m); values that round to m map to 0.
double reduce(double s, double m);

double eta_omega(double s, const ModelParams& params);

/// Infinite-horizon memory integral of the forcing,
/// integral over [s, inf) of exp(-e (tau - s)) sin^2(omega tau).
double forcing_tail(double s, const ModelParams& params);

struct KernelValues {
    double eta = 0;
    double L1 = 0, L2 = 0, G1 = 0, G2 = 0;
    double T1 = 0, T2 = 0, T3 = 0;  ///< T3 includes the first-order gamma correction
    double T3_unforced = 0;
};

/// Kernels of the return map at (x, s), s in time units.
KernelValues kernels(const CylinderPoint& point, const ModelParams& params);

CylinderPoint full_map(const CylinderPoint& point, const ModelParams& params);
CylinderPoint case12_map(const CylinderPoint& point, const ModelParams& params);
CylinderPoint case34_map(const CylinderPoint& point, const ModelParams& params);

/// Rescaled family at an explicit amplitude and phase offset.
CylinderPoint rescaled_map_at(const CylinderPoint& point, double gamma, double a,
                              const ModelParams& params);

/// Rescaled family along gamma_(n,a); gamma_plus bounds the admissible amplitudes.
CylinderPoint rescaled_map(const CylinderPoint& point, int n, double a, const ModelParams& params,
                           double gamma_plus = 0.05);

/// The phase shift -(xi omega / pi) ln gamma mod 1 that rescaling x -> gamma^(1/delta) x
/// produces in case12_map (with mu1 = 1).
double phase_offset(double gamma, const ModelParams& params);

/// Coordinate change x -> x / gamma^(1/delta) between case12_map and the rescaled family.
CylinderPoint rescale(const CylinderPoint& point, double gamma, const ModelParams& params);

CylinderPoint apply(const ReturnMapVariant& variant, const CylinderPoint& point,
                    const ModelParams& params);

struct MapJacobian {
    std::array<std::array<double, 2>, 2> d{};  ///< d[i][j] = dF^i / d(x, s)_j
    double det = 0;
    double det_closed_form = 0;  ///< gamma^p delta x^(delta-1) etc.; NaN for the full map
    bool rank_one = false;       ///< Case34: image is a curve
};

MapJacobian jacobian(const CylinderPoint& point, const ReturnMapVariant& variant,
                     const ModelParams& params);

/// Diffeomorphism threshold on xi for the Case 3/4 phase map.
/// Defaults to 2 mu1; the derivative 1 + (xi/mu1) cos 2 pi s gives mu1.
double case34_invertibility_threshold(const ModelParams& params, double factor = 2.0);

/// Orbit of length iterations + 1 starting at point0.
std::vector<CylinderPoint> iterate_map(const ReturnMapVariant& variant, const CylinderPoint& point0,
                                       int iterations, const ModelParams& params);

}  // namespace mlchaos
