#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlchaos/circle_map.hpp"
#include "mlchaos/parallel.hpp"
#include "mlchaos/params.hpp"
#include "mlchaos/return_map.hpp"

namespace mlchaos {

/// Smallest positive stable fixed point of x -> x^delta + gamma (0 when gamma = 0).
/// Empty at and beyond the saddle-node value of gamma.
std::optional<double> x_star(double gamma, double delta);

struct AnnulusReport {
    bool defined = false;
    bool invariant = false;
    double lo = 0, hi = 0;
    double worst_margin = 0;
    CylinderPoint worst_point;
    std::string note;
};

/// Forward invariance of x* -/+ 2 gamma sqrt(a1) under case12_map on an s x radial grid.
AnnulusReport annulus_check(const ModelParams& params, int s_points = 256, int r_points = 32);

double t1_curve(double xi, double omega, double C);
double t2_curve(double xi, double omega);

struct HorseshoeResult {
    bool holds = false;
    double t1 = 0;
    double sqrt_a1 = 0;
    double margin = 0;  ///< sqrt_a1 - t1
};

HorseshoeResult horseshoe_condition(double C, const ModelParams& params);

struct RegionRow {
    double xi = 0, t1 = 0, t2 = 0;
};

std::vector<RegionRow> region_curves(const std::vector<double>& xi_grid, double omega, double C);

/// "I" below t2, "III" above t1, "II/IV" between (resolved only by the hypothesis battery).
std::string region_label(double sqrt_a1, double t1, double t2);

struct RegimeThresholds {
    double gamma_pow_tol = 0.1;
    double omega_small = 0.5;
    double omega_large = 5.0;
    double xi_factor = 2.0;  ///< Case 3/4 split at xi = xi_factor * mu1
    double C = 10.0;         ///< horseshoe constant for the reported t1

    bool operator==(const RegimeThresholds&) const = default;
};

struct RegimeReport {
    std::optional<int> case_tag;  ///< empty: omega between the thresholds
    double delta = 0, omega = 0, xi = 0, mu1 = 0, gamma = 0;
    double gamma_pow = 0;  ///< gamma^(delta-1)
    double t1 = 0, t2 = 0, sqrt_a1 = 0;
    double xi_minus_threshold = 0;
    std::string attractor;
    std::string region;
};

RegimeReport classify_regime(const ModelParams& params, const RegimeThresholds& th = {});

struct Lyapunov2D {
    double lambda1 = 0, lambda2 = 0;
    double mean_log_det = 0;   ///< Birkhoff average of log|det DF|
    double sum_residual = 0;   ///< |lambda1 + lambda2 - mean_log_det|
    CylinderPoint last;
};

/// Tangent-map products with Gram-Schmidt reorthonormalisation every step.
Lyapunov2D lyapunov_2d(const ReturnMapVariant& variant, const CylinderPoint& point0, int iterations,
                       const ModelParams& params, int burn_in = 1000);

struct RotationInterval {
    double lo = 0, hi = 0;
    double width = 0;
    bool is_point = false;     ///< width below 1e-3
    bool converged = true;     ///< Richardson correction within tolerance
    double seed_min = 0, seed_max = 0;
};

/// Rotation interval of a degree-one circle map from its monotone lower and upper
/// envelopes; seed averages are reported as a consistency check.
RotationInterval rotation_interval(const CircleMap& map, const std::vector<double>& seeds,
                                   int iterations);

struct ZeroOneResult {
    double K = 0;        ///< median over frequencies, clipped to [0, 1]
    double K_raw = 0;
    std::vector<double> per_frequency;
};

/// cos(2 pi s / period) along an orbit; continuous across the phase wrap, unlike s itself.
std::vector<double> phase_observable(const std::vector<CylinderPoint>& orbit, const ModelParams& params);

ZeroOneResult zero_one_test(const std::vector<double>& series, int n_c, std::uint64_t seed);

struct Autocorrelation {
    std::vector<double> rho;  ///< lags 0..max_lag
    double decay_rate = 0;    ///< fitted exponential rate of the envelope, per lag
    int fitted_lags = 0;
};

Autocorrelation autocorrelation(const std::vector<double>& series, int max_lag);

struct CurveFit {
    std::vector<double> coefficients;  ///< a0, a1, b1, a2, b2, ...
    double max_spread = 0;             ///< max |x - fit(s)|
    std::size_t points = 0;
};

/// Least-squares Fourier fit x = f(s) of an orbit cloud on the unit-period cylinder.
CurveFit fit_invariant_curve(const std::vector<CylinderPoint>& points, int harmonics);

struct ScanOptions {
    int iterations = 20000;
    int burn_in = 1000;
    int zo_length = 2000;
    int n_c = 32;
    std::uint64_t seed = 1;
    double lambda_tol = 1e-3;
    double k_threshold = 0.9;
    double s0 = 0.123;
    int rotation_iterations = 2000;
};

struct ScanSample {
    double gamma = 0;
    double lambda1 = 0, lambda2 = 0;
    double K = 0;
    double rot_lo = 0, rot_hi = 0;
    bool annulus_defined = false;
    bool chaotic = false;
    bool ok = true;
    std::string error;
};

struct PrefixFraction {
    double r = 0;
    int count = 0;
    double fraction = 0;
};

struct ScanResult {
    std::string axis = "gamma";
    std::vector<double> grid;
    std::vector<ScanSample> samples;
    double fraction = 0;
    std::vector<PrefixFraction> prefixes;  ///< nested [0, r] by decade
};

/// Per-sample seed, independent of grid order.
std::uint64_t sample_seed(std::uint64_t seed, double gamma);

ScanResult density_scan(const std::vector<double>& gamma_grid, const ModelParams& params,
                        const ScanOptions& opts, Execution exec);

}  // namespace mlchaos
