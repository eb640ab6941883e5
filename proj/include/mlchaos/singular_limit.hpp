#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlchaos/circle_map.hpp"
#include "mlchaos/parallel.hpp"
#include "mlchaos/params.hpp"

namespace mlchaos {

/// k(x) = -K_omega xi ln x.
double k_map(double x, const ModelParams& params);
double k_inverse(double y, const ModelParams& params);

/// Smallest n with gamma_n = k^{-1}(n) < gamma_plus.
int admissible_n0(const ModelParams& params, double gamma_plus = 0.05);

/// gamma_(n,a) = k^{-1}(n + a). Throws DomainError for n below admissible_n0.
double gamma_sequence(int n, double a, const ModelParams& params, double gamma_plus = 0.05);

struct CriticalPoint {
    double s = 0;
    double d2 = 0;  ///< second derivative at s
};

/// All zeros of h' on [0, 1), located from sign changes on a 2^12 grid.
/// Throws NumericError when a zero is degenerate (|h''| < 1e-8).
std::vector<CriticalPoint> critical_set(const CircleMap& map, int grid = 1 << 12);

struct ConvergenceRow {
    int n = 0;
    double gamma = 0;
    double x_top = 0;     ///< largest x of the grid
    double sup_f1 = 0;    ///< sup |F^1|
    double sup_f2 = 0;    ///< sup circle distance |F^2 - h_a|
    double sup_ds1 = 0;   ///< finite-difference s-derivatives of the difference, orders 1..3
    double sup_ds2 = 0;
    double sup_ds3 = 0;
    double sup_dx = 0;    ///< first x-derivative of the difference
    double total = 0;     ///< max of the above
};

struct ConvergenceOptions {
    double x_max = 1.0;
    int s_points = 256;
    int x_points = 16;
    bool shrink_x = true;   ///< x-grid (0, x_max gamma^p] instead of (0, x_max]
    double gamma_plus = 0.05;
};

std::vector<ConvergenceRow> singular_limit_convergence(int n_first, int n_last, double a,
                                                       const ModelParams& params,
                                                       const ConvergenceOptions& opts = {});

enum class Verdict { Pass, Fail, Vacuous, NotCheckable };
std::string verdict_name(Verdict v);

struct ConditionResult {
    Verdict verdict = Verdict::NotCheckable;
    double margin = 0;     ///< worst signed margin (>= 0 passes)
    double witness_s = 0;  ///< starting point realising the margin
    int witness_m = 0;     ///< orbit length realising the margin
    std::string note;
};

struct Interval {
    double lo = 0, hi = 0;  ///< lift coordinates, lo may be negative
};

struct MisiurewiczOptions {
    double u_radius = 1e-2;
    int horizon = 1000;
    int samples = 2048;                    ///< grid of starting points for (1a)/(1b)
    int inside_samples = 256;              ///< per side of each critical point for (3b)
    std::optional<double> lambda0_target;  ///< verify this lambda0 instead of extracting one
    int M0 = 10;
    double d0 = 0.1;
};

struct MisiurewiczCertificate {
    std::string map_name;
    std::vector<CriticalPoint> critical;
    std::vector<Interval> U;
    double lambda0 = 0;
    int M0 = 0;
    double d0 = 0;
    int horizon = 0;
    ConditionResult outside_a, outside_b, critical_orbits, inside_a, inside_b;
    bool finite_horizon = true;

    bool passes() const;
};

MisiurewiczCertificate misiurewicz_check(const CircleMap& map, const MisiurewiczOptions& opts = {});

struct TransitionMatrix {
    std::vector<Interval> intervals;          ///< monotonicity intervals in lift coordinates
    std::vector<std::vector<int>> Q;
    std::optional<int> N;                     ///< smallest N <= r^2 with Q^N > 0
    bool applicable = true;                   ///< false when there are no critical points
    std::optional<bool> lambda_condition;     ///< exp(lambda0 / 3) > 2
};

TransitionMatrix transition_matrix(const CircleMap& map,
                                   std::optional<double> lambda0 = std::nullopt);

struct HypothesisResult {
    std::string name;
    Verdict verdict = Verdict::NotCheckable;
    std::string detail;
    double value = 0;
    std::optional<double> reference;
};

struct BatteryOptions {
    double gamma_plus = 0.05;
    MisiurewiczOptions misiurewicz{};
    int convergence_window = 8;
    double transversality_tol = 1e-3;
    int itinerary_depth = 20;
};

struct BatteryReport {
    int n = 0;
    double a = 0;
    double gamma = 0;
    std::vector<HypothesisResult> results;  ///< H1 .. H7 in order
    MisiurewiczCertificate certificate;
    TransitionMatrix transitions;

    const HypothesisResult& get(const std::string& name) const;
};

BatteryReport hypothesis_battery(const ModelParams& params, int n, double a,
                                 const BatteryOptions& opts = {});

/// Misiurewicz certificates of h_a over a grid of offsets; index-ordered output.
std::vector<MisiurewiczCertificate> certify_offsets(const ModelParams& params,
                                                    const std::vector<double>& offsets,
                                                    const MisiurewiczOptions& opts, Execution exec);

struct Lyapunov1D {
    double lambda = 0;
    int resamples = 0;
    double s0_used = 0;
};

/// Birkhoff average of log|h'| after a burn-in of 100 iterates.
Lyapunov1D lyapunov_1d(const CircleMap& map, double s0, int iterations);

}  // namespace mlchaos
