#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mlchaos/integrator.hpp"
#include "mlchaos/parallel.hpp"
#include "mlchaos/params.hpp"

namespace mlchaos {

struct FlowState {
    double x = 0, y = 0, z = 0;
    double t = 0;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Right-hand side of the forced May-Leonard system.
Vec3 vector_field(const FlowState& s, const ModelParams& params);

/// Jacobian of vector_field with respect to (x, y, z).
Mat3 field_jacobian(const FlowState& s, const ModelParams& params);

enum class Coordinates {
    Linear,  ///< integrate (x, y, z); tiny negatives within abs_tol are clamped to 0
    Log      ///< integrate (ln x, ln y, ln z); needed when coordinates underflow at gamma = 0
};

struct IntegrateOptions {
    StepControl control{};
    Coordinates coordinates = Coordinates::Linear;
    std::size_t max_steps = 50'000'000;
};

struct Trajectory {
    Coordinates coordinates = Coordinates::Linear;
    std::vector<FlowState> samples;     ///< one per accepted step, starting with the initial state
    std::vector<DenseStep> dense;       ///< interpolant of step i joins samples i and i+1
    IntegratorStats stats;
    double min_raw_coordinate = 0;      ///< smallest coordinate seen before clamping

    /// Dense-output evaluation inside the integrated span.
    FlowState at(double t) const;
};

/// Adaptive Dormand-Prince integration to t_end (forward or backward).
Trajectory integrate(const FlowState& start, double t_end, const ModelParams& params,
                     const IntegrateOptions& opts = {});

struct EquilibriumRecord {
    std::string label;          ///< "+O1", "-O1", ...
    Vec3 gh_point;              ///< point in the cubic normal-form coordinates
    Vec3 point;                 ///< image in population coordinates
    Mat3 jacobian;
    std::array<double, 3> eigenvalues;   ///< ordered as expanding, radial, contracting
    std::array<Vec3, 3> eigenvectors;    ///< unit vectors matching eigenvalues
    std::array<double, 3> expected_eigenvalues;
    std::array<Vec3, 3> expected_eigenvectors;  ///< tabulated directions, unnormalized
    double eigenvalue_error = 0;    ///< max abs difference to the expected values
    double eigenvector_error = 0;   ///< max of 1 - |cos angle| against the expected directions
};

/// Spectra at the six equilibria of the unforced network. Requires gamma = 0.
std::vector<EquilibriumRecord> equilibria_spectrum(const ModelParams& params);

/// Componentwise square: cubic normal-form coordinates to population coordinates.
Vec3 gh_to_ml(const Vec3& gh);

struct NormalFormCoefficients {
    double lambda, a1, a2, a3;
};

/// Normal-form coefficients whose flow is carried onto the unforced May-Leonard flow by gh_to_ml.
NormalFormCoefficients normal_form_for(const ModelParams& params);

Vec3 gh_vector_field(const Vec3& p, const NormalFormCoefficients& k);

enum class ReturnMode {
    FullCycle,  ///< only crossings of In(O3)
    PerSaddle   ///< crossings of the entry sections of O1, O2 and O3, rotated onto In(O3)
};

struct SectionOptions {
    IntegrateOptions integrate{};
    ReturnMode mode = ReturnMode::FullCycle;
    double time_tol = 1e-12;            ///< relative to the time scale of the run
    std::size_t max_steps_between = 5'000'000;
};

struct SectionEvent {
    std::size_t k = 0;
    double x = 0;        ///< leading coordinate at the crossing (may underflow to 0)
    double log_x = 0;    ///< natural log of the leading coordinate, exact in log mode
    double s = 0;        ///< crossing time reduced mod pi/omega
    double t_raw = 0;
    FlowState state;     ///< raw crossing state
    int saddle = 3;      ///< index of the saddle whose entry section was crossed
};

struct SectionRun {
    std::vector<SectionEvent> events;
    bool escaped = false;        ///< left the tubular neighbourhood of the network
    double escape_time = 0;
    IntegratorStats stats;
};

/// Initial condition on In(O3) with leading coordinate x.
FlowState section_start(double x, double t, const ModelParams& params);

SectionRun section_returns(const FlowState& start, std::size_t n_returns,
                           const ModelParams& params, const SectionOptions& opts = {});

/// Leading-order dwell time (1/e) ln(1/(gamma x_u0)) near O3.
double dwell_time_estimate(double x_u0, const ModelParams& params);

/// Integral of exp(-e(tau - s)) sin^2(2 omega tau) over tau in [s, inf).
double forcing_memory(double s, const ModelParams& params);

/// Normalised entry coordinate for dwell_time_estimate, given the raw leading
/// coordinate and entry time on In(O3): (x_in + gamma * forcing_memory) / (eps * gamma).
double entry_coordinate(double x_in, double t_in, const ModelParams& params);

struct DwellMeasurement {
    double t_enter = 0;
    double t_exit = 0;
    double x_in = 0;
    double measured = 0;
    double estimated = 0;
};

/// Time from a start on In(O3) until the leading coordinate leaves through x = eps.
DwellMeasurement measure_dwell(const FlowState& start_on_section, const ModelParams& params,
                               const IntegrateOptions& opts = {});

struct GlobalFit {
    double mu = 0;
    double mu1 = 0;
    double mu1_sqrt_a1 = 0;   ///< coefficient of the cosine term
    double mu3 = 0;           ///< representative in [0, pi/omega)
    double residual_rms = 0;  ///< of the x-update
    double phase_spread = 0;  ///< circular spread of the s-update, 0 when exact
    std::size_t samples = 0;
};

/// Least-squares fit of the weak-forcing return form to consecutive events.
/// Event s values are taken mod pi/omega and rescaled to mod 1 internally.
GlobalFit fit_global_constants(const std::vector<SectionEvent>& events, const ModelParams& params);

struct BatchResult {
    FlowState final_state;
    double min_raw_coordinate = 0;
    std::size_t steps = 0;
    bool ok = true;
    std::string error;
};

/// Integrates every start to t_end independently; results are in input order.
std::vector<BatchResult> integrate_batch(const std::vector<FlowState>& starts, double t_end,
                                         const ModelParams& params, const IntegrateOptions& opts,
                                         Execution exec);

}  // namespace mlchaos
