#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>

namespace mlchaos {

using Vec3 = std::array<double, 3>;
using Rhs = std::function<Vec3(double t, const Vec3& y)>;

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  ///< 0 selects a step from the local scale of the field
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

/// Continuous extension of one accepted Dormand-Prince step (4th order).
struct DenseStep {
    double t0 = 0;
    double h = 0;
    std::array<Vec3, 5> r{};

    double t1() const { return t0 + h; }
    Vec3 operator()(double t) const;
};

/// Dormand-Prince 5(4) stepper with FSAL and dense output.
///
/// Time may run backwards (direction is taken from the sign of t_end - t0
/// passed to the constructor).
class Dopri5 {
public:
    Dopri5(Rhs rhs, double t0, const Vec3& y0, double direction, const StepControl& control);

    /// Advance by one accepted step, never beyond t_stop. Throws NumericError
    /// when the step size underflows or the state stops being finite.
    const DenseStep& step(double t_stop);

    /// Replace the current state (after clamping). Recomputes the FSAL stage.
    void set_state(const Vec3& y);

    double t() const { return t_; }
    const Vec3& y() const { return y_; }
    const IntegratorStats& stats() const { return stats_; }
    const DenseStep& last() const { return dense_; }

private:
    double initial_step();

    Rhs rhs_;
    StepControl control_;
    double dir_;
    double t_;
    Vec3 y_;
    Vec3 k1_;
    double h_ = 0;
    DenseStep dense_;
    IntegratorStats stats_;
};

}  // namespace mlchaos
