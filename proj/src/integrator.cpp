#include "mlchaos/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mlchaos/error.hpp"

namespace mlchaos {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;

bool finite(const Vec3& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

Vec3 DenseStep::operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    Vec3 out;
    for (int i = 0; i < 3; ++i)
        out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
    return out;
}

Dopri5::Dopri5(Rhs rhs, double t0, const Vec3& y0, double direction, const StepControl& control)
    : rhs_(std::move(rhs)), control_(control), dir_(direction < 0 ? -1.0 : 1.0), t_(t0), y_(y0) {
    if (!(control_.rel_tol > 0) || !(control_.abs_tol > 0))
        throw ValidationError("integrator tolerances must be > 0");
    if (!(control_.max_step > 0)) throw ValidationError("numerics.max_step must be > 0");
    if (!finite(y0)) throw NumericError("integrator: non-finite initial state");
    k1_ = rhs_(t_, y_);
    ++stats_.evaluations;
    h_ = control_.initial_step > 0 ? control_.initial_step : initial_step();
    h_ = std::min(h_, control_.max_step);
}

double Dopri5::initial_step() {
    // Hairer-Norsett-Wanner starting step heuristic.
    double d0 = 0, d1n = 0;
    for (int i = 0; i < 3; ++i) {
        const double sc = control_.abs_tol + control_.rel_tol * std::abs(y_[i]);
        d0 += (y_[i] / sc) * (y_[i] / sc);
        d1n += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / 3);
    d1n = std::sqrt(d1n / 3);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, control_.max_step);
    Vec3 y1;
    for (int i = 0; i < 3; ++i) y1[i] = y_[i] + dir_ * h0 * k1_[i];
    const Vec3 k2 = rhs_(t_ + dir_ * h0, y1);
    ++stats_.evaluations;
    double d2 = 0;
    for (int i = 0; i < 3; ++i) {
        const double sc = control_.abs_tol + control_.rel_tol * std::abs(y_[i]);
        d2 += ((k2[i] - k1_[i]) / sc) * ((k2[i] - k1_[i]) / sc);
    }
    d2 = std::sqrt(d2 / 3) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min(100 * h0, h1);
}

void Dopri5::set_state(const Vec3& y) {
    y_ = y;
    k1_ = rhs_(t_, y_);
    ++stats_.evaluations;
}

const DenseStep& Dopri5::step(double t_stop) {
    const auto& f = rhs_;
    Vec3 ys, k2, k3, k4, k5, k6, k7, y1;
    bool last_rejected = false;
    for (;;) {
        double h = std::min(h_, control_.max_step);
        const double remaining = (t_stop - t_) * dir_;
        if (remaining <= 0) throw NumericError("integrator: step requested past the stop time");
        if (h >= remaining) h = remaining;
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
            std::ostringstream msg;
            msg << "integrator: step size underflow at t=" << t_ << " state=(" << y_[0] << ", "
                << y_[1] << ", " << y_[2] << ")";
            throw NumericError(msg.str());
        }
        const double hs = dir_ * h;
        for (int i = 0; i < 3; ++i) ys[i] = y_[i] + hs * a21 * k1_[i];
        k2 = f(t_ + c2 * hs, ys);
        for (int i = 0; i < 3; ++i) ys[i] = y_[i] + hs * (a31 * k1_[i] + a32 * k2[i]);
        k3 = f(t_ + c3 * hs, ys);
        for (int i = 0; i < 3; ++i)
            ys[i] = y_[i] + hs * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t_ + c4 * hs, ys);
        for (int i = 0; i < 3; ++i)
            ys[i] = y_[i] + hs * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t_ + c5 * hs, ys);
        for (int i = 0; i < 3; ++i)
            ys[i] = y_[i] + hs * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        k6 = f(t_ + hs, ys);
        for (int i = 0; i < 3; ++i)
            y1[i] = y_[i] + hs * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                  a76 * k6[i]);
        k7 = f(t_ + hs, y1);
        stats_.evaluations += 6;

        double err = 0;
        for (int i = 0; i < 3; ++i) {
            const double ei = hs * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double sc =
                control_.abs_tol + control_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / 3);
        if (!std::isfinite(err) || !finite(y1)) {
            ++stats_.rejected;
            h_ = h * kFacMin;
            last_rejected = true;
            continue;
        }
        double fac = err == 0 ? kFacMax : kSafety * std::pow(err, -0.2);
        fac = std::clamp(fac, kFacMin, kFacMax);
        if (err > 1.0) {
            ++stats_.rejected;
            h_ = h * std::min(1.0, fac);
            last_rejected = true;
            continue;
        }
        if (last_rejected) fac = std::min(fac, 1.0);

        dense_.t0 = t_;
        dense_.h = hs;
        for (int i = 0; i < 3; ++i) {
            const double dy = y1[i] - y_[i];
            const double bspl = hs * k1_[i] - dy;
            dense_.r[0][i] = y_[i];
            dense_.r[1][i] = dy;
            dense_.r[2][i] = bspl;
            dense_.r[3][i] = dy - hs * k7[i] - bspl;
            dense_.r[4][i] = hs * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i] + d7 * k7[i]);
        }
        // Land exactly on the stop time when it was the limiting factor.
        t_ = (h == remaining) ? t_stop : t_ + hs;
        y_ = y1;
        k1_ = k7;
        ++stats_.accepted;
        h_ = h * fac;
        return dense_;
    }
}

}  // namespace mlchaos
