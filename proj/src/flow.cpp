#include "mlchaos/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mlchaos/error.hpp"

namespace mlchaos {

namespace {

double forcing(double t, const ModelParams& p) {
    const double sn = std::sin(2.0 * p.omega * t);
    return p.gamma * sn * sn;
}

Vec3 to_vec(const FlowState& s) { return {s.x, s.y, s.z}; }
FlowState to_state(const Vec3& v, double t) { return {v[0], v[1], v[2], t}; }

Vec3 growth_rates(const Vec3& v, const ModelParams& p) {
    const double r = v[0] + v[1] + v[2];
    return {(1 - r) - p.c * v[1] + p.e * v[2], (1 - r) - p.c * v[2] + p.e * v[0],
            (1 - r) - p.c * v[0] + p.e * v[1]};
}

Rhs make_rhs(const ModelParams& p, Coordinates coords) {
    if (coords == Coordinates::Linear) {
        return [p](double t, const Vec3& y) {
            const Vec3 g = growth_rates(y, p);
            return Vec3{y[0] * g[0] + (1 - y[0]) * forcing(t, p), y[1] * g[1], y[2] * g[2]};
        };
    }
    return [p](double t, const Vec3& u) {
        const Vec3 v{std::exp(u[0]), std::exp(u[1]), std::exp(u[2])};
        Vec3 g = growth_rates(v, p);
        if (p.gamma != 0.0) g[0] += (1 - v[0]) * forcing(t, p) / v[0];
        return g;
    };
}

Vec3 encode(const FlowState& s, Coordinates coords) {
    if (coords == Coordinates::Linear) return to_vec(s);
    if (!(s.x > 0 && s.y > 0 && s.z > 0))
        throw ValidationError("log-coordinate integration needs strictly positive coordinates");
    return {std::log(s.x), std::log(s.y), std::log(s.z)};
}

Vec3 decode(const Vec3& v, Coordinates coords) {
    if (coords == Coordinates::Linear) return v;
    return {std::exp(v[0]), std::exp(v[1]), std::exp(v[2])};
}

/// Applies the clamping rule in linear mode. Returns true when the state changed.
bool clamp_octant(Vec3& y, double abs_tol, double t, double& min_raw) {
    bool changed = false;
    for (int i = 0; i < 3; ++i) {
        min_raw = std::min(min_raw, y[i]);
        if (y[i] < 0) {
            if (y[i] < -abs_tol) {
                std::ostringstream msg;
                msg << "integrator: coordinate " << i << " reached " << y[i]
                    << " (beyond abs_tol) at t=" << t;
                throw NumericError(msg.str());
            }
            y[i] = 0;
            changed = true;
        }
    }
    return changed;
}

/// Root of g on [a, b] where g(a) and g(b) have opposite signs.
template <class G>
double locate_root(G g, double a, double b, double tol) {
    double ga = g(a), gb = g(b);
    if (ga == 0) return a;
    if (gb == 0) return b;
    if (a > b) {
        std::swap(a, b);
        std::swap(ga, gb);
    }
    std::uintmax_t iters = 200;
    auto stop = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
    auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, stop, iters);
    return 0.5 * (lo + hi);
}

struct SectionSpec {
    int saddle;
    int cross;  ///< coordinate that decreases through eps
    int guard;  ///< coordinate that must be near 1 at the crossing
    int lead;   ///< leading coordinate reported for the event
};

constexpr SectionSpec kIn3{3, 1, 2, 0};
constexpr SectionSpec kIn1{1, 2, 0, 1};
constexpr SectionSpec kIn2{2, 0, 1, 2};

}  // namespace

Vec3 vector_field(const FlowState& s, const ModelParams& p) {
    const Vec3 v = to_vec(s);
    const Vec3 g = growth_rates(v, p);
    return {v[0] * g[0] + (1 - v[0]) * forcing(s.t, p), v[1] * g[1], v[2] * g[2]};
}

Mat3 field_jacobian(const FlowState& s, const ModelParams& p) {
    const Vec3 v = to_vec(s);
    const Vec3 g = growth_rates(v, p);
    const double c = p.c, e = p.e;
    // d(growth_i)/d(v_j)
    const Mat3 dg{{{-1, -1 - c, -1 + e}, {-1 + e, -1, -1 - c}, {-1 - c, -1 + e, -1}}};
    Mat3 J{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) J[i][j] = v[i] * dg[i][j] + (i == j ? g[i] : 0.0);
    J[0][0] -= forcing(s.t, p);
    return J;
}

FlowState Trajectory::at(double t) const {
    if (dense.empty()) {
        if (!samples.empty() && t == samples.front().t) return samples.front();
        throw DomainError("trajectory has no steps");
    }
    const bool forward = dense.front().h > 0;
    auto it = std::lower_bound(dense.begin(), dense.end(), t, [forward](const DenseStep& d, double v) {
        return forward ? d.t1() < v : d.t1() > v;
    });
    if (it == dense.end()) {
        if (t == dense.back().t1()) it = std::prev(dense.end());
        else throw DomainError("time outside the integrated span");
    }
    const double lo = std::min(it->t0, it->t1()), hi = std::max(it->t0, it->t1());
    if (t < lo || t > hi) throw DomainError("time outside the integrated span");
    return to_state(decode((*it)(t), coordinates), t);
}

Trajectory integrate(const FlowState& start, double t_end, const ModelParams& params,
                     const IntegrateOptions& opts) {
    params.validate();
    if (t_end == start.t) throw ValidationError("integrate: t_end equals the start time");
    const double dir = t_end > start.t ? 1.0 : -1.0;
    Trajectory tr;
    tr.coordinates = opts.coordinates;
    tr.min_raw_coordinate = std::min({start.x, start.y, start.z});
    tr.samples.push_back(start);
    Dopri5 stepper(make_rhs(params, opts.coordinates), start.t, encode(start, opts.coordinates),
                   dir, opts.control);
    while ((t_end - stepper.t()) * dir > 0) {
        if (tr.dense.size() >= opts.max_steps)
            throw NumericError("integrate: exceeded numerics.max_steps");
        tr.dense.push_back(stepper.step(t_end));
        if (opts.coordinates == Coordinates::Linear) {
            Vec3 y = stepper.y();
            if (clamp_octant(y, opts.control.abs_tol, stepper.t(), tr.min_raw_coordinate))
                stepper.set_state(y);
        }
        tr.samples.push_back(to_state(decode(stepper.y(), opts.coordinates), stepper.t()));
    }
    tr.stats = stepper.stats();
    return tr;
}

Vec3 gh_to_ml(const Vec3& gh) { return {gh[0] * gh[0], gh[1] * gh[1], gh[2] * gh[2]}; }

NormalFormCoefficients normal_form_for(const ModelParams& p) {
    return {0.5, -0.5, -(1 + p.c) / 2, -(1 - p.e) / 2};
}

Vec3 gh_vector_field(const Vec3& v, const NormalFormCoefficients& k) {
    const double x2 = v[0] * v[0], y2 = v[1] * v[1], z2 = v[2] * v[2];
    return {v[0] * (k.lambda + k.a1 * x2 + k.a2 * y2 + k.a3 * z2),
            v[1] * (k.lambda + k.a1 * y2 + k.a2 * z2 + k.a3 * x2),
            v[2] * (k.lambda + k.a1 * z2 + k.a2 * x2 + k.a3 * y2)};
}

std::vector<EquilibriumRecord> equilibria_spectrum(const ModelParams& params) {
    params.validate();
    if (params.gamma != 0.0) throw ValidationError("equilibria_spectrum requires gamma = 0");
    const double c = params.c, e = params.e;
    const double q = (1 + c) / (1 + e);
    const double w = (e - 1) / (1 - c);
    // Expanding, radial and contracting directions at +O1, +O2, +O3.
    const std::array<std::array<Vec3, 3>, 3> table{{
        {{{q, -1, 0}, {1, 0, 0}, {w, 0, 1}}},
        {{{0, q, -1}, {0, 1, 0}, {1, w, 0}}},
        {{{-1, 0, q}, {0, 0, 1}, {0, 1, w}}},
    }};
    const std::array<double, 3> expected{e, -1.0, -c};

    std::vector<EquilibriumRecord> out;
    for (int i = 0; i < 3; ++i) {
        for (double sign : {1.0, -1.0}) {
            EquilibriumRecord rec;
            rec.label = std::string(sign > 0 ? "+" : "-") + "O" + std::to_string(i + 1);
            rec.gh_point = {0, 0, 0};
            rec.gh_point[i] = sign;
            rec.point = gh_to_ml(rec.gh_point);
            rec.jacobian = field_jacobian({rec.point[0], rec.point[1], rec.point[2], 0}, params);
            rec.expected_eigenvalues = expected;
            rec.expected_eigenvectors = table[i];

            Eigen::Matrix3d J;
            for (int r = 0; r < 3; ++r)
                for (int col = 0; col < 3; ++col) J(r, col) = rec.jacobian[r][col];
            Eigen::EigenSolver<Eigen::Matrix3d> es(J);
            const auto vals = es.eigenvalues();
            const auto vecs = es.eigenvectors();
            for (int k = 0; k < 3; ++k) {
                int best = 0;
                for (int m = 1; m < 3; ++m)
                    if (std::abs(vals(m) - expected[k]) < std::abs(vals(best) - expected[k]))
                        best = m;
                rec.eigenvalues[k] = vals(best).real();
                rec.eigenvalue_error = std::max(
                    rec.eigenvalue_error, std::abs(vals(best) - std::complex<double>(expected[k])));
                Eigen::Vector3d v = vecs.col(best).real().normalized();
                rec.eigenvectors[k] = {v(0), v(1), v(2)};
                Eigen::Vector3d t(table[i][k][0], table[i][k][1], table[i][k][2]);
                t.normalize();
                const double err = std::min((v - t).norm(), (v + t).norm());
                rec.eigenvector_error = std::max(rec.eigenvector_error, err);
            }
            out.push_back(rec);
        }
    }
    return out;
}

FlowState section_start(double x, double t, const ModelParams& params) {
    if (!(x > 0 && x <= params.eps_tilde))
        throw ValidationError("section start needs 0 < x <= section.eps_tilde");
    return {x, params.eps_tilde, 1.0 - params.eps_tilde, t};
}

SectionRun section_returns(const FlowState& start, std::size_t n_returns,
                           const ModelParams& params, const SectionOptions& opts) {
    params.validate();
    if (!(start.x > 0)) throw ValidationError("section_returns: start must satisfy x > 0");
    const Coordinates coords = opts.integrate.coordinates;
    const double eps = params.eps_tilde;
    const double level = coords == Coordinates::Log ? std::log(eps) : eps;
    const double period = std::numbers::pi / params.omega;

    std::vector<SectionSpec> sections{kIn3};
    if (opts.mode == ReturnMode::PerSaddle) sections = {kIn3, kIn1, kIn2};

    SectionRun run;
    double min_raw = 0;
    Dopri5 stepper(make_rhs(params, coords), start.t, encode(start, coords), 1.0,
                   opts.integrate.control);
    const double t_stop = std::numeric_limits<double>::max();
    std::size_t since_last = 0;

    while (run.events.size() < n_returns) {
        const Vec3 y0 = stepper.y();
        const DenseStep& d = stepper.step(t_stop);
        if (coords == Coordinates::Linear) {
            Vec3 y = stepper.y();
            if (clamp_octant(y, opts.integrate.control.abs_tol, stepper.t(), min_raw))
                stepper.set_state(y);
        }
        const Vec3 y1 = stepper.y();

        // Collect crossings inside this step in time order.
        std::vector<std::pair<double, const SectionSpec*>> hits;
        for (const auto& sec : sections) {
            const double g0 = y0[sec.cross] - level;
            const double g1 = y1[sec.cross] - level;
            if (!(g0 > 0 && g1 <= 0)) continue;
            const double tol = opts.time_tol * std::max(1.0, std::abs(d.t1()));
            const int idx = sec.cross;
            const double tc =
                locate_root([&](double t) { return d(t)[idx] - level; }, d.t0, d.t1(), tol);
            const Vec3 yc = decode(d(tc), coords);
            if (yc[sec.guard] <= 0.5) continue;
            hits.emplace_back(tc, &sec);
        }
        std::sort(hits.begin(), hits.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [tc, sec] : hits) {
            if (run.events.size() >= n_returns) break;
            const Vec3 raw = d(tc);
            const Vec3 yc = decode(raw, coords);
            // Transversality: the crossing coordinate must be strictly decreasing.
            const Vec3 rate = make_rhs(params, coords)(tc, raw);
            if (!(rate[sec->cross] < 0)) continue;
            SectionEvent ev;
            ev.k = run.events.size();
            ev.saddle = sec->saddle;
            ev.t_raw = tc;
            ev.s = std::fmod(tc, period);
            if (ev.s < 0) ev.s += period;
            ev.state = to_state(yc, tc);
            ev.log_x = coords == Coordinates::Log ? raw[sec->lead] : std::log(yc[sec->lead]);
            ev.x = yc[sec->lead];
            run.events.push_back(ev);
            since_last = 0;
        }

        const Vec3 v = decode(y1, coords);
        if (std::min({v[0], v[1], v[2]}) > eps) {
            run.escaped = true;
            run.escape_time = stepper.t();
            break;
        }
        if (++since_last > opts.max_steps_between) {
            std::ostringstream msg;
            msg << "section_returns: no crossing within " << opts.max_steps_between
                << " steps after t=" << stepper.t() << " (start too close to an invariant plane?)";
            throw NumericError(msg.str());
        }
    }
    run.stats = stepper.stats();
    return run;
}

double dwell_time_estimate(double x_u0, const ModelParams& params) {
    if (!(params.gamma > 0)) throw ValidationError("dwell_time_estimate requires gamma > 0");
    if (!(x_u0 > 0)) throw DomainError("dwell_time_estimate requires x_u0 > 0");
    const double g = params.gamma * x_u0;
    if (g >= 1.0) throw DomainError("dwell_time_estimate: gamma * x_u0 >= 1");
    return std::log(1.0 / g) / params.e;
}

double forcing_memory(double s, const ModelParams& p) {
    const double w4 = 4.0 * p.omega;
    return 0.5 / p.e -
           0.5 * (p.e * std::cos(w4 * s) - w4 * std::sin(w4 * s)) / (p.e * p.e + w4 * w4);
}

double entry_coordinate(double x_in, double t_in, const ModelParams& params) {
    if (!(params.gamma > 0)) throw ValidationError("entry_coordinate requires gamma > 0");
    return (x_in + params.gamma * forcing_memory(t_in, params)) /
           (params.eps_tilde * params.gamma);
}

DwellMeasurement measure_dwell(const FlowState& start, const ModelParams& params,
                               const IntegrateOptions& opts) {
    params.validate();
    const double eps = params.eps_tilde;
    DwellMeasurement m;
    m.t_enter = start.t;
    m.x_in = start.x;
    double min_raw = 0;
    Dopri5 stepper(make_rhs(params, Coordinates::Linear), start.t, to_vec(start), 1.0,
                   opts.control);
    for (std::size_t n = 0;; ++n) {
        if (n > opts.max_steps) throw NumericError("measure_dwell: no exit from the O3 cube");
        const double x0 = stepper.y()[0];
        const DenseStep& d = stepper.step(std::numeric_limits<double>::max());
        Vec3 y = stepper.y();
        if (clamp_octant(y, opts.control.abs_tol, stepper.t(), min_raw)) stepper.set_state(y);
        if (x0 < eps && stepper.y()[0] >= eps) {
            const double tol = 1e-12 * std::max(1.0, std::abs(d.t1()));
            m.t_exit = locate_root([&](double t) { return d(t)[0] - eps; }, d.t0, d.t1(), tol);
            break;
        }
    }
    m.measured = m.t_exit - m.t_enter;
    m.estimated = dwell_time_estimate(entry_coordinate(start.x, start.t, params), params);
    return m;
}

GlobalFit fit_global_constants(const std::vector<SectionEvent>& events,
                               const ModelParams& params) {
    params.validate();
    if (events.size() < 50) throw ValidationError("fit_global_constants needs at least 50 events");
    if (!(params.gamma > 0)) throw ValidationError("fit_global_constants needs gamma > 0");
    const auto dc = derive_constants(params);
    const double to_unit = params.omega / std::numbers::pi;
    const std::size_t n = events.size() - 1;

    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = events[k].s * to_unit;
        A(k, 0) = std::exp(dc.delta * events[k].log_x);
        A(k, 1) = params.gamma;
        A(k, 2) = -params.gamma * std::cos(2.0 * std::numbers::pi * s);
        b(k) = std::exp(events[k + 1].log_x);
    }
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (int j = 0; j < 3; ++j) {
        if (scale(j) == 0) throw NumericError("fit_global_constants: rank-deficient design");
        A.col(j) /= scale(j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    if (sv(2) < 1e-10 * sv(0))
        throw NumericError("fit_global_constants: rank-deficient design (x values nearly equal)");
    Eigen::VectorXd coef = svd.solve(b);
    coef = coef.cwiseQuotient(scale);

    GlobalFit fit;
    fit.samples = n;
    fit.mu = coef(0);
    fit.mu1 = coef(1);
    fit.mu1_sqrt_a1 = coef(2);
    const Eigen::VectorXd res = A * coef.cwiseProduct(scale) - b;
    fit.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(n));

    double cs = 0, sn = 0;
    const double slope = dc.xi * to_unit;
    for (std::size_t k = 0; k < n; ++k) {
        const double phi = (events[k + 1].s - events[k].s) * to_unit + slope * events[k + 1].log_x;
        cs += std::cos(2.0 * std::numbers::pi * phi);
        sn += std::sin(2.0 * std::numbers::pi * phi);
    }
    double mean = std::atan2(sn, cs) / (2.0 * std::numbers::pi);
    if (mean < 0) mean += 1.0;
    fit.mu3 = mean / to_unit;
    fit.phase_spread = 1.0 - std::hypot(cs, sn) / static_cast<double>(n);
    return fit;
}

std::vector<BatchResult> integrate_batch(const std::vector<FlowState>& starts, double t_end,
                                         const ModelParams& params, const IntegrateOptions& opts,
                                         Execution exec) {
    params.validate();
    std::vector<BatchResult> out(starts.size());
    auto one = [&](std::size_t i) {
        BatchResult& r = out[i];
        try {
            const Trajectory tr = integrate(starts[i], t_end, params, opts);
            r.final_state = tr.samples.back();
            r.min_raw_coordinate = tr.min_raw_coordinate;
            r.steps = tr.stats.accepted;
        } catch (const Error& ex) {
            r.ok = false;
            r.error = ex.what();
        }
    };
    const auto n = static_cast<std::ptrdiff_t>(starts.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    }
    return out;
}

}  // namespace mlchaos
