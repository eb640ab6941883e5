#include "mlchaos/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "mlchaos/error.hpp"
#include "mlchaos/singular_limit.hpp"

namespace mlchaos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Rotation number of a nondecreasing degree-one lift, with Richardson correction.
std::pair<double, bool> monotone_rotation(const std::function<double(double)>& G, int n) {
    double x = 0.0;
    for (int i = 0; i < n; ++i) x = G(x);
    const double rho_n = x / n;
    for (int i = 0; i < n; ++i) x = G(x);
    const double rho_2n = x / (2.0 * n);
    const bool ok = std::abs(rho_2n - rho_n) <= std::max(1e-3, 2.0 / n);
    return {2 * rho_2n - rho_n, ok};
}

/// Local maxima and minima of a circle map, from sign changes of h' on a grid.
/// Zeros of h' without a sign change (inflections) are not extrema and are skipped.
void turning_points(const CircleMap& map, std::vector<double>& maxima, std::vector<double>& minima,
                    int grid = 1 << 12) {
    std::vector<double> v(grid);
    for (int j = 0; j < grid; ++j) v[j] = map.d1(static_cast<double>(j) / grid);
    int last = -1;
    for (int j = grid - 1; j >= 0 && last < 0; --j)
        if (v[j] != 0) last = j - grid;
    if (last < -grid) return;  // h' vanishes on the whole grid
    for (int j = 0; j < grid; ++j) {
        if (v[j] == 0) continue;
        const double prev = v[(last + grid) % grid];
        if ((prev > 0) != (v[j] > 0)) {
            const double a = static_cast<double>(last) / grid, b = static_cast<double>(j) / grid;
            std::uintmax_t iters = 100;
            auto stop = [](double l, double r) { return std::abs(r - l) <= 1e-15; };
            auto [l, r] = boost::math::tools::toms748_solve(map.d1, a, b, prev, v[j], stop, iters);
            (prev > 0 ? maxima : minima).push_back(0.5 * (l + r));
        }
        last = j;
    }
}

}  // namespace

std::optional<double> x_star(double gamma, double delta) {
    if (!(delta > 1)) throw ValidationError("x_star requires delta > 1");
    if (!(gamma >= 0)) throw ValidationError("x_star requires gamma >= 0");
    if (gamma == 0) return 0.0;
    auto f = [=](double x) { return std::pow(x, delta) + gamma - x; };
    const double xm = std::pow(delta, -1.0 / (delta - 1));
    const double fm = f(xm);
    if (!(fm < 0)) return std::nullopt;
    std::uintmax_t iters = 200;
    auto stop = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(std::abs(a), std::abs(b)); };
    auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, xm, gamma, fm, stop, iters);
    return 0.5 * (a + b);
}

AnnulusReport annulus_check(const ModelParams& params, int s_points, int r_points) {
    const auto d = derive_constants(params);
    AnnulusReport rep;
    if (!(params.gamma > 0)) {
        rep.note = "annulus not defined: gamma = 0";
        return rep;
    }
    if (!d.x_star) {
        rep.note = "annulus not defined: no stable fixed point";
        return rep;
    }
    rep.lo = *d.x_star - 2 * params.gamma * d.sqrt_a1;
    rep.hi = *d.x_star + 2 * params.gamma * d.sqrt_a1;
    if (!(rep.lo > 0)) {
        rep.note = "annulus not defined: x* - 2 gamma sqrt(a1) <= 0";
        return rep;
    }
    rep.defined = true;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < r_points; ++i) {
        const double x = rep.lo + (rep.hi - rep.lo) * i / (r_points - 1);
        for (int j = 0; j < s_points; ++j) {
            const CylinderPoint p{x, static_cast<double>(j) / s_points, Modulus::Unit};
            const CylinderPoint img = case12_map(p, params);
            const double m = std::min(img.x - rep.lo, rep.hi - img.x);
            if (m < rep.worst_margin) {
                rep.worst_margin = m;
                rep.worst_point = p;
            }
        }
    }
    rep.invariant = rep.worst_margin >= 0;
    return rep;
}

double t1_curve(double xi, double omega, double C) {
    const double u = C / (xi * omega);
    if (u > 30) {
        const double em = std::exp(-u);
        return (1 - em) / (1 - em / C);
    }
    const double m = std::expm1(u);
    return m / (m + 1 - 1 / C);
}

double t2_curve(double xi, double omega) { return 1.0 / std::sqrt(1 + (xi * omega) * (xi * omega)); }

HorseshoeResult horseshoe_condition(double C, const ModelParams& params) {
    if (!(C > 2)) throw ValidationError("horseshoe constant C must exceed 2");
    const auto d = derive_constants(params);
    HorseshoeResult r;
    r.t1 = t1_curve(d.xi, params.omega, C);
    r.sqrt_a1 = d.sqrt_a1;
    r.margin = r.sqrt_a1 - r.t1;
    r.holds = r.t1 < r.sqrt_a1 && r.sqrt_a1 < 1;
    return r;
}

std::vector<RegionRow> region_curves(const std::vector<double>& xi_grid, double omega, double C) {
    if (!(C > 2)) throw ValidationError("horseshoe constant C must exceed 2");
    if (!(omega > 0)) throw ValidationError("omega must be > 0");
    std::vector<RegionRow> out;
    for (double xi : xi_grid) {
        if (!(xi > 0)) throw ValidationError("region_curves: xi must be > 0");
        out.push_back({xi, t1_curve(xi, omega, C), t2_curve(xi, omega)});
    }
    return out;
}

std::string region_label(double sqrt_a1, double t1, double t2) {
    if (sqrt_a1 < t2) return "I";
    if (sqrt_a1 > t1) return "III";
    return "II/IV";
}

RegimeReport classify_regime(const ModelParams& params, const RegimeThresholds& th) {
    const auto d = derive_constants(params);
    RegimeReport r;
    r.delta = d.delta;
    r.omega = params.omega;
    r.xi = d.xi;
    r.mu1 = params.mu1;
    r.gamma = params.gamma;
    r.gamma_pow = std::pow(params.gamma, d.delta - 1);
    r.t1 = t1_curve(d.xi, params.omega, th.C);
    r.t2 = t2_curve(d.xi, params.omega);
    r.sqrt_a1 = d.sqrt_a1;
    r.xi_minus_threshold = d.xi - th.xi_factor * params.mu1;
    r.region = region_label(r.sqrt_a1, r.t1, r.t2);
    if (params.omega <= th.omega_small) {
        r.case_tag = r.gamma_pow > th.gamma_pow_tol ? 1 : 2;
    } else if (params.omega >= th.omega_large) {
        r.case_tag = r.xi_minus_threshold < 0 ? 3 : 4;
    }
    if (!r.case_tag) r.attractor = "indeterminate regime";
    else if (*r.case_tag == 1) r.attractor = "invariant closed curve";
    else if (*r.case_tag == 2) r.attractor = "horseshoes and strange attractors";
    else if (*r.case_tag == 3) r.attractor = "invertible torus";
    else r.attractor = "non-invertible torus";
    return r;
}

Lyapunov2D lyapunov_2d(const ReturnMapVariant& variant, const CylinderPoint& point0, int iterations,
                       const ModelParams& params, int burn_in) {
    if (iterations < 10000) throw ValidationError("lyapunov_2d needs at least 10^4 iterations");
    CylinderPoint p = point0;
    p.modulus = variant.modulus();
    double v1[2] = {1, 0}, v2[2] = {0, 1};
    double sum1 = 0, sum2 = 0, sum_det = 0;
    for (int i = 0; i < burn_in + iterations; ++i) {
        MapJacobian J;
        try {
            J = jacobian(p, variant, params);
            p = apply(variant, p, params);
        } catch (const DomainError& e) {
            std::ostringstream msg;
            msg << "lyapunov_2d: orbit left the domain at iterate " << i << " (" << e.what() << ")";
            throw NumericError(msg.str());
        }
        if (!(p.x > 0)) {
            std::ostringstream msg;
            msg << "lyapunov_2d: orbit left the domain (x <= 0) at iterate " << i + 1;
            throw NumericError(msg.str());
        }
        const auto& m = J.d;
        double w1[2] = {m[0][0] * v1[0] + m[0][1] * v1[1], m[1][0] * v1[0] + m[1][1] * v1[1]};
        double w2[2] = {m[0][0] * v2[0] + m[0][1] * v2[1], m[1][0] * v2[0] + m[1][1] * v2[1]};
        const double r11 = std::hypot(w1[0], w1[1]);
        v1[0] = w1[0] / r11;
        v1[1] = w1[1] / r11;
        const double proj = v1[0] * w2[0] + v1[1] * w2[1];
        w2[0] -= proj * v1[0];
        w2[1] -= proj * v1[1];
        const double r22 = std::hypot(w2[0], w2[1]);
        if (r22 > 0) {
            v2[0] = w2[0] / r22;
            v2[1] = w2[1] / r22;
        } else {
            v2[0] = -v1[1];
            v2[1] = v1[0];
        }
        if (i >= burn_in) {
            sum1 += std::log(r11);
            sum2 += std::log(r22);
            sum_det += std::log(std::abs(J.det));
        }
    }
    Lyapunov2D out;
    out.lambda1 = sum1 / iterations;
    out.lambda2 = sum2 / iterations;
    if (out.lambda2 > out.lambda1) std::swap(out.lambda1, out.lambda2);
    out.mean_log_det = sum_det / iterations;
    out.sum_residual = std::abs(out.lambda1 + out.lambda2 - out.mean_log_det);
    out.last = p;
    return out;
}

RotationInterval rotation_interval(const CircleMap& map, const std::vector<double>& seeds,
                                   int iterations) {
    if (map.degree != 1) throw ValidationError("rotation_interval needs a degree-one map");
    if (iterations < 1) throw ValidationError("rotation_interval needs iterations >= 1");
    std::vector<double> maxima, minima;
    turning_points(map, maxima, minima);
    const auto& F = map.lift;
    auto upper = [&](double x) {
        double v = F(x);
        for (double c : maxima) v = std::max(v, F(c + std::floor(x - c)));
        return v;
    };
    auto lower = [&](double x) {
        double v = F(x);
        for (double c : minima) v = std::min(v, F(c + std::ceil(x - c)));
        return v;
    };
    RotationInterval r;
    const auto [lo, ok_lo] = monotone_rotation(lower, iterations);
    const auto [hi, ok_hi] = monotone_rotation(upper, iterations);
    r.lo = std::min(lo, hi);
    r.hi = std::max(lo, hi);
    r.converged = ok_lo && ok_hi;
    r.width = r.hi - r.lo;
    r.is_point = r.width < 1e-3;
    r.seed_min = std::numeric_limits<double>::infinity();
    r.seed_max = -std::numeric_limits<double>::infinity();
    for (double s0 : seeds) {
        double x = s0;
        for (int i = 0; i < 2 * iterations; ++i) x = F(x);
        const double rho = (x - s0) / (2.0 * iterations);
        r.seed_min = std::min(r.seed_min, rho);
        r.seed_max = std::max(r.seed_max, rho);
    }
    return r;
}

std::vector<double> phase_observable(const std::vector<CylinderPoint>& orbit, const ModelParams& params) {
    const double half = std::numbers::pi / params.omega;
    std::vector<double> out;
    out.reserve(orbit.size());
    for (const auto& p : orbit)
        out.push_back(std::cos(kTwoPi * (p.modulus == Modulus::Unit ? p.s : p.s / half)));
    return out;
}

ZeroOneResult zero_one_test(const std::vector<double>& series, int n_c, std::uint64_t seed) {
    const std::size_t N = series.size();
    if (N < 1000) throw ValidationError("zero_one_test needs a series of length >= 1000");
    if (n_c < 1) throw ValidationError("zero_one_test needs n_c >= 1");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(N);
    double var = 0;
    for (double v : series) var += (v - mean) * (v - mean);
    if (!(var > 0)) throw DomainError("zero_one_test: constant series");

    std::mt19937_64 rng(seed);
    const std::size_t n_cut = N / 10;
    const std::size_t span = N - n_cut;
    std::vector<double> p(N + 1), q(N + 1), ns(n_cut), D(n_cut);
    for (std::size_t n = 1; n <= n_cut; ++n) ns[n - 1] = static_cast<double>(n);
    ZeroOneResult out;
    for (int k = 0; k < n_c; ++k) {
        const double c = kPi / 5 + (3 * kPi / 5) * unit_uniform(rng);
        p[0] = q[0] = 0;
        for (std::size_t j = 1; j <= N; ++j) {
            p[j] = p[j - 1] + series[j - 1] * std::cos(static_cast<double>(j) * c);
            q[j] = q[j - 1] + series[j - 1] * std::sin(static_cast<double>(j) * c);
        }
        for (std::size_t n = 1; n <= n_cut; ++n) {
            double acc = 0;
            for (std::size_t j = 0; j < span; ++j) {
                const double dp = p[j + n] - p[j], dq = q[j + n] - q[j];
                acc += dp * dp + dq * dq;
            }
            const double osc = mean * mean * (1 - std::cos(static_cast<double>(n) * c)) / (1 - std::cos(c));
            D[n - 1] = acc / static_cast<double>(span) - osc;
        }
        out.per_frequency.push_back(pearson(ns, D));
    }
    out.K_raw = median(out.per_frequency);
    out.K = std::clamp(out.K_raw, 0.0, 1.0);
    return out;
}

Autocorrelation autocorrelation(const std::vector<double>& series, int max_lag) {
    if (max_lag < 1) throw ValidationError("autocorrelation needs max_lag >= 1");
    const std::size_t N = series.size();
    if (N < 10 * static_cast<std::size_t>(max_lag))
        throw ValidationError("autocorrelation needs a series of length >= 10 * max_lag");
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(N);
    double c0 = 0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(N);
    if (!(c0 > 0)) throw DomainError("autocorrelation: degenerate variance");
    Autocorrelation out;
    out.rho.resize(max_lag + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double acc = 0;
        for (std::size_t i = 0; i + k < N; ++i) acc += (series[i] - mean) * (series[i + k] - mean);
        out.rho[k] = acc / static_cast<double>(N) / c0;
    }
    std::vector<double> env(max_lag + 1);
    double run = 0;
    for (int k = max_lag; k >= 0; --k) {
        run = std::max(run, std::abs(out.rho[k]));
        env[k] = run;
    }
    const double floor = 3.0 / std::sqrt(static_cast<double>(N));
    std::vector<double> xs, ys;
    for (int k = 0; k <= max_lag && env[k] > floor; ++k) {
        xs.push_back(k);
        ys.push_back(std::log(env[k]));
    }
    out.fitted_lags = static_cast<int>(xs.size());
    if (xs.size() >= 2) {
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        out.decay_rate = -sxy / sxx;
    } else {
        // Envelope is below the noise floor from lag 1 on: decay faster than -ln(floor) per lag.
        out.decay_rate = -std::log(floor);
    }
    return out;
}

CurveFit fit_invariant_curve(const std::vector<CylinderPoint>& points, int harmonics) {
    if (harmonics < 0) throw ValidationError("fit_invariant_curve: harmonics must be >= 0");
    const int cols = 1 + 2 * harmonics;
    if (points.size() < static_cast<std::size_t>(cols))
        throw ValidationError("fit_invariant_curve: not enough points");
    Eigen::MatrixXd A(points.size(), cols);
    Eigen::VectorXd b(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        A(i, 0) = 1;
        for (int h = 1; h <= harmonics; ++h) {
            A(i, 2 * h - 1) = std::cos(kTwoPi * h * points[i].s);
            A(i, 2 * h) = std::sin(kTwoPi * h * points[i].s);
        }
        b(i) = points[i].x;
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    CurveFit fit;
    fit.coefficients.assign(coef.data(), coef.data() + coef.size());
    fit.max_spread = (A * coef - b).cwiseAbs().maxCoeff();
    fit.points = points.size();
    return fit;
}

std::uint64_t sample_seed(std::uint64_t seed, double gamma) {
    return splitmix64(seed ^ std::bit_cast<std::uint64_t>(gamma));
}

namespace {

ScanSample scan_one(double gamma, const ModelParams& base, const ScanOptions& opts) {
    ScanSample s;
    s.gamma = gamma;
    try {
        ModelParams p = base;
        p.gamma = gamma;
        p.validate();
        const auto d = derive_constants(p);
        const ReturnMapVariant var{VariantKind::Case12, 0, 0};
        const CylinderPoint start{gamma * p.mu1, opts.s0, Modulus::Unit};
        const auto ly = lyapunov_2d(var, start, opts.iterations, p, opts.burn_in);
        s.lambda1 = ly.lambda1;
        s.lambda2 = ly.lambda2;
        const auto orbit = iterate_map(var, ly.last, opts.zo_length - 1, p);
        s.K = zero_one_test(phase_observable(orbit, p), opts.n_c, sample_seed(opts.seed, gamma)).K;
        const CircleMap h = singular_limit_map(circle_spec(p, phase_offset(gamma, p)));
        const auto rot = rotation_interval(h, {0.0, 0.25, 0.5, 0.75}, opts.rotation_iterations);
        s.rot_lo = rot.lo;
        s.rot_hi = rot.hi;
        const auto xs = d.x_star;
        s.annulus_defined = xs && *xs - 2 * gamma * d.sqrt_a1 > 0;
        s.chaotic = s.lambda1 > opts.lambda_tol && s.K > opts.k_threshold;
    } catch (const Error& e) {
        s.ok = false;
        s.chaotic = false;
        s.error = e.what();
    }
    return s;
}

}  // namespace

ScanResult density_scan(const std::vector<double>& gamma_grid, const ModelParams& params,
                        const ScanOptions& opts, Execution exec) {
    params.validate();
    if (gamma_grid.empty()) throw ValidationError("density_scan: empty grid");
    ScanResult res;
    res.grid = gamma_grid;
    std::sort(res.grid.begin(), res.grid.end());
    for (std::size_t i = 0; i < res.grid.size(); ++i) {
        if (!(res.grid[i] > 0)) throw ValidationError("density_scan: gamma values must be > 0");
        if (i > 0 && res.grid[i] == res.grid[i - 1])
            throw ValidationError("density_scan: grid must be strictly increasing");
    }
    res.samples.resize(res.grid.size());
    const auto n = static_cast<std::ptrdiff_t>(res.grid.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) res.samples[i] = scan_one(res.grid[i], params, opts);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) res.samples[i] = scan_one(res.grid[i], params, opts);
    }
    int hits = 0;
    for (const auto& s : res.samples) hits += s.chaotic ? 1 : 0;
    res.fraction = static_cast<double>(hits) / static_cast<double>(res.samples.size());

    std::vector<double> cuts;
    const int first = static_cast<int>(std::ceil(std::log10(res.grid.front())));
    const int last = static_cast<int>(std::floor(std::log10(res.grid.back())));
    for (int k = first; k <= last; ++k) cuts.push_back(std::pow(10.0, k));
    if (cuts.empty() || cuts.back() < res.grid.back()) cuts.push_back(res.grid.back());
    for (double r : cuts) {
        PrefixFraction pf{r, 0, 0};
        int h = 0;
        for (const auto& s : res.samples) {
            if (s.gamma > r) break;
            ++pf.count;
            h += s.chaotic ? 1 : 0;
        }
        if (pf.count == 0) continue;
        pf.fraction = static_cast<double>(h) / pf.count;
        res.prefixes.push_back(pf);
    }
    return res;
}

}  // namespace mlchaos
