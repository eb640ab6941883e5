#include "mlchaos/singular_limit.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mlchaos/diagnostics.hpp"
#include "mlchaos/error.hpp"
#include "mlchaos/return_map.hpp"

namespace mlchaos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

/// Signed circle difference a - b in [-1/2, 1/2).
double circle_diff(double a, double b) {
    double d = a - b;
    d -= std::floor(d + 0.5);
    return d;
}

template <class F>
double solve_bracket(F f, double lo, double hi, double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    std::uintmax_t iters = 200;
    auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (a + b);
}

struct UnionU {
    std::vector<double> centers;
    double radius;
    bool contains(double s) const {
        for (double c : centers)
            if (std::abs(circle_diff(s, c)) < radius) return true;
        return false;
    }
    double distance(double s) const {
        double d = kInf;
        for (double c : centers) d = std::min(d, std::abs(circle_diff(s, c)));
        return d;
    }
};

std::vector<Interval> monotone_intervals(const std::vector<CriticalPoint>& crit) {
    std::vector<Interval> out;
    if (crit.empty()) return {{0.0, 1.0}};
    for (std::size_t i = 0; i < crit.size(); ++i) {
        const double lo = crit[i].s;
        const double hi = i + 1 < crit.size() ? crit[i + 1].s : crit[0].s + 1.0;
        out.push_back({lo, hi});
    }
    return out;
}

std::size_t interval_of(const std::vector<Interval>& J, double s) {
    for (std::size_t i = 0; i < J.size(); ++i) {
        const double t = s + std::ceil(J[i].lo - s);  // shift into [lo, lo + 1)
        if (t >= J[i].lo && t < J[i].hi) return i;
    }
    return J.size() - 1;
}

/// Lift image of a monotone branch, as an ordered pair.
Interval branch_image(const CircleMap& h, const Interval& J) {
    const double y1 = h.lift(J.lo);
    const double y2 = h.lift(J.hi);
    return {std::min(y1, y2), std::max(y1, y2)};
}

}  // namespace

double k_map(double x, const ModelParams& params) {
    if (!(x > 0)) throw DomainError("k_map: argument must be > 0");
    const auto d = derive_constants(params);
    return -d.K_omega * d.xi * std::log(x);
}

double k_inverse(double y, const ModelParams& params) {
    const auto d = derive_constants(params);
    return std::exp(-y / (d.K_omega * d.xi));
}

int admissible_n0(const ModelParams& params, double gamma_plus) {
    if (!(gamma_plus > 0 && gamma_plus < 1)) throw ValidationError("gamma_plus must lie in (0, 1)");
    int n = static_cast<int>(std::floor(k_map(gamma_plus, params)));
    while (k_inverse(n, params) >= gamma_plus) ++n;
    while (n > 0 && k_inverse(n - 1, params) < gamma_plus) --n;
    return n;
}

double gamma_sequence(int n, double a, const ModelParams& params, double gamma_plus) {
    if (!(a >= 0 && a < 1)) throw DomainError("gamma_sequence: offset a must lie in [0, 1)");
    const int n0 = admissible_n0(params, gamma_plus);
    if (n < n0) {
        std::ostringstream msg;
        msg << "gamma_sequence: n = " << n << " is below n0 = " << n0 << " for gamma_plus = "
            << gamma_plus;
        throw DomainError(msg.str());
    }
    return k_inverse(n + a, params);
}

std::vector<CriticalPoint> critical_set(const CircleMap& map, int grid) {
    std::vector<double> roots;
    double prev = map.d1(0.0);
    for (int j = 0; j < grid; ++j) {
        const double s0 = static_cast<double>(j) / grid;
        const double s1 = static_cast<double>(j + 1) / grid;
        const double v1 = map.d1(s1);
        if (prev == 0) {
            roots.push_back(s0);
        } else if ((prev < 0) != (v1 < 0) && v1 != 0) {
            roots.push_back(solve_bracket(map.d1, s0, s1, 1e-15));
        }
        prev = v1;
    }
    std::vector<CriticalPoint> out;
    for (double r : roots) {
        r = reduce(r, 1.0);
        if (!out.empty() && std::abs(circle_diff(r, out.back().s)) < 1e-12) continue;
        const double d2 = map.d2(r);
        if (std::abs(d2) < 1e-8) {
            std::ostringstream msg;
            msg << "degenerate critical point at s = " << r << " (|h''| = " << std::abs(d2) << ")";
            throw NumericError(msg.str());
        }
        out.push_back({r, d2});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
    if (out.size() > 1 && std::abs(circle_diff(out.front().s, out.back().s)) < 1e-12)
        out.pop_back();
    return out;
}

std::vector<ConvergenceRow> singular_limit_convergence(int n_first, int n_last, double a,
                                                       const ModelParams& params,
                                                       const ConvergenceOptions& opts) {
    if (n_last < n_first) throw ValidationError("singular_limit_convergence: empty n range");
    const auto d = derive_constants(params);
    const CircleMap h = singular_limit_map(circle_spec(params, a));
    const double k = d.xi * params.omega / kPi;
    const double q = d.sqrt_a1;
    const double hs = 1e-3;
    std::vector<ConvergenceRow> rows;
    for (int n = n_first; n <= n_last; ++n) {
        ConvergenceRow row;
        row.n = n;
        row.gamma = gamma_sequence(n, a, params, opts.gamma_plus);
        const double gp = std::pow(row.gamma, d.p);
        row.x_top = opts.shrink_x ? opts.x_max * gp : opts.x_max;

        auto f1 = [&](double x, double s) {
            return gp * (std::pow(x, d.delta) + 1 - q * std::cos(kTwoPi * s));
        };
        auto diff2 = [&](double x, double s) {
            return -k * std::log1p(std::pow(x, d.delta) / (1 - q * std::cos(kTwoPi * s)));
        };
        for (int i = 0; i <= opts.x_points; ++i) {
            const double x = row.x_top * i / opts.x_points;
            for (int j = 0; j < opts.s_points; ++j) {
                const double s = static_cast<double>(j) / opts.s_points;
                const CylinderPoint img = rescaled_map_at({x, s, Modulus::Unit}, row.gamma, a, params);
                row.sup_f1 = std::max(row.sup_f1, std::abs(img.x));
                row.sup_f2 = std::max(row.sup_f2, std::abs(circle_diff(img.s, h(s))));
                for (auto comp : {0, 1}) {
                    auto D = [&](double t) { return comp == 0 ? f1(x, t) : diff2(x, t); };
                    const double p1 = D(s + hs), m1 = D(s - hs), p2 = D(s + 2 * hs),
                                 m2 = D(s - 2 * hs), c0 = D(s);
                    row.sup_ds1 = std::max(row.sup_ds1, std::abs((p1 - m1) / (2 * hs)));
                    row.sup_ds2 = std::max(row.sup_ds2, std::abs((p1 - 2 * c0 + m1) / (hs * hs)));
                    row.sup_ds3 = std::max(row.sup_ds3,
                                           std::abs((p2 - 2 * p1 + 2 * m1 - m2) / (2 * hs * hs * hs)));
                }
                if (x > 0) {
                    const double xd = d.delta * std::pow(x, d.delta - 1);
                    const double u = std::pow(x, d.delta) + 1 - q * std::cos(kTwoPi * s);
                    row.sup_dx = std::max({row.sup_dx, gp * xd, k * xd / u});
                }
            }
        }
        row.total = std::max({row.sup_f1, row.sup_f2, row.sup_ds1, row.sup_ds2, row.sup_ds3,
                              row.sup_dx});
        rows.push_back(row);
    }
    return rows;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Vacuous: return "vacuous";
        case Verdict::NotCheckable: return "not-checkable";
    }
    return "?";
}

bool MisiurewiczCertificate::passes() const {
    auto ok = [](const ConditionResult& c) {
        return c.verdict == Verdict::Pass || c.verdict == Verdict::Vacuous;
    };
    return lambda0 > 0 && ok(outside_a) && ok(outside_b) && ok(critical_orbits) && ok(inside_a) &&
           ok(inside_b);
}

MisiurewiczCertificate misiurewicz_check(const CircleMap& h, const MisiurewiczOptions& opts) {
    if (opts.horizon < 1 || opts.samples < 1) throw ValidationError("misiurewicz_check: empty grid");
    if (!(opts.d0 > 0 && opts.d0 <= 1)) throw ValidationError("misiurewicz_check: d0 must lie in (0, 1]");
    if (!(opts.u_radius > 0)) throw ValidationError("misiurewicz_check: U radius must be > 0");
    MisiurewiczCertificate cert;
    cert.map_name = h.name;
    cert.critical = critical_set(h);
    cert.M0 = opts.M0;
    cert.d0 = opts.d0;
    cert.horizon = opts.horizon;
    UnionU U{{}, opts.u_radius};
    for (const auto& c : cert.critical) {
        U.centers.push_back(c.s);
        cert.U.push_back({c.s - opts.u_radius, c.s + opts.u_radius});
    }
    const bool no_crit = cert.critical.empty();

    // (1a) and (1b): orbit segments that avoid U.
    double lam_min = kInf;
    double lam_s = 0;
    int lam_m = 0;
    struct Entry {
        double logd;
        int m;
        double s;
    };
    std::vector<Entry> entries;
    for (int j = 0; j < opts.samples; ++j) {
        const double x0 = (j + 0.5) / opts.samples;
        if (U.contains(x0)) continue;
        double x = x0, logd = 0;
        for (int m = 1; m <= opts.horizon; ++m) {
            logd += std::log(std::abs(h.d1(x)));
            x = h(x);
            if (m >= opts.M0 && logd / m < lam_min) {
                lam_min = logd / m;
                lam_s = x0;
                lam_m = m;
            }
            if (U.contains(x)) {
                entries.push_back({logd, m, x0});
                break;
            }
        }
    }
    cert.lambda0 = opts.lambda0_target.value_or(lam_min);
    cert.outside_a.witness_s = lam_s;
    cert.outside_a.witness_m = lam_m;
    if (lam_min == kInf) {
        cert.outside_a.verdict = Verdict::NotCheckable;
        cert.outside_a.note = "no U-avoiding segment reached M0";
        cert.lambda0 = 0;
    } else {
        cert.outside_a.margin = lam_min - (opts.lambda0_target ? *opts.lambda0_target : 0.0);
        const bool ok = lam_min > 0 && (!opts.lambda0_target || lam_min >= *opts.lambda0_target);
        cert.outside_a.verdict = ok ? Verdict::Pass : Verdict::Fail;
        cert.outside_a.note = "smallest log|(h^m)'|/m over sampled segments, m >= M0";
    }

    if (entries.empty()) {
        cert.outside_b.verdict = no_crit ? Verdict::Vacuous : Verdict::NotCheckable;
        cert.outside_b.note = no_crit ? "no critical set" : "no sampled segment entered U";
    } else {
        cert.outside_b.margin = kInf;
        for (const auto& e : entries) {
            const double margin = e.logd - cert.lambda0 * e.m - std::log(opts.d0);
            if (margin < cert.outside_b.margin) {
                cert.outside_b.margin = margin;
                cert.outside_b.witness_s = e.s;
                cert.outside_b.witness_m = e.m;
            }
        }
        cert.outside_b.verdict = cert.outside_b.margin >= 0 ? Verdict::Pass : Verdict::Fail;
    }

    if (no_crit) {
        for (auto* c : {&cert.critical_orbits, &cert.inside_a, &cert.inside_b}) {
            c->verdict = Verdict::Vacuous;
            c->note = "no critical set";
        }
        return cert;
    }

    // (2) critical orbits avoid U.
    cert.critical_orbits.verdict = Verdict::Pass;
    cert.critical_orbits.margin = kInf;
    for (const auto& c : cert.critical) {
        double x = h(c.s);
        for (int i = 1; i <= opts.horizon; ++i) {
            const double margin = U.distance(x) - opts.u_radius;
            if (margin < cert.critical_orbits.margin) {
                cert.critical_orbits.margin = margin;
                cert.critical_orbits.witness_s = c.s;
                cert.critical_orbits.witness_m = i;
            }
            if (U.contains(x)) {
                cert.critical_orbits.verdict = Verdict::Fail;
                break;
            }
            x = h(x);
        }
    }

    // (3a) h'' keeps the sign of the critical point on each component of U.
    const int per_side = opts.inside_samples;
    cert.inside_a.verdict = Verdict::Pass;
    cert.inside_a.margin = kInf;
    for (const auto& c : cert.critical) {
        for (int k = -per_side; k <= per_side; ++k) {
            const double s = c.s + opts.u_radius * k / per_side;
            const double v = h.d2(s) * (c.d2 > 0 ? 1.0 : -1.0);
            if (v < cert.inside_a.margin) {
                cert.inside_a.margin = v;
                cert.inside_a.witness_s = reduce(s, 1.0);
            }
        }
    }
    if (!(cert.inside_a.margin > 0)) cert.inside_a.verdict = Verdict::Fail;

    // (3b) recovery of derivative by the first return to U.
    cert.inside_b.margin = kInf;
    for (const auto& c : cert.critical) {
        for (int k = -per_side; k <= per_side; ++k) {
            if (k == 0) continue;
            const double s = reduce(c.s + opts.u_radius * k / (per_side + 1), 1.0);
            double y = s, logd = 0, best = -kInf;
            int best_m = 0;
            for (int i = 1; i <= opts.horizon; ++i) {
                logd += std::log(std::abs(h.d1(y)));
                y = h(y);
                const double margin = logd - cert.lambda0 * i / 3.0 + std::log(opts.d0);
                if (margin > best) {
                    best = margin;
                    best_m = i;
                }
                if (U.contains(y)) break;
            }
            if (best < cert.inside_b.margin) {
                cert.inside_b.margin = best;
                cert.inside_b.witness_s = s;
                cert.inside_b.witness_m = best_m;
            }
        }
    }
    cert.inside_b.verdict = cert.inside_b.margin >= 0 ? Verdict::Pass : Verdict::Fail;
    return cert;
}

TransitionMatrix transition_matrix(const CircleMap& h, std::optional<double> lambda0) {
    TransitionMatrix tm;
    const auto crit = critical_set(h);
    tm.intervals = monotone_intervals(crit);
    if (lambda0) tm.lambda_condition = std::exp(*lambda0 / 3.0) > 2.0;
    const std::size_t r = tm.intervals.size();
    if (crit.empty()) {
        tm.applicable = false;
        tm.Q = {{1}};
        tm.N = 1;
        return tm;
    }
    constexpr double tol = 1e-12;
    tm.Q.assign(r, std::vector<int>(r, 0));
    for (std::size_t i = 0; i < r; ++i) {
        Interval J = tm.intervals[i];
        Interval img{h.lift(J.lo), h.lift(J.lo)};
        const double y_hi = (i + 1 == r) ? h.lift(crit[0].s) + h.degree : h.lift(J.hi);
        img = {std::min(img.lo, y_hi), std::max(img.hi, y_hi)};
        for (std::size_t m = 0; m < r; ++m) {
            if (img.hi - img.lo >= 1.0 - tol) {
                tm.Q[i][m] = 1;
                continue;
            }
            const Interval& Jm = tm.intervals[m];
            const double shift = std::ceil(img.lo - Jm.lo - tol);
            tm.Q[i][m] = (Jm.lo + shift >= img.lo - tol && Jm.hi + shift <= img.hi + tol) ? 1 : 0;
        }
    }
    std::vector<std::vector<int>> P = tm.Q;
    for (std::size_t N = 1; N <= r * r; ++N) {
        bool all = true;
        for (const auto& row : P)
            for (int v : row) all = all && v > 0;
        if (all) {
            tm.N = static_cast<int>(N);
            break;
        }
        std::vector<std::vector<int>> next(r, std::vector<int>(r, 0));
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b)
                for (std::size_t c = 0; c < r; ++c)
                    if (P[a][c] && tm.Q[c][b]) next[a][b] = 1;
        P = std::move(next);
    }
    return tm;
}

namespace {

/// Continuation of the critical value p = h_a(c) to the offset a_new by matching the
/// itinerary of its forward orbit under h_a (depth iterates), then pulling back.
std::optional<double> continue_by_itinerary(const ModelParams& params, double a, double a_new,
                                            double c, const std::vector<Interval>& J, int depth) {
    const CircleMap h = singular_limit_map(circle_spec(params, a));
    const CircleMap g = singular_limit_map(circle_spec(params, a_new));
    std::vector<double> orbit{h(c)};
    for (int j = 0; j < depth; ++j) orbit.push_back(h(orbit.back()));
    double q = orbit.back();
    for (int j = depth - 1; j >= 0; --j) {
        const Interval& branch = J[interval_of(J, orbit[j])];
        const Interval img = branch_image(g, branch);
        // Choose the lift of the target closest to the unperturbed lift value.
        const double ref = h.lift(orbit[j] + std::ceil(branch.lo - orbit[j]));
        double target = q + std::round(ref - q);
        if (target < img.lo) target += std::ceil(img.lo - target);
        if (target > img.hi) target -= std::ceil(target - img.hi);
        if (target < img.lo || target > img.hi) return std::nullopt;
        const double s = solve_bracket([&](double t) { return g.lift(t) - target; }, branch.lo,
                                       branch.hi, 1e-15);
        q = reduce(s, 1.0);
    }
    return q;
}

}  // namespace

const HypothesisResult& BatteryReport::get(const std::string& name) const {
    for (const auto& r : results)
        if (r.name == name) return r;
    throw ValidationError("no hypothesis named " + name);
}

BatteryReport hypothesis_battery(const ModelParams& params, int n, double a,
                                 const BatteryOptions& opts) {
    params.validate();
    BatteryReport rep;
    rep.n = n;
    rep.a = a;
    rep.gamma = gamma_sequence(n, a, params, opts.gamma_plus);
    const auto d = derive_constants(params);
    const CircleMap h = singular_limit_map(circle_spec(params, a));

    // H1(3): determinant ratio on the absorbing region, in rescaled coordinates.
    {
        HypothesisResult r{"H1", Verdict::Fail, "", 0, std::nullopt};
        const double scale = std::pow(rep.gamma, 1.0 / d.delta);
        double lo, hi;
        const auto xs = x_star(rep.gamma, d.delta);
        if (xs && *xs - 2 * rep.gamma * d.sqrt_a1 > 0) {
            lo = (*xs - 2 * rep.gamma * d.sqrt_a1) / scale;
            hi = (*xs + 2 * rep.gamma * d.sqrt_a1) / scale;
            r.detail = "invariant annulus";
        } else {
            const double gp = std::pow(rep.gamma, d.p);
            lo = gp * (1 - d.sqrt_a1);
            hi = gp * (2 + d.sqrt_a1);
            r.detail = "annulus undefined; absorbing band of the rescaled family";
        }
        const ReturnMapVariant var{VariantKind::Rescaled, rep.gamma, a};
        double dmin = kInf, dmax = 0;
        for (int i = 0; i <= 32; ++i)
            for (int j = 0; j < 32; ++j) {
                const double x = lo + (hi - lo) * i / 32;
                const double det = std::abs(jacobian({x, j / 32.0, Modulus::Unit}, var, params).det);
                dmin = std::min(dmin, det);
                dmax = std::max(dmax, det);
            }
        r.value = dmax / dmin;
        r.reference = std::pow(hi / lo, d.delta - 1);
        r.verdict = r.value <= *r.reference * (1 + 1e-10) ? Verdict::Pass : Verdict::Fail;
        rep.results.push_back(r);
    }

    // H2 / H3: convergence table along gamma_(n,a).
    {
        const auto rows =
            singular_limit_convergence(n, n + opts.convergence_window - 1, a, params,
                                       ConvergenceOptions{1.0, 256, 16, true, opts.gamma_plus});
        bool decreasing = true;
        for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].total < rows[i - 1].total;
        HypothesisResult r2{"H2", decreasing ? Verdict::Pass : Verdict::Fail,
                            "sup distance to (0, h_a) along the sequence", rows.back().sup_f1 + rows.back().sup_f2, std::nullopt};
        HypothesisResult r3{"H3", decreasing ? Verdict::Pass : Verdict::Fail,
                            "finite-difference derivative distances up to order 3", rows.back().total, std::nullopt};
        rep.results.push_back(r2);
        rep.results.push_back(r3);
    }

    // H4: Misiurewicz certificate of h_a.
    rep.certificate = misiurewicz_check(h, opts.misiurewicz);
    rep.results.push_back({"H4", rep.certificate.passes() ? Verdict::Pass : Verdict::Fail,
                           rep.certificate.critical.empty() ? "no critical points" : "finite-horizon certificate",
                           rep.certificate.lambda0, std::nullopt});

    // H5: indicative slope comparison.
    {
        HypothesisResult r{"H5", Verdict::NotCheckable, "", 0, std::nullopt};
        if (rep.certificate.critical.empty()) {
            r.detail = "no critical points";
        } else {
            const auto J = monotone_intervals(rep.certificate.critical);
            const double eps = 1e-6;
            double worst = kInf;
            bool ok = true;
            for (const auto& c : rep.certificate.critical) {
                const auto up = continue_by_itinerary(params, a, reduce(a + eps, 1.0), c.s, J, opts.itinerary_depth);
                const auto dn = continue_by_itinerary(params, a, reduce(a - eps, 1.0), c.s, J, opts.itinerary_depth);
                if (!up || !dn) {
                    ok = false;
                    break;
                }
                const double slope = circle_diff(*up, *dn) / (2 * eps);
                worst = std::min(worst, std::abs(slope - 1.0));
            }
            if (ok) {
                r.value = worst;
                r.verdict = worst > opts.transversality_tol ? Verdict::Pass : Verdict::Fail;
                r.detail = "indicative: |dp/da - d/da h_a(c)| by itinerary matching";
            } else {
                r.detail = "indicative check failed: itinerary could not be continued";
            }
        }
        rep.results.push_back(r);
    }

    // H6: x-derivative of the singular limit at x = 0.
    {
        const double gp = std::pow(rep.gamma, d.p);
        const double computed = gp * d.delta * std::pow(0.0, d.delta - 1);
        rep.results.push_back({"H6", computed != 0 ? Verdict::Pass : Verdict::Fail,
                               "d/dx of the first component at x = 0; reference value is the stated one",
                               computed, 1.0});
    }

    // H7: mixing.
    rep.transitions = transition_matrix(h, rep.certificate.lambda0);
    {
        HypothesisResult r{"H7", Verdict::Fail, "", 0, std::nullopt};
        if (!rep.transitions.applicable) {
            r.verdict = Verdict::NotCheckable;
            r.detail = "no critical points";
        } else {
            const bool lam = rep.transitions.lambda_condition.value_or(false);
            r.verdict = (lam && rep.transitions.N) ? Verdict::Pass : Verdict::Fail;
            r.detail = std::string("exp(lambda0/3) > 2: ") + (lam ? "yes" : "no") +
                       "; Q^N > 0: " + (rep.transitions.N ? "N=" + std::to_string(*rep.transitions.N) : "none");
            r.value = rep.transitions.N.value_or(0);
        }
        rep.results.push_back(r);
    }
    return rep;
}

std::vector<MisiurewiczCertificate> certify_offsets(const ModelParams& params,
                                                    const std::vector<double>& offsets,
                                                    const MisiurewiczOptions& opts, Execution exec) {
    params.validate();
    std::vector<MisiurewiczCertificate> out(offsets.size());
    std::vector<std::string> errors(offsets.size());
    auto one = [&](std::size_t i) {
        try {
            out[i] = misiurewicz_check(singular_limit_map(circle_spec(params, offsets[i])), opts);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    };
    const auto n = static_cast<std::ptrdiff_t>(offsets.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) one(static_cast<std::size_t>(i));
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericError(e);
    return out;
}

Lyapunov1D lyapunov_1d(const CircleMap& h, double s0, int iterations) {
    if (iterations < 1000) throw ValidationError("lyapunov_1d needs at least 1000 iterations");
    constexpr int burn = 100;
    Lyapunov1D out;
    for (int attempt = 0; attempt < 10; ++attempt) {
        double s = reduce(s0 + 1e-9 * attempt, 1.0);
        out.s0_used = s;
        double sum = 0;
        bool hit = false;
        for (int i = 0; i < burn + iterations; ++i) {
            const double dv = std::abs(h.d1(s));
            if (dv == 0) {
                hit = true;
                break;
            }
            if (i >= burn) sum += std::log(dv);
            s = h(s);
        }
        if (!hit) {
            out.lambda = sum / iterations;
            return out;
        }
        ++out.resamples;
    }
    throw NumericError("lyapunov_1d: orbit keeps hitting a critical point");
}

}  // namespace mlchaos
