#include "mlchaos/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>

#include "mlchaos/config.hpp"
#include "mlchaos/diagnostics.hpp"
#include "mlchaos/error.hpp"
#include "mlchaos/flow.hpp"
#include "mlchaos/report_io.hpp"
#include "mlchaos/singular_limit.hpp"

namespace mlchaos {

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output;
    bool dump = false;
    bool serial = false;
};

/// Writes to --output when given, otherwise to the default stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ValidationError("cannot open output file '" + path + "'");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

IntegrateOptions integrate_options(const RunConfig& cfg, const std::string& coords) {
    IntegrateOptions o;
    o.control.rel_tol = cfg.numerics.rel_tol;
    o.control.abs_tol = cfg.numerics.abs_tol;
    o.control.max_step = cfg.numerics.max_step;
    if (coords == "log") o.coordinates = Coordinates::Log;
    else if (coords != "linear") throw ValidationError("--coords must be 'linear' or 'log'");
    return o;
}

MisiurewiczOptions misiurewicz_options(const RunConfig& cfg) {
    MisiurewiczOptions m;
    m.u_radius = cfg.numerics.u_radius;
    m.horizon = cfg.numerics.horizon;
    m.M0 = cfg.numerics.M0;
    m.d0 = cfg.numerics.d0;
    return m;
}

std::vector<double> scan_grid(const ScanConfig& s) {
    std::vector<double> g;
    for (int i = 1; i <= s.steps; ++i) {
        const double f = static_cast<double>(i) / s.steps;
        g.push_back(s.log ? s.from * std::pow(s.to / s.from, f) : s.from + (s.to - s.from) * f);
    }
    g.back() = s.to;
    return g;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forced May-Leonard heteroclinic network: simulation, return maps and chaos diagnostics",
                 "mlchaos"};
    app.fallthrough();
    Common common;
    app.add_option("--config", common.config_path, "Sectioned key = value configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", common.seed, "Seed for every randomised step (overrides numerics.seed)");
    app.add_option("-o,--output", common.output, "Output file (default: standard output)");
    app.add_flag("--dump-config", common.dump, "Print the effective configuration and exit");
    app.add_flag("--serial", common.serial, "Disable the OpenMP fan-out in scan and certify");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Integrate the forced flow from one initial state; CSV t,x,y,z");
    double sim_x0 = 1e-3, sim_t_end = 100;
    std::optional<double> sim_y0, sim_z0;
    std::string sim_coords = "linear";
    sim->add_option("--x0", sim_x0, "Initial x (y, z default to the In(O3) section values)");
    sim->add_option("--y0", sim_y0, "Initial y");
    sim->add_option("--z0", sim_z0, "Initial z");
    sim->add_option("--t-end", sim_t_end, "Final time (may be negative)");
    sim->add_option("--coords", sim_coords, "linear or log");

    // poincare
    auto* poi = app.add_subcommand(
        "poincare", "Record crossings of the entry section In(O3) (or of every saddle); CSV k,x,s,t_raw,log_x,saddle");
    double poi_x0 = 1e-3;
    std::size_t poi_returns = 10;
    std::string poi_mode = "full", poi_coords = "linear";
    poi->add_option("--x0", poi_x0, "Leading coordinate of the start on the section");
    poi->add_option("--returns", poi_returns, "Number of crossings to record");
    poi->add_option("--mode", poi_mode, "full (In(O3) only) or per-saddle");
    poi->add_option("--coords", poi_coords, "linear or log (log is needed at gamma = 0)");

    // return-map
    auto* rmap = app.add_subcommand("return-map", "Iterate an analytic first-return map; CSV k,x,s");
    std::string rm_variant = "case12";
    int rm_iters = 1000, rm_n = 0;
    double rm_x0 = 0.5, rm_s0 = 0.25, rm_a = 0;
    rmap->add_option("--variant", rm_variant, "full, case12, case34 or rescaled");
    rmap->add_option("--iters", rm_iters, "Number of orbit rows, including the start");
    rmap->add_option("--x0", rm_x0, "Initial x");
    rmap->add_option("--s0", rm_s0, "Initial phase (time units for full, unit period otherwise)");
    rmap->add_option("--n", rm_n, "Sequence index of the amplitude (rescaled only)");
    rmap->add_option("--a", rm_a, "Phase offset in [0, 1) (rescaled only)");

    // singular-limit
    auto* sl = app.add_subcommand(
        "singular-limit", "Distance of the rescaled family to the circle map h_a along gamma_(n,a); CSV table");
    double sl_a = 0.3;
    std::optional<int> sl_first, sl_last;
    bool sl_certify = false;
    sl->add_option("--a", sl_a, "Phase offset in [0, 1)");
    sl->add_option("--n-first", sl_first, "First index (default: smallest admissible)");
    sl->add_option("--n-last", sl_last, "Last index (default: first + 7)");
    sl->add_flag("--certify", sl_certify, "Emit the Misiurewicz certificate of h_a as JSON instead");

    // certify
    auto* cert = app.add_subcommand(
        "certify", "Run the hypothesis battery H1-H7 for h_a at one (n, a), or certify a grid of offsets; JSON");
    std::optional<int> ce_n;
    double ce_a = 0.3;
    int ce_offsets = 0;
    cert->add_option("--n", ce_n, "Sequence index (default: smallest admissible)");
    cert->add_option("--a", ce_a, "Phase offset in [0, 1)");
    cert->add_option("--offsets", ce_offsets, "Certify h_a for a = j / K, j < K, instead of the battery");

    // classify
    auto* cls = app.add_subcommand(
        "classify", "Classify the parameter regime (Cases 1-4) and the horseshoe region; JSON");
    bool cls_annulus = false;
    cls->add_flag("--annulus", cls_annulus, "Include the invariant-annulus check");

    // scan
    auto* sc = app.add_subcommand(
        "scan", "Density of chaotic samples (positive exponent and 0-1 statistic) over a gamma grid; CSV and JSON");
    std::optional<std::string> sc_axis;
    std::optional<double> sc_from, sc_to;
    std::optional<int> sc_steps;
    bool sc_log = false, sc_linear = false;
    std::string sc_summary;
    sc->add_option("--axis", sc_axis, "Scanned parameter (gamma)");
    sc->add_option("--from", sc_from, "Lower end (excluded)");
    sc->add_option("--to", sc_to, "Upper end (included)");
    sc->add_option("--steps", sc_steps, "Number of samples");
    sc->add_flag("--log", sc_log, "Logarithmic spacing");
    sc->add_flag("--linear", sc_linear, "Linear spacing");
    sc->add_option("--summary", sc_summary, "JSON summary path (default: <output>.json, or stderr)");

    // chaos-test
    auto* ct = app.add_subcommand(
        "chaos-test", "Lyapunov exponents, 0-1 statistic and autocorrelation decay of one orbit; JSON");
    std::string ct_variant = "case12";
    int ct_iters = 20000, ct_lag = 50, ct_n = 0;
    double ct_x0 = 0.01, ct_s0 = 0.123, ct_a = 0;
    ct->add_option("--variant", ct_variant, "full, case12, case34 or rescaled");
    ct->add_option("--iters", ct_iters, "Iterations after burn-in");
    ct->add_option("--x0", ct_x0, "Initial x");
    ct->add_option("--s0", ct_s0, "Initial phase");
    ct->add_option("--max-lag", ct_lag, "Largest autocorrelation lag");
    ct->add_option("--n", ct_n, "Sequence index (rescaled only)");
    ct->add_option("--a", ct_a, "Phase offset (rescaled only)");

    app.require_subcommand(0, 1);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    // CLI11 routes a subcommand's --help through the subcommand itself.
    for (auto* sub : app.get_subcommands())
        if (sub->get_help_ptr()->count()) {
            out << sub->help();
            return 0;
        }

    try {
        RunConfig cfg = common.config_path.empty() ? RunConfig{} : load_config(common.config_path);
        if (common.seed) cfg.numerics.seed = *common.seed;
        if (sc_axis) cfg.scan.axis = *sc_axis;
        if (sc_from) cfg.scan.from = *sc_from;
        if (sc_to) cfg.scan.to = *sc_to;
        if (sc_steps) cfg.scan.steps = *sc_steps;
        if (sc_log && sc_linear) throw ValidationError("--log and --linear are exclusive");
        if (sc_log) cfg.scan.log = true;
        if (sc_linear) cfg.scan.log = false;
        cfg.validate();
        const ModelParams& P = cfg.model;
        const Execution exec = common.serial ? Execution::Serial : Execution::Parallel;

        if (common.dump) {
            Sink sink(common.output, out);
            sink.get() << dump_config(cfg);
            return 0;
        }
        if (app.get_subcommands().empty()) {
            err << app.help();
            return 1;
        }

        if (*sim) {
            FlowState s0 = section_start(sim_x0, 0, P);
            if (sim_y0) s0.y = *sim_y0;
            if (sim_z0) s0.z = *sim_z0;
            const auto traj = integrate(s0, sim_t_end, P, integrate_options(cfg, sim_coords));
            Sink sink(common.output, out);
            write_trajectory_csv(sink.get(), traj);
        } else if (*poi) {
            SectionOptions so;
            so.integrate = integrate_options(cfg, poi_coords);
            if (poi_mode == "per-saddle") so.mode = ReturnMode::PerSaddle;
            else if (poi_mode != "full") throw ValidationError("--mode must be 'full' or 'per-saddle'");
            const auto runres = section_returns(section_start(poi_x0, 0, P), poi_returns, P, so);
            Sink sink(common.output, out);
            write_events_csv(sink.get(), runres.events);
            if (runres.escaped)
                err << "note: trajectory left the network neighbourhood at t = " << format_number(runres.escape_time)
                    << '\n';
        } else if (*rmap) {
            if (rm_iters < 1) throw ValidationError("--iters must be >= 1");
            ReturnMapVariant var{parse_variant(rm_variant), 0, 0};
            if (var.kind == VariantKind::Rescaled) {
                var.a = rm_a;
                var.gamma = gamma_sequence(rm_n, rm_a, P, cfg.numerics.gamma_plus);
            }
            const auto orbit = iterate_map(var, {rm_x0, rm_s0, var.modulus()}, rm_iters - 1, P);
            Sink sink(common.output, out);
            write_orbit_csv(sink.get(), orbit);
        } else if (*sl) {
            if (sl_certify) {
                const auto c = misiurewicz_check(singular_limit_map(circle_spec(P, sl_a)), misiurewicz_options(cfg));
                Sink sink(common.output, out);
                write_json(sink.get(), to_json(c));
            } else {
                const int first = sl_first.value_or(admissible_n0(P, cfg.numerics.gamma_plus));
                const int last = sl_last.value_or(first + 7);
                ConvergenceOptions co;
                co.gamma_plus = cfg.numerics.gamma_plus;
                const auto rows = singular_limit_convergence(first, last, sl_a, P, co);
                Sink sink(common.output, out);
                write_convergence_csv(sink.get(), rows);
            }
        } else if (*cert) {
            if (ce_offsets > 0) {
                std::vector<double> offs;
                for (int j = 0; j < ce_offsets; ++j) offs.push_back(static_cast<double>(j) / ce_offsets);
                const auto certs = certify_offsets(P, offs, misiurewicz_options(cfg), exec);
                Json arr = Json::array();
                for (std::size_t i = 0; i < certs.size(); ++i) {
                    Json j = to_json(certs[i]);
                    j["a"] = offs[i];
                    arr.push_back(j);
                }
                Sink sink(common.output, out);
                write_json(sink.get(), arr);
            } else {
                BatteryOptions bo;
                bo.gamma_plus = cfg.numerics.gamma_plus;
                bo.misiurewicz = misiurewicz_options(cfg);
                const int n = ce_n.value_or(admissible_n0(P, cfg.numerics.gamma_plus));
                const auto rep = hypothesis_battery(P, n, ce_a, bo);
                Json j = to_json(rep);
                if (cfg.certify.d1 && cfg.certify.d2) {
                    const auto dio = check_c1a_c1b(P, {*cfg.certify.d1, *cfg.certify.d2, cfg.certify.n_max});
                    j["diophantine"] = {{"c1a", dio.c1a},
                                        {"c1b_up_to_n_max", dio.c1b_up_to_n_max},
                                        {"n_max", cfg.certify.n_max},
                                        {"worst_pair", {dio.worst_pair.first, dio.worst_pair.second}},
                                        {"worst_margin", dio.worst_margin}};
                }
                Sink sink(common.output, out);
                write_json(sink.get(), j);
            }
        } else if (*cls) {
            Json j = to_json(classify_regime(P, cfg.regime));
            if (cls_annulus) j["annulus"] = to_json(annulus_check(P));
            Sink sink(common.output, out);
            write_json(sink.get(), j);
        } else if (*sc) {
            ScanOptions so;
            so.iterations = cfg.scan.iterations;
            so.burn_in = cfg.scan.burn_in;
            so.zo_length = cfg.scan.zo_length;
            so.n_c = cfg.scan.n_c;
            so.seed = cfg.numerics.seed;
            so.lambda_tol = cfg.numerics.lambda_tol;
            so.k_threshold = cfg.numerics.k_threshold;
            const auto res = density_scan(scan_grid(cfg.scan), P, so, exec);
            {
                Sink sink(common.output, out);
                write_scan_csv(sink.get(), res);
            }
            std::string summary = sc_summary;
            if (summary.empty() && !common.output.empty()) summary = common.output + ".json";
            Sink sink(summary, err);
            write_json(sink.get(), to_json(res));
        } else if (*ct) {
            ReturnMapVariant var{parse_variant(ct_variant), 0, 0};
            if (var.kind == VariantKind::Rescaled) {
                var.a = ct_a;
                var.gamma = gamma_sequence(ct_n, ct_a, P, cfg.numerics.gamma_plus);
            }
            const auto ly = lyapunov_2d(var, {ct_x0, ct_s0, var.modulus()}, ct_iters, P);
            const auto orbit = iterate_map(var, ly.last, ct_iters - 1, P);
            const auto series = phase_observable(orbit, P);
            const auto zo = zero_one_test(series, cfg.scan.n_c, cfg.numerics.seed);
            const auto ac = autocorrelation(series, ct_lag);
            Json j;
            j["variant"] = ct_variant;
            j["lambda1"] = ly.lambda1;
            j["lambda2"] = ly.lambda2;
            j["mean_log_det"] = ly.mean_log_det;
            j["K"] = zo.K;
            j["K_raw"] = zo.K_raw;
            j["decay_rate"] = std::isfinite(ac.decay_rate) ? Json(ac.decay_rate) : Json(nullptr);
            j["fitted_lags"] = ac.fitted_lags;
            j["chaotic"] = ly.lambda1 > cfg.numerics.lambda_tol && zo.K > cfg.numerics.k_threshold;
            Sink sink(common.output, out);
            write_json(sink.get(), j);
        }
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace mlchaos
