#include "mlchaos/report_io.hpp"

#include <cmath>

#include "mlchaos/config.hpp"

namespace mlchaos {

namespace {

Json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);  // JSON has no inf/nan literals
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

}  // namespace

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<CsvCell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) out << format_number(v);
                else if constexpr (std::is_same_v<T, long long>) out << v;
                else out << csv_escape(v);
            },
            cells[i]);
    }
    out << '\n';
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& names) {
    std::vector<CsvCell> cells(names.begin(), names.end());
    write_csv_row(out, cells);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    write_csv_header(out, {"t", "x", "y", "z"});
    for (const auto& s : traj.samples) write_csv_row(out, {s.t, s.x, s.y, s.z});
}

void write_events_csv(std::ostream& out, const std::vector<SectionEvent>& events) {
    write_csv_header(out, {"k", "x", "s", "t_raw", "log_x", "saddle"});
    for (const auto& e : events)
        write_csv_row(out, {static_cast<long long>(e.k), e.x, e.s, e.t_raw, e.log_x,
                            static_cast<long long>(e.saddle)});
}

void write_orbit_csv(std::ostream& out, const std::vector<CylinderPoint>& orbit) {
    write_csv_header(out, {"k", "x", "s"});
    for (std::size_t k = 0; k < orbit.size(); ++k)
        write_csv_row(out, {static_cast<long long>(k), orbit[k].x, orbit[k].s});
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    write_csv_header(out, {"n", "gamma", "x_top", "sup_f1", "sup_f2", "sup_ds1", "sup_ds2", "sup_ds3",
                           "sup_dx", "total"});
    for (const auto& r : rows)
        write_csv_row(out, {static_cast<long long>(r.n), r.gamma, r.x_top, r.sup_f1, r.sup_f2, r.sup_ds1,
                            r.sup_ds2, r.sup_ds3, r.sup_dx, r.total});
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
    write_csv_header(out, {"gamma", "lambda1", "lambda2", "K", "rot_lo", "rot_hi", "annulus_defined",
                           "chaotic", "ok", "error"});
    for (const auto& s : scan.samples)
        write_csv_row(out, {s.gamma, s.lambda1, s.lambda2, s.K, s.rot_lo, s.rot_hi,
                            static_cast<long long>(s.annulus_defined), static_cast<long long>(s.chaotic),
                            static_cast<long long>(s.ok), s.error});
}

Json to_json(const RegimeReport& r) {
    Json j;
    j["case_tag"] = r.case_tag ? Json(*r.case_tag) : Json(nullptr);
    j["delta"] = number(r.delta);
    j["omega"] = number(r.omega);
    j["xi"] = number(r.xi);
    j["mu1"] = number(r.mu1);
    j["gamma"] = number(r.gamma);
    j["gamma_pow"] = number(r.gamma_pow);
    j["t1"] = number(r.t1);
    j["t2"] = number(r.t2);
    j["sqrt_a1"] = number(r.sqrt_a1);
    j["xi_minus_threshold"] = number(r.xi_minus_threshold);
    j["attractor"] = r.attractor;
    j["region"] = r.region;
    return j;
}

Json to_json(const ScanResult& r) {
    Json j;
    j["axis"] = r.axis;
    j["samples"] = r.samples.size();
    int chaotic = 0, failed = 0, annulus = 0;
    for (const auto& s : r.samples) {
        chaotic += s.chaotic;
        failed += !s.ok;
        annulus += s.annulus_defined;
    }
    j["chaotic"] = chaotic;
    j["failed"] = failed;
    j["annulus_defined"] = annulus;
    j["fraction"] = number(r.fraction);
    j["from"] = number(r.grid.front());
    j["to"] = number(r.grid.back());
    Json pre = Json::array();
    for (const auto& p : r.prefixes) pre.push_back({{"r", number(p.r)}, {"count", p.count}, {"fraction", number(p.fraction)}});
    j["prefixes"] = pre;
    return j;
}

Json to_json(const ConditionResult& r) {
    return {{"verdict", verdict_name(r.verdict)},
            {"margin", number(r.margin)},
            {"witness_s", number(r.witness_s)},
            {"witness_m", r.witness_m},
            {"note", r.note}};
}

Json to_json(const MisiurewiczCertificate& c) {
    Json j;
    j["map"] = c.map_name;
    Json crit = Json::array();
    for (const auto& p : c.critical) crit.push_back({{"s", number(p.s)}, {"d2", number(p.d2)}});
    j["critical"] = crit;
    Json u = Json::array();
    for (const auto& i : c.U) u.push_back({number(i.lo), number(i.hi)});
    j["U"] = u;
    j["lambda0"] = number(c.lambda0);
    j["M0"] = c.M0;
    j["d0"] = number(c.d0);
    j["horizon"] = c.horizon;
    j["finite_horizon"] = c.finite_horizon;
    j["conditions"] = {{"outside_a", to_json(c.outside_a)},
                       {"outside_b", to_json(c.outside_b)},
                       {"critical_orbits", to_json(c.critical_orbits)},
                       {"inside_a", to_json(c.inside_a)},
                       {"inside_b", to_json(c.inside_b)}};
    j["passes"] = c.passes();
    return j;
}

Json to_json(const TransitionMatrix& t) {
    Json j;
    j["applicable"] = t.applicable;
    j["N"] = t.N ? Json(*t.N) : Json(nullptr);
    j["lambda_condition"] = t.lambda_condition ? Json(*t.lambda_condition) : Json(nullptr);
    j["Q"] = t.Q;
    Json iv = Json::array();
    for (const auto& i : t.intervals) iv.push_back({number(i.lo), number(i.hi)});
    j["intervals"] = iv;
    return j;
}

Json to_json(const BatteryReport& b) {
    Json j;
    j["n"] = b.n;
    j["a"] = number(b.a);
    j["gamma"] = number(b.gamma);
    Json hs = Json::object();
    for (const auto& h : b.results)
        hs[h.name] = {{"verdict", verdict_name(h.verdict)},
                      {"detail", h.detail},
                      {"value", number(h.value)},
                      {"reference", optional_number(h.reference)}};
    j["hypotheses"] = hs;
    j["certificate"] = to_json(b.certificate);
    j["transitions"] = to_json(b.transitions);
    return j;
}

Json to_json(const AnnulusReport& a) {
    return {{"defined", a.defined},
            {"invariant", a.invariant},
            {"lo", number(a.lo)},
            {"hi", number(a.hi)},
            {"worst_margin", number(a.worst_margin)},
            {"worst_point", {number(a.worst_point.x), number(a.worst_point.s)}},
            {"note", a.note}};
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

}  // namespace mlchaos
