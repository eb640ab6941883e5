#include "mlchaos/config.hpp"

#include <algorithm>
#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "mlchaos/error.hpp"

namespace mlchaos {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
    double v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw ValidationError("config key " + key + ": not a number '" + text + "'");
    return v;
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
    T v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    if (std::is_unsigned_v<T> && b != e && *b == '-')
        throw ValidationError("config key " + key + ": must be >= 0");
    auto res = std::from_chars(b, e, v);
    if (res.ec == std::errc::result_out_of_range)
        throw ValidationError("config key " + key + ": out of range");
    if (res.ec != std::errc() || res.ptr != e)
        throw ValidationError("config key " + key + ": not an integer '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ValidationError("config key " + key + ": expected true or false, got '" + text + "'");
}

struct Binding {
    std::string section;
    std::string name;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <class Access>
Binding real(std::string section, std::string name, Access acc) {
    return {std::move(section), std::move(name),
            [acc](RunConfig& c, const std::string& k, const std::string& v) { acc(c) = parse_double(k, v); },
            [acc](const RunConfig& c) -> std::optional<std::string> { return format_number(acc(c)); }};
}

template <class Access>
Binding integer(std::string section, std::string name, Access acc) {
    return {std::move(section), std::move(name),
            [acc](RunConfig& c, const std::string& k, const std::string& v) {
                using T = std::remove_reference_t<decltype(acc(c))>;
                acc(c) = parse_integer<T>(k, v);
            },
            [acc](const RunConfig& c) -> std::optional<std::string> { return std::to_string(acc(c)); }};
}

template <class Access>
Binding optional_real(std::string section, std::string name, Access acc) {
    return {std::move(section), std::move(name),
            [acc](RunConfig& c, const std::string& k, const std::string& v) { acc(c) = parse_double(k, v); },
            [acc](const RunConfig& c) -> std::optional<std::string> {
                if (!acc(c)) return std::nullopt;
                return format_number(*acc(c));
            }};
}

#define FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = [] {
        std::vector<Binding> t{
            real("model", "c", FIELD(model.c)),
            real("model", "e", FIELD(model.e)),
            real("model", "gamma", FIELD(model.gamma)),
            real("model", "omega", FIELD(model.omega)),
            real("global-maps", "mu", FIELD(model.mu)),
            real("global-maps", "mu1", FIELD(model.mu1)),
            real("global-maps", "mu2", FIELD(model.mu2)),
            real("global-maps", "mu3", FIELD(model.mu3)),
            real("global-maps", "mu4", FIELD(model.mu4)),
            real("global-maps", "mu5", FIELD(model.mu5)),
            real("global-maps", "Delta1", FIELD(model.Delta1)),
            real("global-maps", "Delta2", FIELD(model.Delta2)),
            real("global-maps", "Delta3", FIELD(model.Delta3)),
            real("section", "eps_tilde", FIELD(model.eps_tilde)),
            real("numerics", "rel_tol", FIELD(numerics.rel_tol)),
            real("numerics", "abs_tol", FIELD(numerics.abs_tol)),
            real("numerics", "max_step", FIELD(numerics.max_step)),
            integer("numerics", "horizon", FIELD(numerics.horizon)),
            integer("numerics", "seed", FIELD(numerics.seed)),
            real("numerics", "gamma_plus", FIELD(numerics.gamma_plus)),
            real("numerics", "u_radius", FIELD(numerics.u_radius)),
            integer("numerics", "M0", FIELD(numerics.M0)),
            real("numerics", "d0", FIELD(numerics.d0)),
            real("numerics", "lambda_tol", FIELD(numerics.lambda_tol)),
            real("numerics", "k_threshold", FIELD(numerics.k_threshold)),
            real("numerics", "case34_factor", FIELD(numerics.case34_factor)),
            real("regime", "gamma_pow_tol", FIELD(regime.gamma_pow_tol)),
            real("regime", "omega_small", FIELD(regime.omega_small)),
            real("regime", "omega_large", FIELD(regime.omega_large)),
            real("regime", "xi_factor", FIELD(regime.xi_factor)),
            real("regime", "C", FIELD(regime.C)),
            real("scan", "from", FIELD(scan.from)),
            real("scan", "to", FIELD(scan.to)),
            integer("scan", "steps", FIELD(scan.steps)),
            integer("scan", "iterations", FIELD(scan.iterations)),
            integer("scan", "burn_in", FIELD(scan.burn_in)),
            integer("scan", "zo_length", FIELD(scan.zo_length)),
            integer("scan", "n_c", FIELD(scan.n_c)),
            optional_real("certify", "d1", FIELD(certify.d1)),
            optional_real("certify", "d2", FIELD(certify.d2)),
            integer("certify", "n_max", FIELD(certify.n_max)),
        };
        t.push_back({"scan", "axis",
                     [](RunConfig& c, const std::string&, const std::string& v) { c.scan.axis = v; },
                     [](const RunConfig& c) -> std::optional<std::string> { return c.scan.axis; }});
        t.push_back({"scan", "log",
                     [](RunConfig& c, const std::string& k, const std::string& v) { c.scan.log = parse_bool(k, v); },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         return std::string(c.scan.log ? "true" : "false");
                     }});
        return t;
    }();
    return table;
}

#undef FIELD

const std::array<const char*, 7> kSections = {"model", "global-maps", "section", "numerics",
                                              "regime", "scan", "certify"};

std::string strip_comments(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line[first] == '#') line.clear();
        out << line << '\n';
    }
    return out.str();
}

}  // namespace

void RunConfig::validate() const {
    model.validate();
    const auto& n = numerics;
    if (!(n.rel_tol > 0)) throw ValidationError("numerics.rel_tol must be > 0");
    if (!(n.abs_tol > 0)) throw ValidationError("numerics.abs_tol must be > 0");
    if (!(n.max_step > 0)) throw ValidationError("numerics.max_step must be > 0");
    if (n.horizon < 1) throw ValidationError("numerics.horizon must be >= 1");
    if (!(n.gamma_plus > 0 && n.gamma_plus < 1)) throw ValidationError("numerics.gamma_plus must lie in (0, 1)");
    if (!(n.u_radius > 0 && n.u_radius < 0.5)) throw ValidationError("numerics.u_radius must lie in (0, 0.5)");
    if (n.M0 < 1) throw ValidationError("numerics.M0 must be >= 1");
    if (!(n.d0 > 0)) throw ValidationError("numerics.d0 must be > 0");
    if (!(n.lambda_tol >= 0)) throw ValidationError("numerics.lambda_tol must be >= 0");
    if (!(n.k_threshold > 0 && n.k_threshold < 1)) throw ValidationError("numerics.k_threshold must lie in (0, 1)");
    if (!(n.case34_factor > 0)) throw ValidationError("numerics.case34_factor must be > 0");
    const auto& r = regime;
    if (!(r.gamma_pow_tol > 0)) throw ValidationError("regime.gamma_pow_tol must be > 0");
    if (!(r.omega_small > 0 && r.omega_small < r.omega_large))
        throw ValidationError("regime.omega_small must lie in (0, regime.omega_large)");
    if (!(r.xi_factor > 0)) throw ValidationError("regime.xi_factor must be > 0");
    if (!(r.C > 2)) throw ValidationError("regime.C must be > 2");
    const auto& s = scan;
    if (s.axis != "gamma") throw ValidationError("scan.axis: only 'gamma' is supported, got '" + s.axis + "'");
    if (!(s.from > 0 && s.from < s.to)) throw ValidationError("scan.from must satisfy 0 < scan.from < scan.to");
    if (s.steps < 1) throw ValidationError("scan.steps must be >= 1");
    if (s.iterations < 10000) throw ValidationError("scan.iterations must be >= 10000");
    if (s.burn_in < 0) throw ValidationError("scan.burn_in must be >= 0");
    if (s.zo_length < 1000) throw ValidationError("scan.zo_length must be >= 1000");
    if (s.n_c < 1) throw ValidationError("scan.n_c must be >= 1");
    if (certify.n_max < 1) throw ValidationError("certify.n_max must be >= 1");
    if (certify.d1 && !(*certify.d1 > 0)) throw ValidationError("certify.d1 must be > 0");
    if (certify.d2 && !(*certify.d2 >= 0)) throw ValidationError("certify.d2 must be >= 0");
}

RunConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(strip_comments(text));
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("malformed config: ") + e.message() + " at line " +
                              std::to_string(e.line()));
    }
    RunConfig cfg;
    const auto& table = bindings();
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ValidationError("config key '" + section + "' is outside any section");
        if (std::find_if(kSections.begin(), kSections.end(), [&](const char* s) { return section == s; }) ==
            kSections.end())
            throw ValidationError("unknown config section [" + section + "]");
        for (const auto& [name, value] : body) {
            const std::string key = section + "." + name;
            auto it = std::find_if(table.begin(), table.end(),
                                   [&](const Binding& b) { return b.section == section && b.name == name; });
            if (it == table.end()) throw ValidationError("unknown config key " + key);
            it->set(cfg, key, value.get_value<std::string>());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream out;
    bool first = true;
    for (const char* section : kSections) {
        if (!first) out << '\n';
        first = false;
        out << '[' << section << "]\n";
        for (const auto& b : bindings()) {
            if (b.section != section) continue;
            if (auto v = b.get(cfg)) out << b.name << " = " << *v << '\n';
        }
    }
    return out.str();
}

}  // namespace mlchaos
