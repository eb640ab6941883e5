#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mlchaos/diagnostics.hpp"
#include "mlchaos/params.hpp"

namespace mlchaos {

struct NumericsConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 50.0;
    int horizon = 1000;          ///< Misiurewicz orbit horizon
    std::uint64_t seed = 1;
    double gamma_plus = 0.05;
    double u_radius = 1e-2;
    int M0 = 10;
    double d0 = 0.1;
    double lambda_tol = 1e-3;
    double k_threshold = 0.9;
    double case34_factor = 2.0;  ///< invertibility split at xi = factor * mu1

    bool operator==(const NumericsConfig&) const = default;
};

struct ScanConfig {
    std::string axis = "gamma";
    double from = 1e-6;
    double to = 0.05;
    int steps = 200;
    bool log = true;
    int iterations = 20000;
    int burn_in = 1000;
    int zo_length = 2000;
    int n_c = 32;

    bool operator==(const ScanConfig&) const = default;
};

struct CertifyConfig {
    std::optional<double> d1;  ///< Diophantine bounds; no defaults
    std::optional<double> d2;
    int n_max = 2;

    bool operator==(const CertifyConfig&) const = default;
};

struct RunConfig {
    ModelParams model;  ///< model, global-maps and section.eps_tilde
    NumericsConfig numerics;
    RegimeThresholds regime;
    ScanConfig scan;
    CertifyConfig certify;

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Parses sectioned key = value text. Unknown keys and malformed values throw
/// ValidationError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key with its current value; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace mlchaos
