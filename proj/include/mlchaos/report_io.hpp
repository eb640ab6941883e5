#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "mlchaos/diagnostics.hpp"
#include "mlchaos/flow.hpp"
#include "mlchaos/singular_limit.hpp"

namespace mlchaos {

using Json = nlohmann::json;
using CsvCell = std::variant<double, long long, std::string>;

/// RFC-4180 field quoting.
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<CsvCell>& cells);
void write_csv_header(std::ostream& out, const std::vector<std::string>& names);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_events_csv(std::ostream& out, const std::vector<SectionEvent>& events);
void write_orbit_csv(std::ostream& out, const std::vector<CylinderPoint>& orbit);
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
void write_scan_csv(std::ostream& out, const ScanResult& scan);

Json to_json(const RegimeReport& r);
Json to_json(const ScanResult& r);  ///< summary: fraction, prefixes, counts
Json to_json(const ConditionResult& r);
Json to_json(const MisiurewiczCertificate& c);
Json to_json(const TransitionMatrix& t);
Json to_json(const BatteryReport& b);
Json to_json(const AnnulusReport& a);

/// Pretty-printed with sorted keys and a trailing newline.
void write_json(std::ostream& out, const Json& j);

}  // namespace mlchaos
