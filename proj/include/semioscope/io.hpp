#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semioscope/capacity.hpp"
#include "semioscope/certify.hpp"
#include "semioscope/channel.hpp"
#include "semioscope/estimation.hpp"

namespace semioscope {

// ---- scenarios -------------------------------------------------------------

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);

/// Accepts either "builtin:<name>" or a path to a scenario JSON file.
Scenario load_scenario(const std::string& ref);

// ---- interaction records ---------------------------------------------------

void write_records_jsonl(std::ostream& out,
                         std::span<const InteractionRecord> records);
void write_records_csv(std::ostream& out,
                       std::span<const InteractionRecord> records);

// ---- profile curves --------------------------------------------------------

void write_curve_csv(std::ostream& out, const ProfileCurve& curve);
void write_empirical_curve_csv(std::ostream& out, const EmpiricalProfile& p);
nlohmann::json curve_to_json(const ProfileCurve& curve);
ProfileCurve curve_from_json(const nlohmann::json& j);

/// Reads the 5-column curve CSV back. Channel ids are not part of the CSV
/// schema and come back empty; plateau statistics are recomputed from the
/// decipherability column.
ProfileCurve read_curve_csv(std::istream& in);

// ---- capacity reports ------------------------------------------------------

/// Full payload of capacity.json: the lambda search result, the
/// Blahut-Arimoto bound, and the interpretation alphabet size.
struct CapacityReport {
  CapacityResult result;
  BlahutArimotoResult bound;
  std::size_t interp_alphabet = 0;
};

nlohmann::json capacity_report_to_json(const CapacityReport& report);
CapacityReport capacity_report_from_json(const nlohmann::json& j);

// ---- certification ---------------------------------------------------------

CertificationPolicy policy_from_json(const nlohmann::json& j);
nlohmann::json policy_to_json(const CertificationPolicy& policy);
nlohmann::json report_to_json(const CertificationReport& report);

// ---- adaptive runs ---------------------------------------------------------

struct AdaptRun {
  AdaptConfig config;
  std::uint64_t seed = 1;
};

AdaptRun adapt_run_from_json(const nlohmann::json& j);
void write_trace_csv(std::ostream& out, std::span<const AdaptStep> trace);

// ---- misc ------------------------------------------------------------------

/// "lo:hi:points:log" or "lo:hi:points:lin" into a grid.
std::vector<double> parse_grid_spec(std::string_view spec);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
nlohmann::json load_json_file(const std::filesystem::path& path);

} // namespace semioscope
