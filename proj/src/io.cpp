#include "semioscope/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "semioscope/errors.hpp"

namespace semioscope {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

const nlohmann::json& require_key(const nlohmann::json& j, const char* key,
                                  const char* what) {
  if (!j.contains(key)) {
    throw ValidationError(std::string(what) + " is missing field '" + key + "'");
  }
  return j.at(key);
}

std::vector<double> number_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw ValidationError(std::string(what) + " must contain only numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> string_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_string()) {
      throw ValidationError(std::string(what) + " must contain only strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

} // namespace

nlohmann::json scenario_to_json(const Scenario& scenario) {
  nlohmann::json rows = nlohmann::json::array();
  const ChannelMatrix& m = scenario.channel.matrix;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return {
      {"source",
       {{"messages", scenario.source.message_ids},
        {"scores", scenario.source.base_scores}}},
      {"channel",
       {{"audience", scenario.channel.audience_id},
        {"context", scenario.channel.context_id},
        {"interpretations", scenario.channel.interpretation_ids},
        {"rows", std::move(rows)}}},
  };
}

Scenario scenario_from_json(const nlohmann::json& j) {
  const auto& source = require_key(j, "source", "scenario");
  const auto& channel = require_key(j, "channel", "scenario");
  SourceFamily family(
      string_array(require_key(source, "messages", "scenario source"),
                   "scenario source messages"),
      number_array(require_key(source, "scores", "scenario source"),
                   "scenario source scores"));

  const auto& rows_json = require_key(channel, "rows", "scenario channel");
  if (!rows_json.is_array() || rows_json.empty()) {
    throw ValidationError("scenario channel rows must be a nonempty array");
  }
  std::vector<double> cells;
  const std::size_t cols = rows_json.front().is_array() ? rows_json.front().size() : 0;
  for (const auto& row : rows_json) {
    const std::vector<double> values = number_array(row, "scenario channel row");
    if (values.size() != cols) {
      throw ShapeError("scenario channel rows have inconsistent lengths");
    }
    cells.insert(cells.end(), values.begin(), values.end());
  }
  SemioticChannel ch(
      require_key(channel, "audience", "scenario channel").get<std::string>(),
      require_key(channel, "context", "scenario channel").get<std::string>(),
      ChannelMatrix(std::move(cells), rows_json.size(), cols),
      string_array(require_key(channel, "interpretations", "scenario channel"),
                   "scenario channel interpretations"));
  return Scenario(std::move(family), std::move(ch));
}

Scenario load_scenario(const std::string& ref) {
  constexpr std::string_view kBuiltinPrefix = "builtin:";
  if (ref.starts_with(kBuiltinPrefix)) {
    return builtin_scenario(ref.substr(kBuiltinPrefix.size()));
  }
  return scenario_from_json(load_json_file(ref));
}

void write_records_jsonl(std::ostream& out,
                         std::span<const InteractionRecord> records) {
  for (const auto& r : records) {
    const nlohmann::json j = {{"audience_id", r.audience_id},
                              {"context_id", r.context_id},
                              {"lambda", r.lambda},
                              {"message_id", r.message_id},
                              {"interpretation_id", r.interpretation_id}};
    out << j.dump() << '\n';
  }
}

void write_records_csv(std::ostream& out,
                       std::span<const InteractionRecord> records) {
  out << "audience_id,context_id,lambda,message_id,interpretation_id\n";
  for (const auto& r : records) {
    out << csv_field(r.audience_id) << ',' << csv_field(r.context_id) << ','
        << g17(r.lambda) << ',' << csv_field(r.message_id) << ','
        << csv_field(r.interpretation_id) << '\n';
  }
}

namespace {

constexpr const char* kCurveHeader =
    "lambda,breadth_bits,decipherability_bits,residual_ambiguity_bits,risk";

void write_curve_row(std::ostream& out, const ProfilePoint& pt) {
  out << g17(pt.lambda) << ',' << g17(pt.breadth_bits.value) << ','
      << g17(pt.decipherability_bits.value) << ','
      << g17(pt.residual_ambiguity_bits.value) << ',' << g17(pt.risk);
}

} // namespace

void write_curve_csv(std::ostream& out, const ProfileCurve& curve) {
  out << kCurveHeader << '\n';
  for (const auto& pt : curve.points) {
    write_curve_row(out, pt);
    out << '\n';
  }
}

void write_empirical_curve_csv(std::ostream& out, const EmpiricalProfile& p) {
  out << kCurveHeader;
  if (p.has_ci) {
    out << ",breadth_ci_low,breadth_ci_high,decipherability_ci_low,"
           "decipherability_ci_high";
  }
  out << '\n';
  for (std::size_t k = 0; k < p.curve.points.size(); ++k) {
    write_curve_row(out, p.curve.points[k]);
    if (p.has_ci) {
      out << ',' << g17(p.breadth_ci[k].low) << ',' << g17(p.breadth_ci[k].high)
          << ',' << g17(p.decipherability_ci[k].low) << ','
          << g17(p.decipherability_ci[k].high);
    }
    out << '\n';
  }
}

nlohmann::json curve_to_json(const ProfileCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : curve.points) {
    points.push_back({{"lambda", pt.lambda},
                      {"breadth_bits", pt.breadth_bits.value},
                      {"decipherability_bits", pt.decipherability_bits.value},
                      {"residual_ambiguity_bits", pt.residual_ambiguity_bits.value},
                      {"risk", pt.risk}});
  }
  return {{"audience_id", curve.audience_id},
          {"context_id", curve.context_id},
          {"unimodality_flag", curve.unimodality_flag},
          {"local_maxima_count", curve.local_maxima_count},
          {"points", std::move(points)}};
}

namespace {

ProfileCurve finish_curve(ProfileCurve curve) {
  std::vector<double> d_values;
  d_values.reserve(curve.points.size());
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    const auto& pt = curve.points[k];
    if (k > 0 && !(pt.lambda > curve.points[k - 1].lambda)) {
      throw ValidationError("curve lambdas must be strictly increasing");
    }
    d_values.push_back(pt.decipherability_bits.value);
  }
  curve.local_maxima_count = count_local_maxima(d_values);
  curve.unimodality_flag = curve.local_maxima_count == 1;
  return curve;
}

} // namespace

ProfileCurve curve_from_json(const nlohmann::json& j) {
  ProfileCurve curve;
  curve.audience_id = require_key(j, "audience_id", "curve").get<std::string>();
  curve.context_id = require_key(j, "context_id", "curve").get<std::string>();
  for (const auto& pj : require_key(j, "points", "curve")) {
    curve.points.push_back(
        {require_key(pj, "lambda", "curve point").get<double>(),
         Bits{require_key(pj, "breadth_bits", "curve point").get<double>()},
         Bits{require_key(pj, "decipherability_bits", "curve point").get<double>()},
         Bits{require_key(pj, "residual_ambiguity_bits", "curve point").get<double>()},
         require_key(pj, "risk", "curve point").get<double>()});
  }
  return finish_curve(std::move(curve));
}

ProfileCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("curve csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream header(line);
  std::vector<std::string> names;
  std::string name;
  while (std::getline(header, name, ',')) names.push_back(name);
  const auto column = [&](const char* wanted) -> std::size_t {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == wanted) return k;
    }
    throw ValidationError(std::string("curve csv is missing column '") +
                          wanted + "'");
  };
  const std::size_t c_lambda = column("lambda");
  const std::size_t c_s = column("breadth_bits");
  const std::size_t c_d = column("decipherability_bits");
  const std::size_t c_r = column("residual_ambiguity_bits");
  const std::size_t c_risk = column("risk");

  ProfileCurve curve;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> fields;
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != names.size()) {
      throw ValidationError("curve csv line " + std::to_string(line_no) +
                            ": expected " + std::to_string(names.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    const auto value = [&](std::size_t c) {
      char* end = nullptr;
      const double v = std::strtod(fields[c].c_str(), &end);
      if (end == fields[c].c_str() || *end != '\0') {
        throw ValidationError("curve csv line " + std::to_string(line_no) +
                              ": '" + fields[c] + "' is not a number");
      }
      return v;
    };
    curve.points.push_back({value(c_lambda), Bits{value(c_s)}, Bits{value(c_d)},
                            Bits{value(c_r)}, value(c_risk)});
  }
  return finish_curve(std::move(curve));
}

nlohmann::json capacity_report_to_json(const CapacityReport& report) {
  return {{"audience_id", report.result.audience_id},
          {"context_id", report.result.context_id},
          {"lambda_opt", report.result.lambda_opt},
          {"capacity_bits", report.result.capacity_bits.value},
          {"breadth_at_opt_bits", report.result.breadth_at_opt_bits.value},
          {"search_iterations", report.result.search_iterations},
          {"unimodal", report.result.unimodal},
          {"interp_alphabet", report.interp_alphabet},
          {"blahut_arimoto",
           {{"capacity_bits", report.bound.capacity_bits.value},
            {"iterations", report.bound.iterations},
            {"converged", report.bound.converged},
            {"input_dist", report.bound.input_dist.probs()}}}};
}

CapacityReport capacity_report_from_json(const nlohmann::json& j) {
  const auto& ba = require_key(j, "blahut_arimoto", "capacity report");
  CapacityReport report{
      {require_key(j, "audience_id", "capacity report").get<std::string>(),
       require_key(j, "context_id", "capacity report").get<std::string>(),
       require_key(j, "lambda_opt", "capacity report").get<double>(),
       Bits{require_key(j, "capacity_bits", "capacity report").get<double>()},
       Bits{require_key(j, "breadth_at_opt_bits", "capacity report").get<double>()},
       require_key(j, "search_iterations", "capacity report").get<int>(),
       require_key(j, "unimodal", "capacity report").get<bool>()},
      {Bits{require_key(ba, "capacity_bits", "blahut_arimoto").get<double>()},
       ProbVector(number_array(require_key(ba, "input_dist", "blahut_arimoto"),
                               "blahut_arimoto input_dist")),
       require_key(ba, "iterations", "blahut_arimoto").get<int>(),
       require_key(ba, "converged", "blahut_arimoto").get<bool>()},
      require_key(j, "interp_alphabet", "capacity report").get<std::size_t>()};
  return report;
}

CertificationPolicy policy_from_json(const nlohmann::json& j) {
  CertificationPolicy policy;
  if (j.contains("metric")) {
    const std::string metric = j.at("metric").get<std::string>();
    if (metric == "normalized") {
      policy.metric = PolicyMetric::normalized;
    } else if (metric == "raw_bits") {
      policy.metric = PolicyMetric::raw_bits;
    } else {
      throw ValidationError("policy metric must be 'normalized' or 'raw_bits', got '" +
                            metric + "'");
    }
  }
  policy.d_min = require_key(j, "d_min", "policy").get<double>();
  if (j.contains("s_min") && !j.at("s_min").is_null()) {
    policy.s_min = j.at("s_min").get<double>();
  }
  if (j.contains("s_max") && !j.at("s_max").is_null()) {
    policy.s_max = j.at("s_max").get<double>();
  }
  if (j.contains("require_unimodal")) {
    policy.require_unimodal = j.at("require_unimodal").get<bool>();
  }
  return policy;
}

nlohmann::json policy_to_json(const CertificationPolicy& policy) {
  nlohmann::json j = {
      {"metric", policy.metric == PolicyMetric::normalized ? "normalized" : "raw_bits"},
      {"d_min", policy.d_min},
      {"s_min", nullptr},
      {"s_max", nullptr},
      {"require_unimodal", policy.require_unimodal}};
  if (policy.s_min) j["s_min"] = *policy.s_min;
  if (policy.s_max) j["s_max"] = *policy.s_max;
  return j;
}

nlohmann::json report_to_json(const CertificationReport& report) {
  return {{"pass", report.pass},
          {"archetype", archetype_name(report.archetype)},
          {"reasons", report.reasons},
          {"capacity",
           {{"audience_id", report.capacity.audience_id},
            {"context_id", report.capacity.context_id},
            {"lambda_opt", report.capacity.lambda_opt},
            {"capacity_bits", report.capacity.capacity_bits.value},
            {"breadth_at_opt_bits", report.capacity.breadth_at_opt_bits.value},
            {"search_iterations", report.capacity.search_iterations},
            {"unimodal", report.capacity.unimodal}}}};
}

AdaptRun adapt_run_from_json(const nlohmann::json& j) {
  AdaptRun run;
  const auto read = [&](const char* key, auto& into) {
    using T = std::remove_reference_t<decltype(into)>;
    if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
  };
  read("lambda_init", run.config.lambda_init);
  read("step_init", run.config.step_init);
  read("batch_size", run.config.batch_size);
  read("shrink_factor", run.config.shrink_factor);
  read("max_rounds", run.config.max_rounds);
  read("safe_mode", run.config.safe_mode);
  read("lambda_min", run.config.lambda_min);
  read("lambda_max", run.config.lambda_max);
  read("seed", run.seed);
  if (run.config.safe_mode) {
    if (!j.contains("breadth_cap") || j.at("breadth_cap").is_null()) {
      throw ValidationError("safe_mode needs a breadth_cap value");
    }
    run.config.breadth_cap = j.at("breadth_cap").get<double>();
  } else if (j.contains("breadth_cap") && !j.at("breadth_cap").is_null()) {
    run.config.breadth_cap = j.at("breadth_cap").get<double>();
  }
  return run;
}

void write_trace_csv(std::ostream& out, std::span<const AdaptStep> trace) {
  out << "round,lambda,decipherability_hat_bits,breadth_hat_bits,step\n";
  for (const auto& s : trace) {
    out << s.round << ',' << g17(s.lambda) << ','
        << g17(s.decipherability_hat.value) << ',' << g17(s.breadth_hat.value)
        << ',' << g17(s.step) << '\n';
  }
}

std::vector<double> parse_grid_spec(std::string_view spec) {
  std::vector<std::string> parts;
  std::string text(spec);
  std::size_t pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string::npos
                                         ? std::string::npos
                                         : colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() != 4) {
    throw DomainError("grid spec must look like lo:hi:points:log (got '" +
                      text + "')");
  }
  const auto number = [&](const std::string& tok, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
      throw DomainError(std::string("grid spec ") + what + " is not a number: '" +
                        tok + "'");
    }
    return v;
  };
  const double lo = number(parts[0], "lower bound");
  const double hi = number(parts[1], "upper bound");
  const double points = number(parts[2], "point count");
  if (points < 1 || points != std::floor(points)) {
    throw DomainError("grid spec point count must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(points);
  if (parts[3] == "log") return log_spaced(lo, hi, n);
  if (parts[3] == "lin") return linear_spaced(lo, hi, n);
  throw DomainError("grid spec scale must be 'log' or 'lin', got '" + parts[3] + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

} // namespace semioscope
