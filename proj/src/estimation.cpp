#include "semioscope/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <map>
#include <numbers>
#include <set>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "semioscope/errors.hpp"
#include "semioscope/rng.hpp"

namespace semioscope {

namespace {

double plog2p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

struct RawRecord {
  std::string audience_id;
  std::string context_id;
  double lambda;
  std::string message_id;
  std::string interpretation_id;
};

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
  throw ValidationError("records line " + std::to_string(line_no) + ": " + what);
}

RawRecord parse_json_line(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    line_error(line_no, std::string("not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) line_error(line_no, "record is not a JSON object");
  const auto get_string = [&](const char* field) -> std::string {
    if (!j.contains(field)) {
      line_error(line_no, std::string("missing field '") + field + "'");
    }
    if (!j[field].is_string()) {
      line_error(line_no, std::string("field '") + field + "' is not a string");
    }
    return j[field].get<std::string>();
  };
  if (!j.contains("lambda")) line_error(line_no, "missing field 'lambda'");
  if (!j["lambda"].is_number()) line_error(line_no, "field 'lambda' is not a number");
  RawRecord r{get_string("audience_id"), get_string("context_id"),
              j["lambda"].get<double>(), get_string("message_id"),
              get_string("interpretation_id")};
  if (!(r.lambda > 0.0)) line_error(line_no, "field 'lambda' must be positive");
  return r;
}

// Splits one CSV line; handles optional double-quoting of fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

double parse_lambda_field(const std::string& text, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    line_error(line_no, "field 'lambda' is not a number: '" + text + "'");
  }
  if (!(v > 0.0)) line_error(line_no, "field 'lambda' must be positive");
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<RawRecord> read_jsonl(std::istream& stream) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    records.push_back(parse_json_line(line, line_no));
  }
  return records;
}

std::vector<RawRecord> read_csv(std::istream& stream) {
  static const char* kFields[] = {"audience_id", "context_id", "lambda",
                                  "message_id", "interpretation_id"};
  std::vector<RawRecord> records;
  std::string line;
  if (!std::getline(stream, line)) return records; // empty stream, empty list
  line = strip_cr(line);
  const std::vector<std::string> header = split_csv(line);
  std::size_t index[5];
  for (std::size_t f = 0; f < 5; ++f) {
    const auto it = std::find(header.begin(), header.end(), kFields[f]);
    if (it == header.end()) {
      throw ValidationError(std::string("csv header missing field '") +
                            kFields[f] + "'");
    }
    index[f] = static_cast<std::size_t>(it - header.begin());
  }
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != header.size()) {
      line_error(line_no, "expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(fields.size()));
    }
    records.push_back({fields[index[0]], fields[index[1]],
                       parse_lambda_field(fields[index[2]], line_no),
                       fields[index[3]], fields[index[4]]});
  }
  return records;
}

CountTable build_table(const std::string& audience, const std::string& context,
                       double lambda,
                       const std::vector<std::pair<std::string, std::string>>& events) {
  std::set<std::string> msg_set, int_set;
  for (const auto& [m, i] : events) {
    msg_set.insert(m);
    int_set.insert(i);
  }
  CountTable t;
  t.audience_id = audience;
  t.context_id = context;
  t.lambda = lambda;
  t.message_ids.assign(msg_set.begin(), msg_set.end());
  t.interpretation_ids.assign(int_set.begin(), int_set.end());
  std::unordered_map<std::string, std::size_t> msg_index, int_index;
  for (std::size_t k = 0; k < t.message_ids.size(); ++k) msg_index[t.message_ids[k]] = k;
  for (std::size_t k = 0; k < t.interpretation_ids.size(); ++k) int_index[t.interpretation_ids[k]] = k;
  t.counts.assign(t.message_ids.size() * t.interpretation_ids.size(), 0);
  for (const auto& [m, i] : events) {
    ++t.counts[msg_index[m] * t.interpretation_ids.size() + int_index[i]];
  }
  return t;
}

std::vector<CountTable> group_records(const std::vector<RawRecord>& records) {
  std::map<std::tuple<std::string, std::string, double>,
           std::vector<std::pair<std::string, std::string>>>
      groups;
  for (const auto& r : records) {
    groups[{r.audience_id, r.context_id, r.lambda}].emplace_back(
        r.message_id, r.interpretation_id);
  }
  std::vector<CountTable> tables;
  tables.reserve(groups.size());
  for (const auto& [key, events] : groups) {
    tables.push_back(build_table(std::get<0>(key), std::get<1>(key),
                                 std::get<2>(key), events));
  }
  return tables;
}

} // namespace

std::uint64_t CountTable::total() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::vector<CountTable> ingest(std::istream& stream, RecordFormat format) {
  const std::vector<RawRecord> records =
      format == RecordFormat::jsonl ? read_jsonl(stream) : read_csv(stream);
  return group_records(records);
}

CountTable count_records(std::span<const InteractionRecord> records) {
  if (records.empty()) {
    throw ValidationError("count_records needs at least one record");
  }
  std::vector<std::pair<std::string, std::string>> events;
  events.reserve(records.size());
  for (const auto& r : records) {
    if (r.audience_id != records[0].audience_id ||
        r.context_id != records[0].context_id || r.lambda != records[0].lambda) {
      throw ValidationError("count_records requires records from one "
                            "(audience, context, lambda) group");
    }
    events.emplace_back(r.message_id, r.interpretation_id);
  }
  return build_table(records[0].audience_id, records[0].context_id,
                     records[0].lambda, events);
}

namespace {

void check_table(const CountTable& t) {
  if (t.message_ids.empty() || t.interpretation_ids.empty() ||
      t.counts.size() != t.message_ids.size() * t.interpretation_ids.size()) {
    throw ShapeError("count table shape mismatch");
  }
  if (t.total() == 0) throw ValidationError("count table is empty");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("smoothing alpha must be >= 0");
}

double smoothed_total(const CountTable& t, double alpha) {
  return static_cast<double>(t.total()) +
         alpha * static_cast<double>(t.counts.size());
}

double plugin_marginal_entropy(const CountTable& t, Axis axis, double alpha) {
  const std::size_t rows = t.message_ids.size();
  const std::size_t cols = t.interpretation_ids.size();
  const std::size_t n_bins = axis == Axis::message ? rows : cols;
  const double other = axis == Axis::message ? static_cast<double>(cols)
                                             : static_cast<double>(rows);
  const double total = smoothed_total(t, alpha);
  double h = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    std::uint64_t c = 0;
    for (std::size_t k = 0; k < (axis == Axis::message ? cols : rows); ++k) {
      c += axis == Axis::message ? t.count(b, k) : t.count(k, b);
    }
    h += plog2p((static_cast<double>(c) + alpha * other) / total);
  }
  return h;
}

double plugin_joint_entropy(const CountTable& t, double alpha) {
  const double total = smoothed_total(t, alpha);
  double h = 0.0;
  for (auto c : t.counts) h += plog2p((static_cast<double>(c) + alpha) / total);
  return h;
}

std::size_t observed_support(const CountTable& t, Axis axis) {
  const std::size_t rows = t.message_ids.size();
  const std::size_t cols = t.interpretation_ids.size();
  const std::size_t n_bins = axis == Axis::message ? rows : cols;
  std::size_t k_hat = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    std::uint64_t c = 0;
    for (std::size_t k = 0; k < (axis == Axis::message ? cols : rows); ++k) {
      c += axis == Axis::message ? t.count(b, k) : t.count(k, b);
    }
    if (c > 0) ++k_hat;
  }
  return k_hat;
}

double miller_madow_bump(std::size_t support, std::uint64_t n) {
  if (support < 1) return 0.0;
  return static_cast<double>(support - 1) /
         (2.0 * static_cast<double>(n) * std::numbers::ln2_v<double>);
}

double joint_support(const CountTable& t) {
  std::size_t k_hat = 0;
  for (auto c : t.counts) {
    if (c > 0) ++k_hat;
  }
  return static_cast<double>(k_hat);
}

double entropy_estimate(const CountTable& t, Axis axis, EstimatorMethod method,
                        double alpha) {
  double h = plugin_marginal_entropy(t, axis, alpha);
  if (method == EstimatorMethod::miller_madow) {
    h += miller_madow_bump(observed_support(t, axis), t.total());
  }
  return h;
}

double mi_estimate(const CountTable& t, EstimatorMethod method, double alpha) {
  double mi = plugin_marginal_entropy(t, Axis::message, alpha) +
              plugin_marginal_entropy(t, Axis::interpretation, alpha) -
              plugin_joint_entropy(t, alpha);
  if (method == EstimatorMethod::miller_madow) {
    mi += miller_madow_bump(observed_support(t, Axis::message), t.total()) +
          miller_madow_bump(observed_support(t, Axis::interpretation), t.total()) -
          miller_madow_bump(static_cast<std::size_t>(joint_support(t)), t.total());
  }
  return mi < 0.0 ? 0.0 : mi;
}

} // namespace

Bits estimate_entropy(const CountTable& t, Axis axis, EstimatorMethod method,
                      double alpha) {
  check_table(t);
  check_alpha(alpha);
  return Bits{entropy_estimate(t, axis, method, alpha)};
}

Bits estimate_mutual_information(const CountTable& t, EstimatorMethod method,
                                 double alpha) {
  check_table(t);
  check_alpha(alpha);
  return Bits{mi_estimate(t, method, alpha)};
}

Bits estimate_conditional_entropy(const CountTable& t, EstimatorMethod method,
                                  double alpha) {
  check_table(t);
  check_alpha(alpha);
  const double h = entropy_estimate(t, Axis::interpretation, method, alpha) -
                   mi_estimate(t, method, alpha);
  return Bits{h < 0.0 ? 0.0 : h};
}

namespace {

double statistic_value(const CountTable& t, Statistic statistic,
                       EstimatorMethod method) {
  switch (statistic) {
    case Statistic::entropy_m:
      return entropy_estimate(t, Axis::message, method, 0.0);
    case Statistic::entropy_int:
      return entropy_estimate(t, Axis::interpretation, method, 0.0);
    case Statistic::mi:
      return mi_estimate(t, method, 0.0);
    case Statistic::cond_entropy: {
      const double h = entropy_estimate(t, Axis::interpretation, method, 0.0) -
                       mi_estimate(t, method, 0.0);
      return h < 0.0 ? 0.0 : h;
    }
  }
  throw DomainError("unknown statistic");
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

EstimateWithCI bootstrap_ci(const CountTable& t, Statistic statistic,
                            std::size_t n_bootstrap, std::uint64_t seed,
                            double level, EstimatorMethod method) {
  check_table(t);
  if (n_bootstrap < 100) throw DomainError("bootstrap needs B >= 100");
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("bootstrap level must lie in (0, 1)");
  }

  const double point = statistic_value(t, statistic, method);
  const std::uint64_t n = t.total();

  // Nonzero cells and their empirical probabilities drive the resampling.
  std::vector<std::size_t> cell_index;
  std::vector<double> cell_prob;
  for (std::size_t k = 0; k < t.counts.size(); ++k) {
    if (t.counts[k] > 0) {
      cell_index.push_back(k);
      cell_prob.push_back(static_cast<double>(t.counts[k]) /
                          static_cast<double>(n));
    }
  }
  const std::vector<double> cdf = cumulative(cell_prob);

  std::mt19937_64 rng(seed);
  CountTable work = t;
  std::vector<double> replicates(n_bootstrap);
  for (std::size_t b = 0; b < n_bootstrap; ++b) {
    std::fill(work.counts.begin(), work.counts.end(), 0);
    for (std::uint64_t k = 0; k < n; ++k) {
      ++work.counts[cell_index[draw_categorical(cdf, rng)]];
    }
    replicates[b] = statistic_value(work, statistic, method);
  }
  std::sort(replicates.begin(), replicates.end());

  EstimateWithCI out;
  out.point = Bits{point};
  out.ci_low = Bits{std::min(percentile(replicates, (1.0 - level) / 2.0), point)};
  out.ci_high = Bits{std::max(percentile(replicates, (1.0 + level) / 2.0), point)};
  out.method = method;
  out.n_bootstrap = static_cast<int>(n_bootstrap);
  out.level = level;
  return out;
}

EmpiricalProfile empirical_profile(std::span<const CountTable> tables,
                                   EstimatorMethod method,
                                   const std::optional<BootstrapConfig>& bootstrap,
                                   double risk_cap) {
  if (tables.empty()) throw DomainError("empirical profile needs >= 1 table");
  std::vector<std::size_t> order(tables.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tables[a].lambda < tables[b].lambda;
  });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const CountTable& t = tables[order[k]];
    if (t.audience_id != tables[0].audience_id ||
        t.context_id != tables[0].context_id) {
      throw DomainError("empirical profile tables must share one channel, got (" +
                        t.audience_id + ", " + t.context_id + ") and (" +
                        tables[0].audience_id + ", " + tables[0].context_id + ")");
    }
    if (k > 0 && !(t.lambda > tables[order[k - 1]].lambda)) {
      throw DomainError("duplicate lambda " + std::to_string(t.lambda) +
                        " in empirical profile group");
    }
  }

  EmpiricalProfile out;
  out.curve.audience_id = tables[0].audience_id;
  out.curve.context_id = tables[0].context_id;
  out.has_ci = bootstrap.has_value();
  std::vector<double> d_values;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const CountTable& t = tables[order[k]];
    const Bits s = estimate_entropy(t, Axis::message, method);
    const Bits d = estimate_mutual_information(t, method);
    const Bits resid = estimate_conditional_entropy(t, method);
    out.curve.points.push_back(
        {t.lambda, s, d, resid, risk_score(s, d, risk_cap)});
    d_values.push_back(d.value);
    if (bootstrap) {
      // Per-table seeds keep bands independent yet reproducible.
      const std::uint64_t table_seed = bootstrap->seed + k;
      const EstimateWithCI s_ci = bootstrap_ci(
          t, Statistic::entropy_m, bootstrap->n_bootstrap, table_seed,
          bootstrap->level, method);
      const EstimateWithCI d_ci = bootstrap_ci(
          t, Statistic::mi, bootstrap->n_bootstrap, table_seed,
          bootstrap->level, method);
      out.breadth_ci.push_back({s_ci.ci_low.value, s_ci.ci_high.value});
      out.decipherability_ci.push_back({d_ci.ci_low.value, d_ci.ci_high.value});
    }
  }
  out.curve.local_maxima_count = count_local_maxima(d_values);
  out.curve.unimodality_flag = out.curve.local_maxima_count == 1;
  return out;
}

} // namespace semioscope
