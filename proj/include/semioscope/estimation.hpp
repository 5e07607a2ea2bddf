#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semioscope/capacity.hpp"
#include "semioscope/channel.hpp"
#include "semioscope/info.hpp"

namespace semioscope {

enum class RecordFormat { jsonl, csv };
enum class EstimatorMethod { plugin, miller_madow };
enum class Axis { message, interpretation };
enum class Statistic { entropy_m, entropy_int, mi, cond_entropy };

/// Empirical joint counts for one (audience, context, lambda) group.
/// Alphabets are the ids observed in that group, sorted lexicographically.
struct CountTable {
  std::string audience_id;
  std::string context_id;
  double lambda = 0.0;
  std::vector<std::string> message_ids;
  std::vector<std::string> interpretation_ids;
  std::vector<std::uint64_t> counts; // row-major message x interpretation

  std::uint64_t count(std::size_t m, std::size_t i) const {
    return counts[m * interpretation_ids.size() + i];
  }
  std::uint64_t total() const;
};

/// Parses a record stream and groups it into count tables, one per distinct
/// (audience_id, context_id, lambda), ordered by that key. Malformed lines
/// raise ValidationError carrying the 1-based line number; empty input is an
/// empty list.
std::vector<CountTable> ingest(std::istream& stream, RecordFormat format);

/// Count table over a batch of records that all share one group key.
CountTable count_records(std::span<const InteractionRecord> records);

/// Marginal entropy estimate along one axis. miller_madow adds
/// (K_observed - 1) / (2 N ln 2) bits to the plugin value. `alpha` is an
/// optional additive smoothing pseudo-count per cell (default none).
Bits estimate_entropy(const CountTable& t, Axis axis, EstimatorMethod method,
                      double alpha = 0.0);

/// Mutual information estimate; the miller_madow variant corrects all three
/// entropy terms consistently and floors the result at zero.
Bits estimate_mutual_information(const CountTable& t, EstimatorMethod method,
                                 double alpha = 0.0);

/// H(Int | M) estimate as H(Int) - I with matching method, floored at zero.
Bits estimate_conditional_entropy(const CountTable& t, EstimatorMethod method,
                                  double alpha = 0.0);

struct EstimateWithCI {
  Bits point;
  Bits ci_low;
  Bits ci_high;
  EstimatorMethod method = EstimatorMethod::plugin;
  int n_bootstrap = 0;
  double level = 0.0;
};

/// Percentile bootstrap: resamples N records from the empirical joint B
/// times (B >= 100), deterministic for a given seed. The interval is widened
/// if needed so it always contains the point estimate.
EstimateWithCI bootstrap_ci(const CountTable& t, Statistic statistic,
                            std::size_t n_bootstrap, std::uint64_t seed,
                            double level,
                            EstimatorMethod method = EstimatorMethod::plugin);

struct BootstrapConfig {
  std::size_t n_bootstrap = 500;
  std::uint64_t seed = 0;
  double level = 0.95;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Profile curve assembled from per-lambda estimates, with optional
/// bootstrap bands parallel to the points.
struct EmpiricalProfile {
  ProfileCurve curve;
  bool has_ci = false;
  std::vector<Interval> breadth_ci;
  std::vector<Interval> decipherability_ci;
};

/// One profile point per table. All tables must share (audience, context)
/// and carry distinct lambdas.
EmpiricalProfile empirical_profile(std::span<const CountTable> tables,
                                   EstimatorMethod method,
                                   const std::optional<BootstrapConfig>& bootstrap,
                                   double risk_cap = kDefaultRiskCap);

} // namespace semioscope
