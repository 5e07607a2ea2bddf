#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "semioscope/info.hpp"
#include "semioscope/source.hpp"

namespace semioscope {

/// Row-stochastic interpretation map: row m is P(Int | M = m).
/// Every row is validated (and renormalized) like a ProbVector.
class ChannelMatrix {
public:
  ChannelMatrix(std::vector<double> cells, std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t m, std::size_t i) const { return cells_[m * cols_ + i]; }
  std::span<const double> row(std::size_t m) const {
    return {cells_.data() + m * cols_, cols_};
  }

private:
  std::vector<double> cells_;
  std::size_t rows_;
  std::size_t cols_;
};

/// An (audience, context) pair together with its interpretation map.
struct SemioticChannel {
  SemioticChannel(std::string audience_id, std::string context_id,
                  ChannelMatrix matrix,
                  std::vector<std::string> interpretation_ids);

  std::string audience_id;
  std::string context_id;
  ChannelMatrix matrix;
  std::vector<std::string> interpretation_ids;
};

/// One observed (message, interpretation) event under a channel at a given
/// temperature.
struct InteractionRecord {
  std::string audience_id;
  std::string context_id;
  double lambda = 0.0;
  std::string message_id;
  std::string interpretation_id;

  bool operator==(const InteractionRecord&) const = default;
};

/// Source family plus the channel it speaks through.
struct Scenario {
  Scenario(SourceFamily source, SemioticChannel channel);

  SourceFamily source;
  SemioticChannel channel;
};

/// p(m, i) = source(m) * matrix(m, i).
JointDist joint_distribution(const ProbVector& source,
                             const SemioticChannel& ch);

/// D(lambda) = I(M; Int) under the message distribution at this temperature.
Bits decipherability(const SourceFamily& f, Lambda lambda,
                     const SemioticChannel& ch);

/// H(Int | M) under the message distribution at this temperature.
Bits residual_ambiguity(const SourceFamily& f, Lambda lambda,
                        const SemioticChannel& ch);

/// n i.i.d. draws, message first then interpretation per record, from
/// mt19937_64 seeded with `seed`. Byte-reproducible for a given seed.
std::vector<InteractionRecord> sample_interactions(const SourceFamily& f,
                                                   Lambda lambda,
                                                   const SemioticChannel& ch,
                                                   std::size_t n,
                                                   std::uint64_t seed);

struct ScenarioSpec {
  enum class Kind { identity, constant, bsc, random, tiered_confusability };

  Kind kind = Kind::identity;
  std::size_t size = 4;        // identity / constant / random
  double crossover = 0.0;      // bsc
  std::size_t n_clear = 4;     // tiered
  std::size_t n_noisy = 12;    // tiered
  std::uint64_t seed = 0;      // random / tiered jitter
};

/// Deterministic synthetic scenario for the given spec.
Scenario reference_scenario(const ScenarioSpec& spec);

/// Lookup by fixed name (identity4, constant4, bsc011, bsc025,
/// tiered_default) or parameterized form (identity(n), constant(n), bsc(p),
/// random(k[,seed]), tiered(n_clear,n_noisy[,seed])).
Scenario builtin_scenario(std::string_view name);

} // namespace semioscope
