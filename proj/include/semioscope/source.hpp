#pragma once

#include <string>
#include <vector>

#include "semioscope/info.hpp"

namespace semioscope {

/// Generative complexity knob: the temperature of a Gibbs message family.
/// Strictly positive, capped at a configured maximum (default 1e3).
struct Lambda {
  explicit Lambda(double v, double max_value = kDefaultMax);

  double value;

  static constexpr double kDefaultMax = 1e3;
};

/// Fixed base scores over a message alphabet. Together with a temperature
/// they define the message distribution exp(s/lambda) / Z.
struct SourceFamily {
  SourceFamily(std::vector<std::string> message_ids,
               std::vector<double> base_scores);

  std::vector<std::string> message_ids;
  std::vector<double> base_scores;

  std::size_t size() const { return message_ids.size(); }
};

/// Softmax of base_scores / lambda, computed with max-score subtraction.
ProbVector message_distribution(const SourceFamily& f, Lambda lambda);

/// Semiotic breadth S(lambda): entropy of the message distribution.
Bits breadth(const SourceFamily& f, Lambda lambda);

} // namespace semioscope
