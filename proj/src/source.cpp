#include "semioscope/source.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "semioscope/errors.hpp"

namespace semioscope {

Lambda::Lambda(double v, double max_value) : value(v) {
  if (!(v > 0.0)) {
    throw DomainError("lambda must be strictly positive, got " +
                      std::to_string(v));
  }
  if (v > max_value) {
    throw DomainError("lambda " + std::to_string(v) + " exceeds the maximum " +
                      std::to_string(max_value));
  }
}

SourceFamily::SourceFamily(std::vector<std::string> ids,
                           std::vector<double> scores)
    : message_ids(std::move(ids)), base_scores(std::move(scores)) {
  if (message_ids.empty()) {
    throw ValidationError("source family needs at least one message");
  }
  if (message_ids.size() != base_scores.size()) {
    throw ShapeError("source family has " + std::to_string(message_ids.size()) +
                     " ids but " + std::to_string(base_scores.size()) +
                     " scores");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : message_ids) {
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate message id '" + id + "'");
    }
  }
  for (std::size_t i = 0; i < base_scores.size(); ++i) {
    if (!std::isfinite(base_scores[i])) {
      throw ValidationError("base score " + std::to_string(i) +
                            " is not finite");
    }
  }
}

ProbVector message_distribution(const SourceFamily& f, Lambda lambda) {
  const double top =
      *std::max_element(f.base_scores.begin(), f.base_scores.end());
  std::vector<double> weights(f.size());
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    weights[i] = std::exp((f.base_scores[i] - top) / lambda.value);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return ProbVector(std::move(weights));
}

Bits breadth(const SourceFamily& f, Lambda lambda) {
  return entropy(message_distribution(f, lambda));
}

} // namespace semioscope
