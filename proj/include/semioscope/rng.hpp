#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace semioscope {

// All randomness in the library flows through std::mt19937_64 plus the
// helpers below. std::*_distribution adapters are avoided on purpose: their
// algorithms are implementation-defined, while the raw engine output is
// pinned by the standard, so seeded runs stay reproducible across toolchains.

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inclusive cumulative sums of a probability vector; the last entry is
/// forced to 1 so a categorical draw always lands.
inline std::vector<double> cumulative(std::span<const double> probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

/// Index of the first cdf entry exceeding u. Linear walk; alphabets here are
/// small.
inline std::size_t draw_categorical(std::span<const double> cdf,
                                    std::mt19937_64& rng) {
  const double u = unit_double(rng);
  for (std::size_t i = 0; i + 1 < cdf.size(); ++i) {
    if (u < cdf[i]) return i;
  }
  return cdf.empty() ? 0 : cdf.size() - 1;
}

} // namespace semioscope
