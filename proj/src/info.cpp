#include "semioscope/info.hpp"

#include <cmath>
#include <string>

#include "semioscope/errors.hpp"

namespace semioscope {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kFanoTolerance = 1e-10;

void check_entries(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(what) + " entry " + std::to_string(i) +
                            " is not finite");
    }
    if (v < 0.0) {
      throw ValidationError(std::string(what) + " entry " + std::to_string(i) +
                            " is negative (" + std::to_string(v) + ")");
    }
  }
}

double checked_total(std::span<const double> values, const char* what) {
  double sum = 0.0;
  for (double v : values) sum += v;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError(std::string(what) + " sums to " +
                          std::to_string(sum) + ", expected 1 within 1e-9");
  }
  return sum;
}

// -p log2 p with the 0 log 0 := 0 convention.
double plog2p(double p) {
  return p > 0.0 ? -p * std::log2(p) : 0.0;
}

} // namespace

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw ValidationError("probability vector must have at least one entry");
  }
  check_entries(probs_, "probability");
  const double sum = checked_total(probs_, "probability vector");
  for (double& v : probs_) v /= sum;
}

JointDist::JointDist(std::vector<double> cells, std::size_t rows,
                     std::size_t cols)
    : cells_(std::move(cells)), rows_(rows), cols_(cols) {
  if (rows_ == 0 || cols_ == 0 || cells_.size() != rows_ * cols_) {
    throw ShapeError("joint distribution shape mismatch: " +
                     std::to_string(cells_.size()) + " cells for " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  check_entries(cells_, "joint");
  const double sum = checked_total(cells_, "joint distribution");
  for (double& v : cells_) v /= sum;
}

ProbVector JointDist::row_marginal() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t m = 0; m < rows_; ++m) {
    for (std::size_t i = 0; i < cols_; ++i) out[m] += at(m, i);
  }
  return ProbVector(std::move(out));
}

ProbVector JointDist::col_marginal() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t m = 0; m < rows_; ++m) {
    for (std::size_t i = 0; i < cols_; ++i) out[i] += at(m, i);
  }
  return ProbVector(std::move(out));
}

JointDist JointDist::transposed() const {
  std::vector<double> out(cells_.size());
  for (std::size_t m = 0; m < rows_; ++m) {
    for (std::size_t i = 0; i < cols_; ++i) out[i * rows_ + m] = at(m, i);
  }
  return JointDist(std::move(out), cols_, rows_);
}

Bits entropy(const ProbVector& p) {
  double h = 0.0;
  for (double v : p.probs()) h += plog2p(v);
  return Bits{h};
}

Bits binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binary_entropy argument " + std::to_string(p) +
                      " outside [0, 1]");
  }
  return Bits{plog2p(p) + plog2p(1.0 - p)};
}

Bits conditional_entropy(const JointDist& j) {
  // sum over cells of p(m,i) log2(p(m) / p(m,i)); every term is nonnegative.
  double h = 0.0;
  for (std::size_t m = 0; m < j.rows(); ++m) {
    double pm = 0.0;
    for (std::size_t i = 0; i < j.cols(); ++i) pm += j.at(m, i);
    if (pm <= 0.0) continue;
    for (std::size_t i = 0; i < j.cols(); ++i) {
      const double pmi = j.at(m, i);
      if (pmi > 0.0) h += pmi * std::log2(pm / pmi);
    }
  }
  return Bits{h < 0.0 ? 0.0 : h};
}

Bits mutual_information(const JointDist& j) {
  const double mi =
      entropy(j.col_marginal()).value - conditional_entropy(j).value;
  return Bits{mi < 0.0 ? 0.0 : mi};
}

double fano_error_lower_bound(Bits residual, std::size_t interp_alphabet) {
  if (interp_alphabet < 2) {
    throw DomainError("fano bound needs an interpretation alphabet of >= 2, got " +
                      std::to_string(interp_alphabet));
  }
  const double k = static_cast<double>(interp_alphabet);
  const double limit = std::log2(k);
  double target = residual.value;
  if (target < 0.0) {
    throw DomainError("fano bound residual must be nonnegative");
  }
  if (target > limit + 1e-12) {
    throw DomainError("residual " + std::to_string(target) +
                      " bits exceeds log2(K) = " + std::to_string(limit) +
                      "; no error probability can satisfy the bound");
  }
  if (target == 0.0) return 0.0;
  // At residual = log2 K the bound is met only at the right endpoint; the
  // bisection's acceptance test is numerically flat there, so answer exactly.
  if (target >= limit) return 1.0 - 1.0 / k;

  const double log_km1 = std::log2(k - 1.0);
  const auto lhs = [&](double pe) {
    return binary_entropy(pe).value + pe * log_km1;
  };
  // lhs is nondecreasing on [0, 1 - 1/K] with lhs(0) = 0, lhs(1 - 1/K) = log2 K.
  double lo = 0.0;
  double hi = 1.0 - 1.0 / k;
  while (hi - lo > kFanoTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (lhs(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

} // namespace semioscope
