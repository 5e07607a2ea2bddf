#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace semioscope {

/// Information quantity in bits (log base 2).
struct Bits {
  double value = 0.0;
};

/// Discrete probability distribution over a finite alphabet.
///
/// Entries must be nonnegative and sum to 1 within 1e-9; sums inside that
/// tolerance are renormalized so downstream arithmetic sees an exact
/// distribution. Anything worse raises ValidationError naming the offending
/// entry.
class ProbVector {
public:
  explicit ProbVector(std::vector<double> probs);

  std::size_t alphabet_size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  std::span<const double> span() const { return probs_; }

private:
  std::vector<double> probs_;
};

/// Joint distribution over (message, interpretation) pairs, row-major.
class JointDist {
public:
  JointDist(std::vector<double> cells, std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t m, std::size_t i) const { return cells_[m * cols_ + i]; }
  const std::vector<double>& cells() const { return cells_; }

  ProbVector row_marginal() const;
  ProbVector col_marginal() const;
  JointDist transposed() const;

private:
  std::vector<double> cells_;
  std::size_t rows_;
  std::size_t cols_;
};

/// Shannon entropy, bits. 0 <= H <= log2(alphabet_size).
Bits entropy(const ProbVector& p);

/// h(p) = -p log2 p - (1-p) log2(1-p). DomainError outside [0, 1].
Bits binary_entropy(double p);

/// H(Int | M) = sum_m p(m) H(Int | M = m).
Bits conditional_entropy(const JointDist& j);

/// I(M; Int) = H(Int) - H(Int | M). Nonnegative; tiny rounding deficits are
/// clamped to zero.
Bits mutual_information(const JointDist& j);

/// Smallest error probability consistent with the given conditional entropy
/// over an alphabet of size interp_alphabet, i.e. the least P_e satisfying
/// h(P_e) + P_e log2(K-1) >= residual. Solved by bisection on [0, 1 - 1/K]
/// to absolute tolerance 1e-10.
double fano_error_lower_bound(Bits residual, std::size_t interp_alphabet);

} // namespace semioscope
