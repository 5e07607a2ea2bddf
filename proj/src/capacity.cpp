#include "semioscope/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_map>

#include "semioscope/errors.hpp"
#include "semioscope/rng.hpp"

namespace semioscope {

namespace {

constexpr double kPlateauTol = 1e-9;
constexpr double kMinStep = 1e-3;
constexpr double kInvPhi = 0.6180339887498949;

} // namespace

double risk_score(Bits s, Bits d, double cap) {
  return d.value > 1e-12 ? s.value / d.value : cap;
}

int count_local_maxima(std::span<const double> values, double tol) {
  if (values.empty()) return 0;
  // Collapse runs of equal-within-tol neighbors into plateau nodes.
  std::vector<double> nodes;
  nodes.push_back(values[0]);
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (std::abs(values[k] - values[k - 1]) > tol) nodes.push_back(values[k]);
  }
  int count = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const bool left_lower = (j == 0) || nodes[j - 1] < nodes[j];
    const bool right_lower = (j + 1 == nodes.size()) || nodes[j + 1] < nodes[j];
    if (left_lower && right_lower) ++count;
  }
  return count;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (n < 1) throw DomainError("grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw DomainError("log grid needs 0 < lo <= hi");
  }
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = lo * std::exp(ratio * static_cast<double>(k));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t n) {
  if (n < 1) throw DomainError("grid needs at least one point");
  if (!(hi >= lo)) throw DomainError("linear grid needs lo <= hi");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) out[k] = lo + step * static_cast<double>(k);
  out.back() = hi;
  return out;
}

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw DomainError("lambda grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) {
      throw DomainError("lambda grid entry " + std::to_string(k) +
                        " is not positive");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw DomainError("lambda grid must be strictly increasing (entry " +
                        std::to_string(k) + ")");
    }
  }
}

} // namespace

ProfileCurve profile(const SourceFamily& f, const SemioticChannel& ch,
                     std::span<const double> lambda_grid, double risk_cap) {
  check_grid(lambda_grid);
  ProfileCurve curve;
  curve.audience_id = ch.audience_id;
  curve.context_id = ch.context_id;
  curve.points.reserve(lambda_grid.size());
  std::vector<double> d_values;
  d_values.reserve(lambda_grid.size());
  for (double lam : lambda_grid) {
    const JointDist joint =
        joint_distribution(message_distribution(f, Lambda(lam)), ch);
    const Bits s = entropy(joint.row_marginal());
    const Bits resid = conditional_entropy(joint);
    const double d_raw = entropy(joint.col_marginal()).value - resid.value;
    const Bits d{d_raw < 0.0 ? 0.0 : d_raw};
    curve.points.push_back(
        {lam, s, d, resid, risk_score(s, d, risk_cap)});
    d_values.push_back(d.value);
  }
  curve.local_maxima_count = count_local_maxima(d_values, kPlateauTol);
  curve.unimodality_flag = curve.local_maxima_count == 1;
  return curve;
}

namespace {

// Best-seen tracker with leftmost tie-breaking on a 1e-9 plateau.
struct BestPoint {
  double lambda = 0.0;
  double d = -1.0;

  void offer(double lam, double value) {
    if (value > d + kPlateauTol) {
      lambda = lam;
      d = value;
    } else if (value > d - kPlateauTol && lam < lambda) {
      lambda = lam;
      d = value;
    }
  }
};

} // namespace

CapacityResult lambda_opt(const SourceFamily& f, const SemioticChannel& ch,
                          double lambda_lo, double lambda_hi,
                          std::size_t coarse_points, double tol) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo)) {
    throw DomainError("lambda_opt needs 0 < lo < hi");
  }
  if (coarse_points < 3) throw DomainError("lambda_opt needs >= 3 coarse points");
  if (!(tol > 0.0)) throw DomainError("lambda_opt tolerance must be positive");

  const auto eval = [&](double lam) {
    return decipherability(f, Lambda(lam), ch).value;
  };

  const std::vector<double> grid = log_spaced(lambda_lo, lambda_hi, coarse_points);
  std::vector<double> d_values(grid.size());
  BestPoint best;
  std::size_t argmax = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    d_values[k] = eval(grid[k]);
    best.offer(grid[k], d_values[k]);
    if (d_values[k] > d_values[argmax] + kPlateauTol) argmax = k;
  }
  const bool unimodal = count_local_maxima(d_values, kPlateauTol) == 1;

  double a = grid[argmax == 0 ? 0 : argmax - 1];
  double b = grid[std::min(argmax + 1, grid.size() - 1)];
  int iterations = 0;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  best.offer(x1, f1);
  best.offer(x2, f2);
  while (b - a > tol) {
    ++iterations;
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = eval(x2);
      best.offer(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = eval(x1);
      best.offer(x1, f1);
    }
  }

  CapacityResult result;
  result.audience_id = ch.audience_id;
  result.context_id = ch.context_id;
  result.lambda_opt = best.lambda;
  result.capacity_bits = Bits{best.d};
  result.breadth_at_opt_bits = breadth(f, Lambda(best.lambda));
  result.search_iterations = iterations;
  result.unimodal = unimodal;
  return result;
}

BlahutArimotoResult blahut_arimoto(const SemioticChannel& ch, double tol,
                                   int max_iter) {
  if (!(tol > 0.0)) throw DomainError("blahut_arimoto tolerance must be positive");
  if (max_iter < 1) throw DomainError("blahut_arimoto needs max_iter >= 1");

  const std::size_t rows = ch.matrix.rows();
  const std::size_t cols = ch.matrix.cols();
  std::vector<double> input(rows, 1.0 / static_cast<double>(rows));
  std::vector<double> output(cols);
  std::vector<double> kl(rows);

  double capacity_nats = 0.0;
  bool converged = false;
  int iterations = 0;
  while (iterations < max_iter) {
    ++iterations;
    std::fill(output.begin(), output.end(), 0.0);
    for (std::size_t m = 0; m < rows; ++m) {
      for (std::size_t i = 0; i < cols; ++i) {
        output[i] += input[m] * ch.matrix.at(m, i);
      }
    }
    // kl[m] = D(row_m || output) in nats; exp of it drives the update and
    // brackets the capacity: ln sum(r exp(kl)) <= C <= max kl.
    double upper = 0.0;
    for (std::size_t m = 0; m < rows; ++m) {
      double d = 0.0;
      for (std::size_t i = 0; i < cols; ++i) {
        const double w = ch.matrix.at(m, i);
        if (w > 0.0) d += w * std::log(w / output[i]);
      }
      kl[m] = d;
      if (m == 0 || d > upper) upper = d;
    }
    double total = 0.0;
    for (std::size_t m = 0; m < rows; ++m) {
      input[m] *= std::exp(kl[m] - upper);
      total += input[m];
    }
    for (double& r : input) r /= total;
    const double lower = std::log(total) + upper;
    capacity_nats = lower;
    if ((upper - lower) / std::numbers::ln2_v<double> < tol) {
      converged = true;
      break;
    }
  }

  BlahutArimotoResult result{
      Bits{std::max(0.0, capacity_nats / std::numbers::ln2_v<double>)},
      ProbVector(std::move(input)), iterations, converged};
  return result;
}

namespace {

struct BatchEstimate {
  double d_hat = 0.0;
  double s_hat = 0.0;
};

// Plugin entropy/MI of the empirical joint over observed ids.
BatchEstimate estimate_batch(const std::vector<InteractionRecord>& records) {
  if (records.empty()) return {};
  std::unordered_map<std::string, std::size_t> msg_index, int_index;
  for (const auto& r : records) {
    msg_index.emplace(r.message_id, msg_index.size());
    int_index.emplace(r.interpretation_id, int_index.size());
  }
  const std::size_t rows = msg_index.size();
  const std::size_t cols = int_index.size();
  std::vector<double> cells(rows * cols, 0.0);
  const double w = 1.0 / static_cast<double>(records.size());
  for (const auto& r : records) {
    cells[msg_index[r.message_id] * cols + int_index[r.interpretation_id]] += w;
  }
  const JointDist joint(std::move(cells), rows, cols);
  return {mutual_information(joint).value, entropy(joint.row_marginal()).value};
}

} // namespace

std::vector<AdaptStep> adapt_lambda(const InteractionSampler& sampler,
                                    const AdaptConfig& cfg) {
  if (!(cfg.lambda_min > 0.0) || !(cfg.lambda_max > cfg.lambda_min)) {
    throw DomainError("adapt_lambda needs 0 < lambda_min < lambda_max");
  }
  if (!(cfg.lambda_init > 0.0) || cfg.lambda_init > cfg.lambda_max) {
    throw DomainError("lambda_init must lie in (0, lambda_max]");
  }
  if (!(cfg.step_init > 0.0)) throw DomainError("step_init must be positive");
  if (!(cfg.shrink_factor > 0.0 && cfg.shrink_factor < 1.0)) {
    throw DomainError("shrink_factor must lie in (0, 1)");
  }
  if (cfg.batch_size < 1) throw DomainError("batch_size must be >= 1");
  if (cfg.max_rounds < 1) throw DomainError("max_rounds must be >= 1");

  // Each bit of breadth over the cap costs two bits of objective, so the
  // penalized objective still slopes downward when D tracks S closely.
  constexpr double kBreadthPenalty = 2.0;
  const auto objective = [&](const BatchEstimate& e) {
    double obj = e.d_hat;
    if (cfg.safe_mode && e.s_hat > cfg.breadth_cap) {
      obj -= kBreadthPenalty * (e.s_hat - cfg.breadth_cap);
    }
    return obj;
  };
  const auto evaluate = [&](double lam) {
    return estimate_batch(sampler(lam, cfg.batch_size));
  };
  const auto clamp = [&](double lam) {
    return std::min(std::max(lam, cfg.lambda_min), cfg.lambda_max);
  };

  double lambda = clamp(cfg.lambda_init);
  double step = cfg.step_init;
  std::vector<AdaptStep> trace;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    if (step < kMinStep) break;
    const double lo = clamp(lambda / (1.0 + step));
    const double hi = clamp(lambda * (1.0 + step));
    const BatchEstimate e_lo = evaluate(lo);
    const BatchEstimate e_center = evaluate(lambda);
    const BatchEstimate e_hi = evaluate(hi);

    const double obj_center = objective(e_center);
    double best_lambda = lambda;
    BatchEstimate best = e_center;
    double best_obj = obj_center;
    if (objective(e_lo) > best_obj) {
      best_lambda = lo;
      best = e_lo;
      best_obj = objective(e_lo);
    }
    if (objective(e_hi) > best_obj) {
      best_lambda = hi;
      best = e_hi;
      best_obj = objective(e_hi);
    }

    if (best_lambda == lambda) {
      step *= cfg.shrink_factor;
    } else {
      lambda = best_lambda;
    }
    trace.push_back({round, lambda, Bits{best.d_hat}, Bits{best.s_hat}, step});
  }
  return trace;
}

InteractionSampler make_scenario_sampler(const Scenario& scenario,
                                         std::uint64_t seed) {
  auto shared = std::make_shared<Scenario>(scenario);
  auto counter = std::make_shared<std::uint64_t>(0);
  return [shared, counter, seed](double lam, std::size_t n) {
    // splitmix64 of the call index keeps per-batch streams independent.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (++*counter);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return sample_interactions(shared->source, Lambda(lam), shared->channel, n, z);
  };
}

} // namespace semioscope
