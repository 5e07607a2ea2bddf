#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "semioscope/channel.hpp"
#include "semioscope/info.hpp"
#include "semioscope/source.hpp"

namespace semioscope {

constexpr double kDefaultRiskCap = 1e6;

/// s/d in bits-per-bit; returns `cap` when d is numerically zero.
double risk_score(Bits s, Bits d, double cap = kDefaultRiskCap);

struct ProfilePoint {
  double lambda = 0.0;
  Bits breadth_bits;
  Bits decipherability_bits;
  Bits residual_ambiguity_bits;
  double risk = 0.0;
};

/// Sampled S/D curves for one channel. `local_maxima_count` counts local
/// maxima of the decipherability column with plateau collapsing: a maximal
/// run of values equal within 1e-9 counts once.
struct ProfileCurve {
  std::string audience_id;
  std::string context_id;
  std::vector<ProfilePoint> points;
  bool unimodality_flag = false;
  int local_maxima_count = 0;
};

/// Local-maxima count of a value sequence under the plateau rule.
int count_local_maxima(std::span<const double> values, double tol = 1e-9);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);
std::vector<double> linear_spaced(double lo, double hi, std::size_t n);

/// One ProfilePoint per grid temperature. The grid must be strictly
/// increasing and positive.
ProfileCurve profile(const SourceFamily& f, const SemioticChannel& ch,
                     std::span<const double> lambda_grid,
                     double risk_cap = kDefaultRiskCap);

struct CapacityResult {
  std::string audience_id;
  std::string context_id;
  double lambda_opt = 0.0;
  Bits capacity_bits;
  Bits breadth_at_opt_bits;
  int search_iterations = 0;
  bool unimodal = false;
};

/// Coarse log-spaced scan over [lo, hi] followed by golden-section
/// refinement around the grid argmax, down to bracket width < tol.
/// Plateau ties resolve to the smallest temperature. Multiple coarse local
/// maxima clear the unimodal flag but still refine around the best point.
CapacityResult lambda_opt(const SourceFamily& f, const SemioticChannel& ch,
                          double lambda_lo, double lambda_hi,
                          std::size_t coarse_points, double tol);

struct BlahutArimotoResult {
  Bits capacity_bits;
  ProbVector input_dist;
  int iterations = 0;
  bool converged = false;
};

/// Unconstrained capacity of the channel matrix via alternating
/// maximization. Stops when the capacity bound gap drops below tol (bits);
/// hitting max_iter returns converged = false rather than throwing.
BlahutArimotoResult blahut_arimoto(const SemioticChannel& ch, double tol,
                                   int max_iter);

/// Draws a fresh batch of records at the requested temperature.
using InteractionSampler =
    std::function<std::vector<InteractionRecord>(double lambda, std::size_t n)>;

struct AdaptConfig {
  double lambda_init = 1.0;
  double step_init = 0.5;
  std::size_t batch_size = 5000;
  double shrink_factor = 0.6;
  int max_rounds = 40;
  bool safe_mode = false;
  double breadth_cap = 0.0;   // bits; only read in safe mode
  double lambda_min = 0.05;
  double lambda_max = 20.0;
};

struct AdaptStep {
  int round = 0;
  double lambda = 0.0;
  Bits decipherability_hat;
  Bits breadth_hat;
  double step = 0.0;
};

/// Derivative-free stochastic hill climb on estimated decipherability.
/// Each round evaluates fresh batches at lambda/(1+step), lambda and
/// lambda*(1+step), moves to the best, and shrinks the step when the center
/// wins. In safe mode the objective is penalized by estimated breadth in
/// excess of breadth_cap. Stops after max_rounds or once step < 1e-3.
std::vector<AdaptStep> adapt_lambda(const InteractionSampler& sampler,
                                    const AdaptConfig& cfg);

/// Sampler over a fixed scenario; successive batches use seeds derived from
/// `seed` by counting calls, so a whole adaptive run replays exactly.
InteractionSampler make_scenario_sampler(const Scenario& scenario,
                                         std::uint64_t seed);

} // namespace semioscope
