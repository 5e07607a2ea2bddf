#include "semioscope/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "semioscope/errors.hpp"

namespace semioscope {

namespace {

constexpr double kTechnicianPlateauRatio = 0.9;
constexpr double kPoetDropRatio = 0.5;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Archetype classify(const ProfileCurve& curve, const CapacityResult& capacity) {
  const std::size_t n = curve.points.size();
  if (n == 0) return Archetype::unclassified;
  const double x0 = std::log(curve.points.front().lambda);
  const double x1 = std::log(curve.points.back().lambda);
  const double range = x1 - x0;
  const double x_opt =
      std::clamp(std::log(capacity.lambda_opt), std::min(x0, x1), std::max(x0, x1));
  const double c = capacity.capacity_bits.value;

  const bool lower_third = x_opt <= x0 + range / 3.0;
  const bool upper_third = x_opt >= x0 + 2.0 * range / 3.0;

  std::size_t plateau = 0;
  for (const auto& pt : curve.points) {
    if (pt.decipherability_bits.value >= kTechnicianPlateauRatio * c - 1e-12) {
      ++plateau;
    }
  }
  if (lower_third && 2 * plateau >= n) return Archetype::technician;

  if (upper_third) {
    std::size_t k0 = n - 1;
    for (std::size_t k = 0; k < n; ++k) {
      if (curve.points[k].lambda >= capacity.lambda_opt) {
        k0 = k;
        break;
      }
    }
    const std::size_t horizon = std::min(n - 1, k0 + n / 3);
    for (std::size_t k = k0 + 1; k <= horizon && k < n; ++k) {
      if (curve.points[k].decipherability_bits.value < kPoetDropRatio * c) {
        return Archetype::poet;
      }
    }
  }
  return curve.unimodality_flag ? Archetype::tightrope_walker
                                : Archetype::unclassified;
}

} // namespace

const char* archetype_name(Archetype a) {
  switch (a) {
    case Archetype::poet: return "poet";
    case Archetype::technician: return "technician";
    case Archetype::tightrope_walker: return "tightrope_walker";
    case Archetype::unclassified: return "unclassified";
  }
  return "unclassified";
}

CertificationReport certify(const ProfileCurve& curve,
                            const CapacityResult& capacity,
                            const CertificationPolicy& policy,
                            std::size_t interp_alphabet) {
  if (curve.audience_id != capacity.audience_id ||
      curve.context_id != capacity.context_id) {
    throw DomainError("certify: curve channel (" + curve.audience_id + ", " +
                      curve.context_id + ") does not match capacity channel (" +
                      capacity.audience_id + ", " + capacity.context_id + ")");
  }
  if (!(policy.d_min >= 0.0)) throw DomainError("policy d_min must be >= 0");
  if (policy.s_min && policy.s_max && *policy.s_min > *policy.s_max) {
    throw DomainError("policy s_min exceeds s_max");
  }
  if (policy.metric == PolicyMetric::normalized && interp_alphabet < 2) {
    throw DomainError("normalized metric needs an interpretation alphabet "
                      "of >= 2 symbols");
  }

  CertificationReport report;
  report.capacity = capacity;

  const bool normalized = policy.metric == PolicyMetric::normalized;
  const double denom =
      normalized ? std::log2(static_cast<double>(interp_alphabet)) : 1.0;
  const double d_metric = capacity.capacity_bits.value / denom;
  if (d_metric < policy.d_min) {
    report.reasons.push_back(
        std::string("decipherability at lambda_opt ") + fmt(d_metric) +
        (normalized ? " (normalized)" : " bits") + " is below the threshold " +
        fmt(policy.d_min));
  }
  const double s_opt = capacity.breadth_at_opt_bits.value;
  if (policy.s_min && s_opt < *policy.s_min) {
    report.reasons.push_back("breadth at lambda_opt " + fmt(s_opt) +
                             " bits is below the minimum " + fmt(*policy.s_min));
  }
  if (policy.s_max && s_opt > *policy.s_max) {
    report.reasons.push_back("breadth at lambda_opt " + fmt(s_opt) +
                             " bits is above the maximum " + fmt(*policy.s_max));
  }
  if (policy.require_unimodal && !(curve.unimodality_flag && capacity.unimodal)) {
    report.reasons.push_back(
        "unimodality required but the decipherability curve has " +
        std::to_string(curve.local_maxima_count) + " local maxima" +
        (capacity.unimodal ? "" : " (capacity scan also non-unimodal)"));
  }

  report.pass = report.reasons.empty();
  report.archetype = classify(curve, capacity);
  return report;
}

} // namespace semioscope
