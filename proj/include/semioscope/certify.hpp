#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semioscope/capacity.hpp"

namespace semioscope {

enum class PolicyMetric { raw_bits, normalized };

/// Deployment policy for one channel. With the normalized metric the
/// decipherability threshold applies to D / log2(|Int|), which lives in
/// [0, 1]; breadth bounds are always in raw bits.
struct CertificationPolicy {
  PolicyMetric metric = PolicyMetric::normalized;
  double d_min = 0.0;
  std::optional<double> s_min;
  std::optional<double> s_max;
  bool require_unimodal = false;
};

enum class Archetype { poet, technician, tightrope_walker, unclassified };

struct CertificationReport {
  bool pass = false;
  CapacityResult capacity;
  Archetype archetype = Archetype::unclassified;
  std::vector<std::string> reasons;
};

const char* archetype_name(Archetype a);

/// Checks the policy clauses at the capacity point and classifies the
/// communicative shape of the curve:
///  - technician: optimum in the lower third of the log-lambda range and
///    D >= 0.9 C on at least half the grid;
///  - poet: optimum in the upper third and D dropping below 0.5 C within a
///    third of the grid past the optimum;
///  - tightrope_walker: neither, on a unimodal curve.
/// The thresholds are repository conventions, frozen here.
CertificationReport certify(const ProfileCurve& curve,
                            const CapacityResult& capacity,
                            const CertificationPolicy& policy,
                            std::size_t interp_alphabet);

} // namespace semioscope
