#pragma once

#include <cstdint>
#include <string>

#include "leafcausal/foliation.hpp"

namespace leafcausal {

struct PropertyCount {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first_failure;
};

/// Random vectors (generic, g-null and transversely null mixes) at random
/// points: g-timelike ⇒ transversely timelike, g-lightlike ⇒ transversely
/// causal, transversely spacelike ⇒ g-spacelike. Mismatches explained by the
/// tolerance band alone are not counted.
PropertyCount hierarchy_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                              const TimeOrientation& orient, std::size_t samples, std::uint64_t seed);

/// Positive combinations of same-wedge timelike vectors stay in the wedge;
/// the sign of g⊤(u, v) separates same and opposite wedges.
PropertyCount wedge_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt, const TimeOrientation& orient,
                          std::size_t samples, std::uint64_t seed);

/// w with g⊤(v, w) = 0 for transversely timelike v is transversely spacelike.
PropertyCount orthogonality_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                  const TimeOrientation& orient, std::size_t samples, std::uint64_t seed);

struct LengthSuiteResult {
  PropertyCount inequality;  // ℓ_g ≤ ℓ⊤ on causal polylines
  PropertyCount equality;    // equality exactly on the horizontal ones
  double max_horizontal_gap = 0.0;
  double min_vertical_gap = 0.0;
};

/// Half of the polylines are horizontal, half carry vertical drift.
LengthSuiteResult length_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                               const TimeOrientation& orient, std::size_t polylines, std::uint64_t seed,
                               double gap_tol = 1e-9);

}  // namespace leafcausal
