#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "leafcausal/error.hpp"
#include "leafcausal/metric_fn.hpp"

namespace leafcausal {

/// Default band for deciding "lightlike" on max-abs normalized vectors.
inline constexpr double kCausalTol = 1e-9;

using Rng = std::mt19937_64;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool periodic = false;

  double period() const { return hi - lo; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

/// Deck translations of a chart that is a quotient of R^n by a (possibly
/// non-axis-aligned) lattice. Columns of `basis` are the translations; the
/// fundamental domain is the set where the coefficients along `pivots`
/// (one coordinate axis per column) lie in [0, 1).
/// With no pivots the basis must be square and the fundamental domain is the
/// parallelepiped of lattice coefficients in [0, 1); every axis is then
/// declared periodic and the box only bounds the domain for sampling.
struct Lattice {
  Mat basis;
  std::vector<int> pivots;
};

struct Chart {
  std::string name;
  std::vector<Interval> box;
  MetricFn metric;
  std::optional<Lattice> lattice;
  /// Points removed from the manifold (deleted segments, boxes, points).
  std::function<bool(const Vec&)> excluded;
  /// Finite region used for randomized audits when `box` is unbounded.
  std::vector<Interval> sample_box;
};

/// Smooth coordinate change between two charts, defined on `domain` (a
/// subset of the source chart, which may be disconnected).
struct Transition {
  int from = 0;
  int to = 0;
  std::function<bool(const Vec&)> domain;
  std::function<Vec(const Vec&)> map;
  std::function<Mat(const Vec&)> jacobian;
};

class ChartAtlas {
 public:
  ChartAtlas() = default;
  ChartAtlas(int dim, std::vector<Chart> charts, std::vector<Transition> transitions = {});

  int dim() const { return dim_; }
  int chart_count() const { return static_cast<int>(charts_.size()); }
  const Chart& chart(int id) const;
  const std::vector<Chart>& charts() const { return charts_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Reduces periodic axes and lattice identifications into the fundamental
  /// domain of the chart.
  Vec reduce(int chart_id, Vec x) const;
  /// True when the reduced point lies in the open box and is not excluded.
  bool contains(int chart_id, const Vec& x) const;
  /// Minimal-image displacement b - a under the chart's identifications.
  Vec displacement(int chart_id, const Vec& a, const Vec& b) const;
  /// Coordinate distance to the nearest non-periodic box face (inf if none).
  double interior_margin(int chart_id, const Vec& x) const;

  /// Transition from `from` to `to` whose domain contains x, if any.
  const Transition* find_transition(int from, int to, const Vec& x) const;
  std::vector<const Transition*> transitions_from(int from) const;

  /// Replaces every chart metric (same boxes, lattices and transitions).
  ChartAtlas with_metrics(const std::vector<MetricFn>& metrics) const;

 private:
  int dim_ = 0;
  std::vector<Chart> charts_;
  std::vector<Transition> transitions_;
};

struct TangentVector {
  int chart = 0;
  Vec base;
  Vec comps;
};

enum class CausalClass { Timelike, Lightlike, Spacelike };
std::string_view to_string(CausalClass c);

struct CurveSample {
  int chart = 0;
  Vec point;
  Vec velocity;
  /// Incoming velocity at a breakpoint (the curve is only C0 there).
  std::optional<Vec> velocity_left;
};

struct CurveSamples {
  std::vector<double> params;
  std::vector<CurveSample> samples;
  std::vector<std::size_t> breakpoints;

  std::size_t size() const { return samples.size(); }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// --- operations -----------------------------------------------------------

Mat eval_metric(const ChartAtlas& atlas, int chart_id, const Vec& x);

CausalClass classify(const ChartAtlas& atlas, const TangentVector& v, double tol = kCausalTol);

double inner(const ChartAtlas& atlas, const TangentVector& v, const TangentVector& w);

QuadratureResult lorentz_length(const ChartAtlas& atlas, const CurveSamples& curve);

/// Sign-classifies a quadratic-form value of a max-abs normalized vector.
CausalClass classify_value(double q, bool is_zero, double tol = kCausalTol);

/// Scales a vector so that its largest absolute component is 1 (zero stays zero).
Vec normalize_max_abs(const Vec& v);

/// Checks structural curve invariants: increasing params, matching sizes,
/// declared transitions between consecutive charts, and (when
/// `velocity_tol` > 0) agreement of interior velocities with centered
/// differences of the points. Throws InvalidCurve.
void validate_curve(const ChartAtlas& atlas, const CurveSamples& curve, double velocity_tol = 0.0);

/// Composite Simpson quadrature over a nonuniform grid, split at
/// breakpoints, with a Richardson estimate from the every-other-point rule.
/// `left_values` holds the integrand's one-sided limit at breakpoints.
QuadratureResult integrate_samples(const std::vector<double>& params,
                                   const std::vector<double>& values,
                                   const std::vector<std::size_t>& breakpoints,
                                   const std::vector<double>& left_values = {});

// --- audits ---------------------------------------------------------------

struct AuditReport {
  bool passed = true;
  std::string first_failure;
  std::size_t checks = 0;
};

/// Random point of a chart's (sample) box avoiding excluded sets.
Vec sample_point(const ChartAtlas& atlas, int chart_id, Rng& rng);

/// Symmetry (1e-12) and constant negative-eigenvalue count per chart.
AuditReport audit_signature(const ChartAtlas& atlas, int samples_per_chart, std::uint64_t seed,
                            int expected_index = -1);

/// Pulled-back metric agreement on transition domains (1e-8).
AuditReport audit_transitions(const ChartAtlas& atlas, int samples, std::uint64_t seed);

/// Number of negative eigenvalues of a symmetric matrix.
int negative_eigenvalues(const Mat& g);

}  // namespace leafcausal
