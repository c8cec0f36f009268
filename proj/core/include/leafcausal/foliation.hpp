#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "leafcausal/geometry.hpp"
#include "leafcausal/linalg.hpp"

namespace leafcausal {

/// Identifies a leaf: quantized transverse data plus a declared component.
using LeafLabel = std::vector<std::int64_t>;

struct LeafSpaceMeta {
  std::string identification;  // human-readable quotient rule
  bool hausdorff = true;
  bool compact_leaves = false;
  bool transversely_globally_hyperbolic = false;
};

/// Adapted charts: the first p coordinates are leaf coordinates, the last q
/// are transverse, and local submersions are projections onto the last q.
struct FoliatedAtlas {
  ChartAtlas base;
  int p = 0;
  int q = 0;
  std::function<LeafLabel(int chart, const Vec& x)> leaf_label;
  LeafSpaceMeta meta;

  int dim() const { return base.dim(); }
  Vec transverse(int chart, const Vec& x) const { return base.reduce(chart, x).tail(q); }
  LeafLabel label(int chart, const Vec& x) const;
};

/// Validates dimensions and the transverse-only dependence of transitions.
/// Codimension 1 is accepted only when `allow_codim_one` (foliations used
/// for leaf-space topology, which carry no Lorentzian transverse metric).
FoliatedAtlas make_foliated_atlas(ChartAtlas base, int p,
                                  std::function<LeafLabel(int, const Vec&)> leaf_label,
                                  LeafSpaceMeta meta, bool allow_codim_one = false);

/// Default leaf label: transverse coordinates rounded to 1e-9.
LeafLabel quantized_label(const Vec& transverse, std::int64_t component = 0);

struct TransverseMetricField {
  std::vector<MetricFn> h;  // per chart, function of the q transverse coordinates
  int index = 1;
};

struct TimeOrientation {
  /// Per chart, a reference field returning full n-component vectors.
  std::vector<std::function<Vec(const Vec&)>> field;
};

enum class TransverseCausal { Timelike, Lightlike, Spacelike };
enum class Wedge { None, Future, Past };

struct TransverseClass {
  TransverseCausal kind = TransverseCausal::Spacelike;
  Wedge wedge = Wedge::None;
  /// g⊤(v, X_ref) fell inside the tolerance band; the wedge is unreliable.
  bool ambiguous = false;
};

std::string_view to_string(TransverseCausal c);
std::string_view to_string(Wedge w);

// --- transverse metric evaluation ------------------------------------------

/// q×q transverse matrix at the point x of chart `chart`.
Mat transverse_matrix(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart, const Vec& x);
/// n×n leaf-degenerate extension (rows and columns on leaf axes are zero).
Mat transverse_full(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart, const Vec& x);
double transverse_form(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart,
                       const Vec& x, const Vec& v, const Vec& w);

/// Quotient atlas of the local leaf spaces: the transverse boxes with h as metric.
ChartAtlas quotient_atlas(const FoliatedAtlas& fol, const TransverseMetricField& gt);

AuditReport audit_transverse_metric(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                    int samples, std::uint64_t seed);
AuditReport audit_time_orientation(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                   const TimeOrientation& orient, int samples, std::uint64_t seed);

// --- operations --------------------------------------------------------------

/// g = g⊤ on h-horizontal parts plus h on vertical parts. Returns the base
/// atlas carrying the assembled metric.
ChartAtlas assemble_bundle_like(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                const std::vector<MetricFn>& h, int audit_samples = 200,
                                std::uint64_t seed = 0);

struct SplitResult {
  Vec vertical;
  Vec horizontal;
};

/// g-orthogonal decomposition into leaf-tangent and horizontal parts.
SplitResult split(const FoliatedAtlas& fol, const ChartAtlas& g, const TangentVector& v);

TransverseClass classify_transverse(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                    const TimeOrientation& orient, const TangentVector& v,
                                    double tol = kCausalTol);

QuadratureResult transverse_length(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                   const CurveSamples& curve);

/// Re-roots a future transversely causal curve at z, a point of the leaf of
/// alpha's start: a straight leaf-coordinate segment carrying alpha's exact
/// transverse motion up to `pivot` (sample index), then alpha itself.
/// `pivot` = 0 picks a quarter of the samples.
CurveSamples waterfall(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                       const TimeOrientation& orient, const CurveSamples& alpha, const Vec& z,
                       std::size_t pivot = 0);

/// Lifts a curve given in transverse coordinates (q-vectors per sample,
/// chart ids of `fol`) as a constant local section through `start`.
CurveSamples lift_curve(const FoliatedAtlas& fol, const CurveSamples& base_curve, const Vec& start);

/// Transverse model of a suspension: Lorentzian metric on R^q, the generating
/// holonomy map with its differential, a reference timelike field and the
/// points at which cones are probed.
struct SuspensionSpec {
  MetricFn model;
  std::function<Vec(const Vec&)> map;
  std::function<Mat(const Vec&)> differential;
  std::function<Vec(const Vec&)> time_ref;
  std::vector<Vec> probe_points;
};

bool check_transverse_time_orientability(const SuspensionSpec& spec, std::uint64_t seed = 0);

/// Future timelike unit vectors of a Lorentzian form on the hyperboloid,
/// boost χ in [0, chi_max], spatial direction uniform.
std::vector<Vec> sample_unit_timelike(const Mat& g, const Vec& future_ref, int count, double chi_max,
                                      Rng& rng);

}  // namespace leafcausal
