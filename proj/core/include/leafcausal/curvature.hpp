#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "leafcausal/foliation.hpp"
#include "leafcausal/geometry.hpp"

namespace leafcausal {

enum class DerivMode { ForwardDual, CentralFd };

struct DerivEngine {
  DerivMode mode = DerivMode::ForwardDual;
  double fd_step = 1e-3;
  bool richardson = true;

  /// Throws InvalidAtlas when fd_step is outside [1e-7, 1e-3] for central-fd.
  void validate() const;
  static DerivEngine central(double step = 1e-3, bool richardson = true) {
    return {DerivMode::CentralFd, step, richardson};
  }
};

/// g with its first (and optionally second) coordinate derivatives.
struct MetricJet {
  Mat g;
  std::vector<Mat> dg;                // dg[k] = ∂_k g
  std::vector<std::vector<Mat>> ddg;  // ddg[k][l] = ∂_k ∂_l g
};

MetricJet metric_jet(const MetricFn& metric, const Vec& x, const DerivEngine& engine, bool second);

/// gamma[k](i, j) = Γ^k_{ij}.
using Christoffel = std::vector<Mat>;

struct CurvatureAtPoint {
  Christoffel christoffel;
  Mat ricci;
  double scalar = 0.0;
};

Christoffel christoffel(const MetricFn& metric, const Vec& x, const DerivEngine& engine = {});
Christoffel christoffel_from_jet(const MetricJet& jet);
/// grad[m][a](b, c) = ∂_m Γ^a_{bc}; needs the second-order jet.
std::vector<Christoffel> christoffel_gradient(const MetricJet& jet);
Mat ricci(const MetricFn& metric, const Vec& x, const DerivEngine& engine = {});
CurvatureAtPoint curvature_at(const MetricFn& metric, const Vec& x, const DerivEngine& engine = {});

/// Chart-checked variants (point must lie in the chart; periodic axes reduced).
Christoffel christoffel(const ChartAtlas& atlas, int chart, const Vec& x, const DerivEngine& engine = {});
Mat ricci(const ChartAtlas& atlas, int chart, const Vec& x, const DerivEngine& engine = {});

/// Ric⊤(v, w): Ricci of the quotient metric at π(x) on the transverse parts.
double transverse_ricci(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart, const Vec& x,
                        const Vec& v, const Vec& w, const DerivEngine& engine = {});
Mat transverse_ricci_matrix(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart,
                            const Vec& x, const DerivEngine& engine = {});

/// Pointwise data of a warped product B ×_f F (fiber dimension p) for the
/// O'Neill Ricci formula. Hessian and Laplacian are those of g_B.
struct WarpedPointData {
  int p = 0;
  Mat ric_b;
  Mat ric_f;
  Mat g_b;
  Mat g_f;  // unwarped fiber metric
  double f = 1.0;
  Vec grad_f;  // raised with g_B
  Mat hess_f;
  double lap_f = 0.0;
};

/// Ric_g(T,T) with T = (t_v on the fiber, t_h on the base).
double warped_ricci_closed_form(const WarpedPointData& d, const Vec& t_v, const Vec& t_h);

struct ScanConfig {
  std::vector<Vec> points;  // chart coordinates of the scanned metric
  int directions = 16;      // unit timelike directions per point
  double chi_max = 3.0;
  std::uint64_t seed = 0;
};

struct RicciBoundReport {
  double C = 0.0;
  double factor = 1.0;
  double min_value = 0.0;
  Vec argmin_point;
  Vec argmin_direction;
  std::size_t argmin_index = 0;
  std::size_t point_count = 0;
  std::size_t direction_count = 0;
  double chi_max = 3.0;
  std::uint64_t seed = 0;

  double margin() const { return min_value - factor * C; }
  bool holds(double tol = 0.0) const { return margin() >= -tol; }
};

/// Deterministic direction set at a point: boosts spread over [0, chi_max]
/// and spatial directions drawn from a per-point seeded stream.
std::vector<Vec> unit_timelike_directions(const Mat& g, const Vec& future_ref, int count, double chi_max,
                                          std::uint64_t seed);

using RicciForm = std::function<double(const Vec& x, const Vec& v)>;

/// Minimum of `form(x, v)` over unit timelike v of `atlas` (chart `chart`)
/// at the configured points. Parallel over points; ties go to the lowest index.
RicciBoundReport scan_ricci_bound(const ChartAtlas& atlas, int chart,
                                  const std::function<Vec(const Vec&)>& future_ref, const RicciForm& form,
                                  double C, double factor, const ScanConfig& cfg);

/// Ric_g scan over unit timelike vectors of g itself.
RicciBoundReport scan_ricci_bound(const ChartAtlas& atlas, int chart,
                                  const std::function<Vec(const Vec&)>& future_ref, double C, double factor,
                                  const ScanConfig& cfg, const DerivEngine& engine = {});

/// Ric⊤ scan over unit timelike vectors of the quotient metric. Points are
/// transverse (quotient) coordinates.
RicciBoundReport scan_transverse_ricci_bound(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                             const TimeOrientation& orient, int chart, double C,
                                             double factor, const ScanConfig& cfg,
                                             const DerivEngine& engine = {});

}  // namespace leafcausal
