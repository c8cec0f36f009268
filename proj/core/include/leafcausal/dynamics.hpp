#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leafcausal/curvature.hpp"
#include "leafcausal/foliation.hpp"

namespace leafcausal {

struct GeodesicState {
  int chart = 0;
  Vec point;
  Vec velocity;
  double length = 0.0;
};

enum class ExitMode { Throw, Truncate };

struct IntegratorConfig {
  double step = 5e-3;
  double min_step = 1e-12;
  ExitMode on_exit = ExitMode::Throw;
  /// Switch to a neighbouring chart when closer than this to a box face.
  double switch_margin = 0.05;
  std::size_t max_steps = 5'000'000;
};

struct GeodesicRun {
  CurveSamples curve;
  std::vector<double> proper_length;  // accumulated per sample
  bool left_domain = false;
  double norm_drift = 0.0;  // max |g(γ',γ') − g(γ'(0),γ'(0))|
};

/// Classic RK4 on the geodesic equation with chart switching. On leaving the
/// atlas the last step is bisected onto the boundary; then either LeftAtlas
/// is thrown or the run is truncated there, per `cfg.on_exit`.
GeodesicRun integrate_geodesic_run(const ChartAtlas& atlas, const GeodesicState& s0, double max_param,
                                   const DerivEngine& engine = {}, const IntegratorConfig& cfg = {});
CurveSamples integrate_geodesic(const ChartAtlas& atlas, const GeodesicState& s0, double max_param,
                                const DerivEngine& engine = {}, const IntegratorConfig& cfg = {});

/// Max over samples of the norm of the vertical part of the velocity.
double check_horizontal(const FoliatedAtlas& fol, const ChartAtlas& g, const CurveSamples& curve);

/// Horizontal lift of a transverse vector w at x: vertical part solves g(v, leaf) = 0.
Vec horizontal_lift(const FoliatedAtlas& fol, const ChartAtlas& g, int chart, const Vec& x, const Vec& w);

struct FocalSample {
  double s = 0.0;
  double riccati = 0.0;  // tr(A' A⁻¹) = (det A)'/det A
  double det = 0.0;
  double scalar_jacobi = 0.0;  // |det A|^(1/(q-1))
};

struct FocalScanResult {
  std::optional<double> first_zero_param;
  std::vector<FocalSample> samples;  // s > 0 only
  bool domain_end = false;
  double end_param = 0.0;
  Mat final_a;
};

struct FocalConfig {
  double tol = 1e-11;
  double initial_step = 1e-3;
  double max_step = 2e-2;
};

/// Matrix Jacobi equation along the projected quotient geodesic with
/// A(0) = 0, A'(0) = I in a parallel orthonormal frame of γ'^⊥.
FocalScanResult focal_scan(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                           int chart, const Vec& leaf_point, const Vec& direction, double max_param,
                           const DerivEngine& engine = {}, const FocalConfig& cfg = {});

enum class DiameterMethod { Shooting, Graph };

struct DiameterEstimate {
  DiameterMethod method = DiameterMethod::Shooting;
  double value = 0.0;
  CurveSamples witness;
  std::vector<std::size_t> witness_nodes;  // graph method
  std::map<std::string, std::string> parameters;
  bool open_domain = true;
  bool infinite = false;  // graph has a cycle
};

struct ShootConfig {
  std::vector<double> boosts{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
  int spatial_directions = 2;  // per start point (±e1 when q = 2)
  int refine_iterations = 40;
  double max_param = 50.0;
  IntegratorConfig integrator{5e-3, 1e-12, ExitMode::Truncate, 0.05, 5'000'000};
  std::uint64_t seed = 0;
};

struct LeafStart {
  int chart = 0;
  Vec point;
};

DiameterEstimate shoot_diameter(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                                const TimeOrientation& orient, const std::vector<LeafStart>& starts,
                                const ShootConfig& cfg = {}, const DerivEngine& engine = {});

}  // namespace leafcausal
