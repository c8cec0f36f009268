#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leafcausal/causality.hpp"
#include "leafcausal/curvature.hpp"
#include "leafcausal/dynamics.hpp"
#include "leafcausal/foliation.hpp"

namespace leafcausal {

/// Where an expected value comes from: quoted from the published example,
/// derived analytically for this code base, or true by definition.
enum class ClaimSource { Unset, Published, Analytic, Definitional };
std::string_view to_string(ClaimSource s);

enum class Comparison { AtLeast, AtMost, Within, Equals };

/// An expected numeric outcome of a task. Booleans are 0/1.
struct ExpectedClaim {
  std::string id;
  std::string task;  // scenario task that produces `key`
  std::string key;
  Comparison cmp = Comparison::Equals;
  double lo = 0.0;
  double hi = 0.0;
  ClaimSource source = ClaimSource::Unset;
  std::string note;

  bool check(double value) const;
};

struct FocalDefaults {
  int chart = 0;
  Vec leaf_point;
  Vec direction;
  double max_param = 1.0;
  /// k in the scalar Jacobi model J'' + k J = 0 of a constant-curvature quotient.
  std::optional<double> jacobi_curvature;
};

enum class ReachMode {
  TransverseSaturated,  // saturated future in the transverse-cone graph
  GFutureSaturation,    // saturation of the future in the full-metric graph
};

/// Counts how many of `params` (graph parameters of nodes) the future of the
/// seed leaf contains.
struct ReachProbe {
  std::string key;
  ReachMode mode = ReachMode::TransverseSaturated;
  std::vector<Vec> params;
};

struct ExampleSpec {
  std::string id;
  std::string description;
  std::map<std::string, double> params;

  FoliatedAtlas fol;
  std::optional<TransverseMetricField> gt;
  std::optional<ChartAtlas> g;  // bundle-like metric
  std::optional<TimeOrientation> orient;
  std::vector<ExpectedClaim> expected;

  /// Chart coordinate used as time when gridding scans.
  int time_axis = -1;
  std::optional<GraphDomain> graph;
  double graph_resolution = 20.0;
  std::vector<double> graph_resolutions;  // diameter-graph sweep; empty: graph_resolution only
  /// Closed-form O'Neill data at a full chart point (warped products only).
  std::function<WarpedPointData(const Vec&)> warped;
  /// Ric_B = k g_B on the leaf space, when the base is Einstein.
  std::optional<double> base_einstein;
  /// Time window searched for Ric_g(E,E) < 0.
  std::optional<Interval> negative_ricci_window;
  std::optional<double> ricci_bound;  // C with Ric⊤ ≥ C on unit timelike vectors
  std::optional<FocalDefaults> focal;
  std::vector<LeafStart> shoot_starts;
  std::optional<SuspensionSpec> suspension;
  std::optional<SuspensionSpec> reversed_suspension;
  /// Seed leaves for reach scenarios (graph parameters of a representative node).
  std::vector<Vec> seed_params;
  std::vector<ReachProbe> reach_probes;
};

/// Registered ids in a fixed order.
std::vector<std::string> list_examples();

/// Builds (once per parameter set) and audits an example. Throws UnknownExample.
const ExampleSpec& get_example(const std::string& id, const std::map<std::string, double>& overrides = {});

}  // namespace leafcausal
