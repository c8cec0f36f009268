#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "leafcausal/dynamics.hpp"
#include "leafcausal/foliation.hpp"

namespace leafcausal {

/// One parameter axis of a graph grid. Nodes sit at lo + k*step, so grids at
/// resolutions r and 2r nest.
struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;  // period hi - lo
  double step = 0.0;      // 0: 1/resolution
  double radius = 0.0;    // absolute stencil half-width along this axis

  double period() const { return hi - lo; }
};

/// Where graph nodes live: an affine grid in parameter space mapped into one
/// chart (chart point = to_chart * param + offset).
struct GraphDomain {
  int chart = 0;
  std::vector<GridAxis> axes;
  Mat to_chart;
  Vec offset;
  /// True when the closed chart segment [a, b] meets a removed set.
  std::function<bool(const Vec& a, const Vec& b)> blocked;
};

/// Which form decides the edge cone: the transverse metric or the full g.
enum class ConeSource { Transverse, Full };

struct GraphNode {
  Vec param;
  Vec point;
  LeafLabel label;
  std::vector<int> index;  // grid multi-index
};

struct GraphEdge {
  std::size_t to = 0;
  double weight = 0.0;  // transverse length of the chord
  double cone = 0.0;    // normalized quadratic form at the midpoint (≤ -margin)
};

struct GraphContext;

struct CausalGraph {
  std::vector<GraphNode> nodes;
  std::vector<std::size_t> out_begin;  // CSR, size nodes + 1
  std::vector<GraphEdge> out;
  std::vector<std::size_t> in_begin;
  std::vector<GraphEdge> in;  // `to` holds the source node
  double resolution = 0.0;
  double margin = 0.0;
  ConeSource source = ConeSource::Transverse;
  std::shared_ptr<const GraphContext> ctx;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return out.size(); }
  std::optional<std::size_t> find_node(const Vec& param, double tol = 1e-9) const;
  const GraphEdge* edge(std::size_t from, std::size_t to) const;
  /// Chart displacement of the chord from node i to node j (minimal image).
  Vec chord(std::size_t i, std::size_t j) const;
  /// Nodes whose multi-index differs from i by at most one cell per axis (i included).
  std::vector<std::size_t> neighbours(std::size_t i) const;
  /// Nodes carrying the given leaf label.
  std::vector<std::size_t> leaf_nodes(const LeafLabel& label) const;
};

/// Grid nodes over the domain (excluded points dropped), edges within the
/// stencil whose chord passes the midpoint cone test with `margin`.
/// `g` is required for ConeSource::Full. Throws ResolutionTooCoarse.
CausalGraph build_graph(const FoliatedAtlas& fol, const TransverseMetricField& gt, const TimeOrientation& orient,
                        const GraphDomain& domain, double resolution, double margin,
                        ConeSource source = ConeSource::Transverse, const ChartAtlas* g = nullptr);

/// Recomputes the cone test of chord i -> j; true when it is a future edge with `margin`.
bool revalidate_edge(const CausalGraph& graph, std::size_t i, std::size_t j, double margin);

enum class Direction { Future, Past };

struct ReachSet {
  std::vector<std::size_t> nodes;  // sorted
  bool saturated = false;

  bool contains(std::size_t i) const;
};

/// Breadth-first closure along edges with cone ≤ -margin (margin < 0: the
/// graph's own). Seeds are included unless `strict`, in which case only
/// nodes at the end of a path with at least one edge are returned. With
/// `saturate`, edge closure and leaf-label closure alternate to a fixpoint.
ReachSet reach(const CausalGraph& graph, const std::vector<std::size_t>& seeds, Direction dir, bool saturate,
               double margin = -1.0, bool strict = false);

/// One leaf-label closure of a node set (no further edges).
ReachSet saturation(const CausalGraph& graph, const ReachSet& set);

/// A directed cycle through edges with cone ≤ -margin: nodes n0..nk with
/// edges n_i -> n_{i+1} and nk -> n0. None when the graph is acyclic.
std::optional<std::vector<std::size_t>> find_closed_transverse_timelike(const CausalGraph& graph,
                                                                        double margin = -1.0);

/// Path (at least one edge) from `start` to a node of the same leaf, if any;
/// the end node may be `start` itself when it lies on a cycle.
std::optional<std::vector<std::size_t>> find_leaf_return(const CausalGraph& graph, std::size_t start,
                                                         double margin = -1.0);

struct PushupResult {
  std::size_t triples = 0;
  std::size_t violations = 0;
  std::size_t skipped = 0;  // empty chronological futures
};

/// a ≪ b ≤ c ⇒ a ≪ c at graph scale. ≤ is reach through edges of the
/// (margin-0) graph; ≪ is reach through such edges with at least one edge of
/// cone ≤ -strict_margin.
PushupResult pushup_probe(const CausalGraph& graph, std::size_t samples, std::uint64_t seed,
                          double strict_margin = 0.05);

struct OpennessResult {
  std::size_t pairs = 0;
  std::size_t violations = 0;
};

/// Pairs (a, b) related through edges with cone ≤ -2δ and separated by at
/// least `min_separation` cells must stay related with margin δ for every
/// one-cell neighbour a', b'. Needs a graph built with margin ≤ δ.
OpennessResult openness_probe(const CausalGraph& graph, double delta, std::size_t samples, std::uint64_t seed,
                              int min_separation = 24);

/// Longest weighted path in topological order. Throws GraphHasCycle.
DiameterEstimate longest_path_diameter(const CausalGraph& graph, double margin = -1.0);

/// Piecewise-linear chart curve through graph nodes, nine samples per edge.
CurveSamples path_curve(const CausalGraph& graph, const std::vector<std::size_t>& path);

struct LeafSelfReach {
  LeafLabel label;
  std::size_t nodes = 0;
  double fraction = 0.0;  // nodes of the leaf that reach the leaf again
};

struct LadderProbeReport {
  std::string example;
  std::size_t probes = 0;
  std::optional<std::vector<std::size_t>> closed_cycle;
  std::vector<LeafSelfReach> self_reach;
  PushupResult pushup;
  OpennessResult openness;
  bool cycle_replays = true;  // every cycle edge re-validates
};

struct LadderConfig {
  double strict_margin = 0.05;
  std::size_t leaf_samples = 8;
  std::size_t nodes_per_leaf = 6;
  std::size_t pushup_samples = 1000;
  std::size_t openness_samples = 1000;
  double openness_delta = 0.25;
  int openness_separation = 24;
  std::uint64_t seed = 0;
};

/// Runs the cycle, self-reach, push-up and openness probes on a margin-0 graph.
LadderProbeReport ladder_probe(const CausalGraph& graph, const std::string& example, const LadderConfig& cfg = {});

/// Edge list "i j weight" after a commented node table.
void export_graph(const CausalGraph& graph, std::ostream& os);

}  // namespace leafcausal
