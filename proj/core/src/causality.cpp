#include "leafcausal/causality.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "leafcausal/parallel.hpp"

namespace leafcausal {

struct GraphContext {
  FoliatedAtlas fol;
  TransverseMetricField gt;
  TimeOrientation orient;
  std::optional<ChartAtlas> g;
  GraphDomain domain;
  std::vector<double> step;
  std::vector<int> dims;
  std::vector<long> strides;
  std::vector<long> dense;  // multi-index -> node id or -1
  std::vector<std::size_t> label_of;
  std::vector<std::vector<std::size_t>> label_members;
  std::map<LeafLabel, std::size_t> label_ids;
};

namespace {

constexpr double kConeSlack = 1e-12;

bool passes(double cone, double margin) { return cone <= -margin + kConeSlack; }

double effective_margin(const CausalGraph& g, double margin) { return margin < 0.0 ? g.margin : margin; }

// Cone test and chord weight for the straight segment xa -> xa + d.
std::optional<GraphEdge> test_chord(const GraphContext& c, ConeSource source, const Vec& xa, const Vec& d,
                                    double margin) {
  const FoliatedAtlas& fol = c.fol;
  const int chart = c.domain.chart;
  const int q = fol.q;
  Vec dt = d.tail(q);
  double st = dt.cwiseAbs().maxCoeff();
  if (st == 0.0) return std::nullopt;
  Vec m = xa + 0.5 * d;
  if (!fol.base.contains(chart, m)) return std::nullopt;
  if (c.domain.blocked && c.domain.blocked(xa, Vec(xa + d))) return std::nullopt;

  double cone = 0.0;
  if (source == ConeSource::Transverse) {
    Mat H = transverse_matrix(fol, c.gt, chart, m);
    Vec u = dt / st;
    cone = u.dot(H * u);
    if (!passes(cone, margin)) return std::nullopt;
    Vec X = c.orient.field[chart](fol.base.reduce(chart, m)).tail(q);
    if (!(u.dot(H * X) < 0.0)) return std::nullopt;
  } else {
    Mat G = eval_metric(*c.g, chart, m);
    double s = d.cwiseAbs().maxCoeff();
    Vec u = d / s;
    cone = u.dot(G * u);
    if (!passes(cone, margin)) return std::nullopt;
    Vec X = c.orient.field[chart](fol.base.reduce(chart, m));
    if (!(u.dot(G * X) < 0.0)) return std::nullopt;
  }

  // Simpson, 8 intervals on [0, 1]
  double w = 0.0;
  for (int k = 0; k <= 8; ++k) {
    Vec x = xa + (k / 8.0) * d;
    if (!fol.base.contains(chart, x)) return std::nullopt;
    Mat H = transverse_matrix(fol, c.gt, chart, x);
    double f = std::sqrt(std::abs(dt.dot(H * dt)));
    w += (k == 0 || k == 8 ? 1.0 : (k % 2 ? 4.0 : 2.0)) * f;
  }
  GraphEdge e;
  e.weight = w / 24.0;
  e.cone = cone;
  if (!std::isfinite(e.weight)) return std::nullopt;
  return e;
}

// Node reached from multi-index `idx` by `off`, or -1.
long shifted(const GraphContext& c, const std::vector<int>& idx, const std::vector<int>& off) {
  long k = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    int v = idx[a] + off[a];
    if (c.domain.axes[a].periodic) {
      v %= c.dims[a];
      if (v < 0) v += c.dims[a];
    } else if (v < 0 || v >= c.dims[a]) {
      return -1;
    }
    k += v * c.strides[a];
  }
  return c.dense[k];
}

template <class Visit>
void for_edges(const CausalGraph& g, std::size_t i, Direction dir, Visit&& visit) {
  if (dir == Direction::Future) {
    for (std::size_t k = g.out_begin[i]; k < g.out_begin[i + 1]; ++k) visit(g.out[k]);
  } else {
    for (std::size_t k = g.in_begin[i]; k < g.in_begin[i + 1]; ++k) visit(g.in[k]);
  }
}

// Plain BFS mask; strict excludes the seeds unless re-reached.
std::vector<char> bfs_mask(const CausalGraph& g, const std::vector<std::size_t>& seeds, Direction dir,
                           double margin, bool strict) {
  std::vector<char> seen(g.node_count(), 0);
  std::deque<std::size_t> queue;
  auto push = [&](std::size_t v) {
    if (!seen[v]) {
      seen[v] = 1;
      queue.push_back(v);
    }
  };
  if (strict) {
    for (auto s : seeds)
      for_edges(g, s, dir, [&](const GraphEdge& e) {
        if (passes(e.cone, margin)) push(e.to);
      });
  } else {
    for (auto s : seeds) push(s);
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for_edges(g, v, dir, [&](const GraphEdge& e) {
      if (passes(e.cone, margin)) push(e.to);
    });
  }
  return seen;
}

std::vector<std::size_t> mask_to_list(const std::vector<char>& m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) out.push_back(i);
  return out;
}

// BFS returning parents, used for witness paths.
std::vector<long> bfs_parents(const CausalGraph& g, std::size_t start, double margin) {
  std::vector<long> parent(g.node_count(), -2);
  std::deque<std::size_t> queue;
  for (std::size_t k = g.out_begin[start]; k < g.out_begin[start + 1]; ++k) {
    const auto& e = g.out[k];
    if (passes(e.cone, margin) && parent[e.to] == -2) {
      parent[e.to] = static_cast<long>(start);
      queue.push_back(e.to);
    }
  }
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t k = g.out_begin[v]; k < g.out_begin[v + 1]; ++k) {
      const auto& e = g.out[k];
      if (passes(e.cone, margin) && parent[e.to] == -2) {
        parent[e.to] = static_cast<long>(v);
        queue.push_back(e.to);
      }
    }
  }
  return parent;
}

std::vector<std::size_t> unwind(const std::vector<long>& parent, std::size_t start, std::size_t end) {
  std::vector<std::size_t> path{end};
  std::size_t v = end;
  // the start may itself have been re-reached; stop at the first return to it
  while (true) {
    long p = parent[v];
    path.push_back(static_cast<std::size_t>(p));
    if (static_cast<std::size_t>(p) == start) break;
    v = static_cast<std::size_t>(p);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

// --- CausalGraph ---------------------------------------------------------------

std::optional<std::size_t> CausalGraph::find_node(const Vec& param, double tol) const {
  const auto& c = *ctx;
  if (param.size() != static_cast<Eigen::Index>(c.domain.axes.size())) return std::nullopt;
  long k = 0;
  for (std::size_t a = 0; a < c.domain.axes.size(); ++a) {
    const auto& ax = c.domain.axes[a];
    double rel = (param[a] - ax.lo) / c.step[a];
    long i = std::lround(rel);
    if (std::abs(rel - i) * c.step[a] > tol) return std::nullopt;
    if (ax.periodic) {
      i %= c.dims[a];
      if (i < 0) i += c.dims[a];
    } else if (i < 0 || i >= c.dims[a]) {
      return std::nullopt;
    }
    k += i * c.strides[a];
  }
  long id = c.dense[k];
  if (id < 0) return std::nullopt;
  return static_cast<std::size_t>(id);
}

const GraphEdge* CausalGraph::edge(std::size_t from, std::size_t to) const {
  for (std::size_t k = out_begin[from]; k < out_begin[from + 1]; ++k)
    if (out[k].to == to) return &out[k];
  return nullptr;
}

Vec CausalGraph::chord(std::size_t i, std::size_t j) const {
  const auto& c = *ctx;
  Vec dp = nodes[j].param - nodes[i].param;
  for (std::size_t a = 0; a < c.domain.axes.size(); ++a) {
    const auto& ax = c.domain.axes[a];
    if (ax.periodic) dp[a] -= std::round(dp[a] / ax.period()) * ax.period();
  }
  return c.domain.to_chart * dp;
}

std::vector<std::size_t> CausalGraph::neighbours(std::size_t i) const {
  const auto& c = *ctx;
  const std::size_t d = c.domain.axes.size();
  std::vector<std::size_t> out;
  std::vector<int> off(d, -1);
  for (;;) {
    long id = shifted(c, nodes[i].index, off);
    if (id >= 0 && std::find(out.begin(), out.end(), static_cast<std::size_t>(id)) == out.end())
      out.push_back(static_cast<std::size_t>(id));
    std::size_t a = 0;
    while (a < d && ++off[a] > 1) off[a++] = -1;
    if (a == d) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> CausalGraph::leaf_nodes(const LeafLabel& label) const {
  auto it = ctx->label_ids.find(label);
  if (it == ctx->label_ids.end()) return {};
  return ctx->label_members[it->second];
}

// --- build ---------------------------------------------------------------------

CausalGraph build_graph(const FoliatedAtlas& fol, const TransverseMetricField& gt, const TimeOrientation& orient,
                        const GraphDomain& domain, double resolution, double margin, ConeSource source,
                        const ChartAtlas* g) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::ResolutionTooCoarse, "resolution must be positive");
  if (!(margin >= 0.0)) throw Error(ErrorCode::InvalidAtlas, "cone margin must be non-negative");
  if (source == ConeSource::Full && !g) throw Error(ErrorCode::InvalidAtlas, "full cone test needs a metric atlas");
  const std::size_t d = domain.axes.size();
  if (d == 0 || domain.to_chart.rows() != fol.dim() || domain.to_chart.cols() != static_cast<Eigen::Index>(d) ||
      domain.offset.size() != fol.dim())
    throw Error(ErrorCode::InvalidAtlas, "graph domain does not match the atlas");
  if (static_cast<int>(orient.field.size()) != fol.base.chart_count())
    throw Error(ErrorCode::InvalidAtlas, "time orientation needs one field per chart");

  auto ctx = std::make_shared<GraphContext>();
  ctx->fol = fol;
  ctx->gt = gt;
  ctx->orient = orient;
  if (g) ctx->g = *g;
  ctx->domain = domain;
  ctx->step.resize(d);
  ctx->dims.resize(d);
  ctx->strides.resize(d);
  long total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    const auto& ax = domain.axes[a];
    double step = ax.step > 0.0 ? ax.step : 1.0 / resolution;
    int count;
    if (ax.periodic) {
      double n = ax.period() / step;
      count = static_cast<int>(std::lround(n));
      if (std::abs(n - count) > 1e-9) throw Error(ErrorCode::ResolutionTooCoarse, "period not a multiple of the step on " + ax.name);
    } else {
      count = static_cast<int>(std::floor((ax.hi - ax.lo) / step + 1e-9)) + 1;
    }
    if (ax.step <= 0.0 && count < 2)
      throw Error(ErrorCode::ResolutionTooCoarse, "fewer than two nodes on axis " + ax.name);
    ctx->step[a] = step;
    ctx->dims[a] = count;
    ctx->strides[a] = total;
    total *= count;
  }
  ctx->dense.assign(total, -1);

  CausalGraph graph;
  graph.resolution = resolution;
  graph.margin = margin;
  graph.source = source;

  const int chart = domain.chart;
  std::vector<int> idx(d, 0);
  for (long k = 0; k < total; ++k) {
    long rem = k;
    for (std::size_t a = 0; a < d; ++a) {
      idx[a] = static_cast<int>(rem % ctx->dims[a]);
      rem /= ctx->dims[a];
    }
    Vec p(d);
    for (std::size_t a = 0; a < d; ++a) p[a] = domain.axes[a].lo + idx[a] * ctx->step[a];
    Vec x = domain.to_chart * p + domain.offset;
    if (!fol.base.contains(chart, x)) continue;
    GraphNode n;
    n.param = p;
    n.point = x;
    n.label = fol.label(chart, x);
    n.index = idx;
    ctx->dense[k] = static_cast<long>(graph.nodes.size());
    auto [it, fresh] = ctx->label_ids.emplace(n.label, ctx->label_members.size());
    if (fresh) ctx->label_members.emplace_back();
    ctx->label_members[it->second].push_back(graph.nodes.size());
    ctx->label_of.push_back(it->second);
    graph.nodes.push_back(std::move(n));
  }
  if (graph.nodes.empty()) throw Error(ErrorCode::ResolutionTooCoarse, "no grid node lies in the chart");

  // stencil offsets
  std::vector<std::vector<int>> offsets;
  {
    std::vector<int> lo(d), hi(d);
    for (std::size_t a = 0; a < d; ++a) {
      int kmax = static_cast<int>(std::floor(domain.axes[a].radius / ctx->step[a] + 1e-9));
      lo[a] = -kmax;
      hi[a] = kmax;
      if (domain.axes[a].periodic) {
        lo[a] = std::max(lo[a], -(ctx->dims[a] - 1) / 2);
        hi[a] = std::min(hi[a], ctx->dims[a] / 2);
      }
    }
    std::vector<int> off = lo;
    for (;;) {
      if (std::any_of(off.begin(), off.end(), [](int v) { return v != 0; })) offsets.push_back(off);
      std::size_t a = 0;
      while (a < d && ++off[a] > hi[a]) off[a] = lo[a], ++a;
      if (a == d) break;
    }
  }
  std::vector<Vec> chords;
  for (const auto& off : offsets) {
    Vec dp(d);
    for (std::size_t a = 0; a < d; ++a) dp[a] = off[a] * ctx->step[a];
    chords.push_back(domain.to_chart * dp);
  }

  const std::size_t N = graph.nodes.size();
  std::vector<std::vector<GraphEdge>> per(N);
  parallel_for(N, [&](std::size_t i) {
    const auto& n = graph.nodes[i];
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      long j = shifted(*ctx, n.index, offsets[o]);
      if (j < 0) continue;
      auto e = test_chord(*ctx, source, n.point, chords[o], margin);
      if (!e) continue;
      e->to = static_cast<std::size_t>(j);
      per[i].push_back(*e);
    }
    std::sort(per[i].begin(), per[i].end(), [](const GraphEdge& a, const GraphEdge& b) { return a.to < b.to; });
  });

  graph.out_begin.assign(N + 1, 0);
  for (std::size_t i = 0; i < N; ++i) graph.out_begin[i + 1] = graph.out_begin[i] + per[i].size();
  graph.out.reserve(graph.out_begin[N]);
  for (auto& v : per) graph.out.insert(graph.out.end(), v.begin(), v.end());
  if (graph.out.empty()) throw Error(ErrorCode::ResolutionTooCoarse, "graph has no edges");

  graph.in_begin.assign(N + 1, 0);
  for (const auto& e : graph.out) ++graph.in_begin[e.to + 1];
  for (std::size_t i = 0; i < N; ++i) graph.in_begin[i + 1] += graph.in_begin[i];
  graph.in.resize(graph.out.size());
  std::vector<std::size_t> fill(graph.in_begin.begin(), graph.in_begin.end() - 1);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = graph.out_begin[i]; k < graph.out_begin[i + 1]; ++k) {
      GraphEdge r = graph.out[k];
      std::size_t to = r.to;
      r.to = i;
      graph.in[fill[to]++] = r;
    }
  graph.ctx = std::move(ctx);
  return graph;
}

bool revalidate_edge(const CausalGraph& graph, std::size_t i, std::size_t j, double margin) {
  auto e = test_chord(*graph.ctx, graph.source, graph.nodes[i].point, graph.chord(i, j), margin);
  return e.has_value();
}

// --- reach -----------------------------------------------------------------------

bool ReachSet::contains(std::size_t i) const { return std::binary_search(nodes.begin(), nodes.end(), i); }

ReachSet reach(const CausalGraph& graph, const std::vector<std::size_t>& seeds, Direction dir, bool saturate,
               double margin, bool strict) {
  const double m = effective_margin(graph, margin);
  std::vector<char> seen = bfs_mask(graph, seeds, dir, m, strict);
  if (saturate) {
    const auto& c = *graph.ctx;
    for (;;) {
      std::vector<std::size_t> added;
      std::vector<char> label_done(c.label_members.size(), 0);
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i] || label_done[c.label_of[i]]) continue;
        label_done[c.label_of[i]] = 1;
        for (auto v : c.label_members[c.label_of[i]])
          if (!seen[v]) added.push_back(v);
      }
      if (added.empty()) break;
      for (auto v : added) seen[v] = 1;
      std::vector<char> more = bfs_mask(graph, added, dir, m, false);
      for (std::size_t i = 0; i < seen.size(); ++i) seen[i] |= more[i];
    }
  }
  ReachSet out;
  out.nodes = mask_to_list(seen);
  out.saturated = saturate;
  return out;
}

ReachSet saturation(const CausalGraph& graph, const ReachSet& set) {
  const auto& c = *graph.ctx;
  std::vector<char> seen(graph.node_count(), 0);
  for (auto v : set.nodes)
    for (auto w : c.label_members[c.label_of[v]]) seen[w] = 1;
  ReachSet out;
  out.nodes = mask_to_list(seen);
  out.saturated = true;
  return out;
}

// --- cycles ------------------------------------------------------------------------

std::optional<std::vector<std::size_t>> find_closed_transverse_timelike(const CausalGraph& graph, double margin) {
  const double m = effective_margin(graph, margin);
  const std::size_t N = graph.node_count();
  // iterative Tarjan
  std::vector<long> index(N, -1), low(N, 0), comp(N, -1);
  std::vector<char> on_stack(N, 0);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> comp_size;
  long counter = 0;
  struct Frame {
    std::size_t v;
    std::size_t k;
  };
  for (std::size_t root = 0; root < N; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, graph.out_begin[root]}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.k < graph.out_begin[f.v + 1]) {
        const GraphEdge& e = graph.out[f.k++];
        if (!passes(e.cone, m)) continue;
        std::size_t w = e.to;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, graph.out_begin[w]});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        std::size_t id = comp_size.size(), size = 0;
        for (;;) {
          std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = static_cast<long>(id);
          ++size;
          if (w == v) break;
        }
        comp_size.push_back(size);
      }
    }
  }
  for (std::size_t v = 0; v < N; ++v) {
    if (comp_size[comp[v]] < 2) continue;
    std::vector<long> parent = bfs_parents(graph, v, m);
    if (parent[v] == -2) continue;
    auto cyc = unwind(parent, v, v);
    cyc.pop_back();
    return cyc;
  }
  return std::nullopt;
}

std::optional<std::vector<std::size_t>> find_leaf_return(const CausalGraph& graph, std::size_t start,
                                                         double margin) {
  const double m = effective_margin(graph, margin);
  const auto& c = *graph.ctx;
  std::vector<long> parent = bfs_parents(graph, start, m);
  const std::size_t lab = c.label_of[start];
  for (auto v : c.label_members[lab])
    if (parent[v] != -2) return unwind(parent, start, v);
  return std::nullopt;
}

// --- probes ------------------------------------------------------------------------

PushupResult pushup_probe(const CausalGraph& graph, std::size_t samples, std::uint64_t seed, double strict_margin) {
  PushupResult res;
  const std::size_t N = graph.node_count();
  const double m0 = graph.margin;
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t a = pick(rng);
    // states (node, passed-a-strict-edge)
    std::vector<char> seen(2 * N, 0);
    std::deque<std::size_t> queue{2 * a};
    seen[2 * a] = 1;
    while (!queue.empty()) {
      std::size_t st = queue.front();
      queue.pop_front();
      std::size_t v = st / 2, flag = st % 2;
      for (std::size_t k = graph.out_begin[v]; k < graph.out_begin[v + 1]; ++k) {
        const auto& e = graph.out[k];
        if (!passes(e.cone, m0)) continue;
        std::size_t nf = flag | (passes(e.cone, strict_margin) ? 1u : 0u);
        std::size_t ns = 2 * e.to + nf;
        if (!seen[ns]) {
          seen[ns] = 1;
          queue.push_back(ns);
        }
      }
    }
    std::vector<std::size_t> chrono;
    for (std::size_t v = 0; v < N; ++v)
      if (seen[2 * v + 1]) chrono.push_back(v);
    if (chrono.empty()) {
      ++res.skipped;
      continue;
    }
    std::size_t b = chrono[std::uniform_int_distribution<std::size_t>(0, chrono.size() - 1)(rng)];
    std::vector<std::size_t> causal = mask_to_list(bfs_mask(graph, {b}, Direction::Future, m0, false));
    std::size_t c = causal[std::uniform_int_distribution<std::size_t>(0, causal.size() - 1)(rng)];
    ++res.triples;
    if (!seen[2 * c + 1]) ++res.violations;
  }
  return res;
}

OpennessResult openness_probe(const CausalGraph& graph, double delta, std::size_t samples, std::uint64_t seed,
                              int min_separation) {
  OpennessResult res;
  if (graph.margin > delta + kConeSlack)
    throw Error(ErrorCode::InvalidAtlas, "openness probe needs a graph built with margin at most delta");
  const auto& c = *graph.ctx;
  const std::size_t N = graph.node_count();
  Rng rng(seed);
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto separation = [&](std::size_t i, std::size_t j) {
    int s = 0;
    for (std::size_t a = 0; a < c.domain.axes.size(); ++a) {
      if (c.domain.axes[a].step > 0.0) continue;
      int dv = std::abs(graph.nodes[i].index[a] - graph.nodes[j].index[a]);
      if (c.domain.axes[a].periodic) dv = std::min(dv, c.dims[a] - dv);
      s = std::max(s, dv);
    }
    return s;
  };
  const std::size_t per_a = 32;
  for (std::size_t oi = 0; oi < N && res.pairs < samples; ++oi) {
    std::size_t a = order[oi];
    std::vector<char> far = bfs_mask(graph, {a}, Direction::Future, 2 * delta, true);
    std::vector<std::size_t> cand;
    for (std::size_t v = 0; v < N; ++v)
      if (far[v] && separation(a, v) >= min_separation) cand.push_back(v);
    if (cand.empty()) continue;
    std::shuffle(cand.begin(), cand.end(), rng);
    if (cand.size() > per_a) cand.resize(per_a);
    std::sort(cand.begin(), cand.end());
    std::vector<std::vector<char>> near;
    for (auto an : graph.neighbours(a)) near.push_back(bfs_mask(graph, {an}, Direction::Future, delta, true));
    for (auto b : cand) {
      if (res.pairs >= samples) break;
      ++res.pairs;
      bool ok = true;
      auto nb = graph.neighbours(b);
      for (const auto& mask : near)
        for (auto bn : nb)
          if (!mask[bn]) ok = false;
      if (!ok) ++res.violations;
    }
  }
  return res;
}

// --- longest path ------------------------------------------------------------------

CurveSamples path_curve(const CausalGraph& graph, const std::vector<std::size_t>& path) {
  CurveSamples out;
  if (path.size() < 2) return out;
  const int chart = graph.ctx->domain.chart;
  for (std::size_t e = 0; e + 1 < path.size(); ++e) {
    const Vec& xa = graph.nodes[path[e]].point;
    Vec d = graph.chord(path[e], path[e + 1]);
    for (int k = (e == 0 ? 0 : 1); k <= 8; ++k) {
      CurveSample s;
      s.chart = chart;
      s.point = xa + (k / 8.0) * d;
      s.velocity = d;
      out.params.push_back(static_cast<double>(e) + k / 8.0);
      out.samples.push_back(std::move(s));
    }
    if (e + 2 < path.size()) {
      // the joint takes the next chord's velocity; the incoming one is kept on the left
      std::size_t b = out.samples.size() - 1;
      out.samples[b].velocity_left = d;
      out.samples[b].velocity = graph.chord(path[e + 1], path[e + 2]);
      out.breakpoints.push_back(b);
    }
  }
  return out;
}

DiameterEstimate longest_path_diameter(const CausalGraph& graph, double margin) {
  const double m = effective_margin(graph, margin);
  const std::size_t N = graph.node_count();
  std::vector<std::size_t> indeg(N, 0);
  for (const auto& e : graph.out)
    if (passes(e.cone, m)) ++indeg[e.to];
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < N; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  std::vector<double> dist(N, 0.0);
  std::vector<long> parent(N, -1);
  std::size_t processed = 0;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    ++processed;
    for (std::size_t k = graph.out_begin[v]; k < graph.out_begin[v + 1]; ++k) {
      const auto& e = graph.out[k];
      if (!passes(e.cone, m)) continue;
      if (dist[v] + e.weight > dist[e.to]) {
        dist[e.to] = dist[v] + e.weight;
        parent[e.to] = static_cast<long>(v);
      }
      if (--indeg[e.to] == 0) queue.push_back(e.to);
    }
  }
  if (processed < N) throw Error(ErrorCode::GraphHasCycle, "graph has a closed transversely timelike cycle");
  std::size_t best = 0;
  for (std::size_t v = 1; v < N; ++v)
    if (dist[v] > dist[best]) best = v;
  std::vector<std::size_t> path{best};
  while (parent[path.back()] >= 0) path.push_back(static_cast<std::size_t>(parent[path.back()]));
  std::reverse(path.begin(), path.end());

  DiameterEstimate est;
  est.method = DiameterMethod::Graph;
  est.value = dist[best];
  est.witness_nodes = path;
  est.witness = path_curve(graph, path);
  est.open_domain = true;
  std::ostringstream r, mg;
  r.precision(12);
  mg.precision(12);
  r << graph.resolution;
  mg << m;
  est.parameters["resolution"] = r.str();
  est.parameters["margin"] = mg.str();
  est.parameters["nodes"] = std::to_string(N);
  est.parameters["edges"] = std::to_string(graph.edge_count());
  return est;
}

// --- ladder ------------------------------------------------------------------------

LadderProbeReport ladder_probe(const CausalGraph& graph, const std::string& example, const LadderConfig& cfg) {
  LadderProbeReport rep;
  rep.example = example;
  rep.closed_cycle = find_closed_transverse_timelike(graph, cfg.strict_margin);
  ++rep.probes;
  if (rep.closed_cycle) {
    const auto& cyc = *rep.closed_cycle;
    for (std::size_t i = 0; i < cyc.size(); ++i)
      if (!revalidate_edge(graph, cyc[i], cyc[(i + 1) % cyc.size()], cfg.strict_margin)) rep.cycle_replays = false;
  }

  const auto& c = *graph.ctx;
  std::vector<std::size_t> labels(c.label_members.size());
  std::iota(labels.begin(), labels.end(), 0);
  Rng rng(cfg.seed);
  std::shuffle(labels.begin(), labels.end(), rng);
  if (labels.size() > cfg.leaf_samples) labels.resize(cfg.leaf_samples);
  std::sort(labels.begin(), labels.end());
  for (auto l : labels) {
    const auto& members = c.label_members[l];
    LeafSelfReach sr;
    sr.label = graph.nodes[members.front()].label;
    std::size_t take = std::min(cfg.nodes_per_leaf, members.size()), hits = 0;
    for (std::size_t k = 0; k < take; ++k) {
      std::size_t v = members[k * members.size() / take];
      if (find_leaf_return(graph, v, cfg.strict_margin)) ++hits;
      ++rep.probes;
    }
    sr.nodes = take;
    sr.fraction = take ? static_cast<double>(hits) / take : 0.0;
    rep.self_reach.push_back(std::move(sr));
  }

  rep.pushup = pushup_probe(graph, cfg.pushup_samples, cfg.seed, cfg.strict_margin);
  rep.probes += rep.pushup.triples + rep.pushup.skipped;
  if (cfg.openness_samples > 0 && graph.margin <= cfg.openness_delta) {
    rep.openness = openness_probe(graph, cfg.openness_delta, cfg.openness_samples, cfg.seed + 1,
                                  cfg.openness_separation);
    rep.probes += rep.openness.pairs;
  }
  return rep;
}

void export_graph(const CausalGraph& graph, std::ostream& os) {
  os.precision(12);
  os << "# leafcausal-graph v1\n";
  os << "# nodes " << graph.node_count() << " edges " << graph.edge_count() << " resolution " << graph.resolution
     << " margin " << graph.margin << "\n";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& n = graph.nodes[i];
    os << "# node " << i;
    for (Eigen::Index k = 0; k < n.point.size(); ++k) os << ' ' << n.point[k];
    os << " label";
    for (auto v : n.label) os << ' ' << v;
    os << "\n";
  }
  for (std::size_t i = 0; i < graph.node_count(); ++i)
    for (std::size_t k = graph.out_begin[i]; k < graph.out_begin[i + 1]; ++k)
      os << i << ' ' << graph.out[k].to << ' ' << graph.out[k].weight << "\n";
}

}  // namespace leafcausal
