#include "leafcausal/catalog.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace leafcausal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Interval open(double lo, double hi) { return {lo, hi, false}; }
Interval line() { return {-kInf, kInf, false}; }
Interval circle(double lo, double hi) { return {lo, hi, true}; }

MetricFn constant_metric(const Mat& G) {
  return MetricFn::from(static_cast<int>(G.rows()), [G](const auto& x) {
    using T = scalar_of_t<decltype(x)>;
    return MatX<T>(G.template cast<T>());
  });
}

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return v.asDiagonal();
}

std::function<Vec(const Vec&)> constant_field(Vec X) {
  return [X](const Vec&) { return X; };
}

Vec unit(int n, int i) { return Vec::Unit(n, i); }

ExpectedClaim claim(std::string id, std::string task, std::string key, Comparison cmp, double lo, double hi,
                    ClaimSource src, std::string note) {
  return {std::move(id), std::move(task), std::move(key), cmp, lo, hi, src, std::move(note)};
}

ExpectedClaim equals(std::string id, std::string task, std::string key, double v, ClaimSource src,
                     std::string note) {
  return claim(std::move(id), std::move(task), std::move(key), Comparison::Equals, v, v, src, std::move(note));
}

void add_property_claims(ExampleSpec& s) {
  const auto P = ClaimSource::Published;
  s.expected.push_back(equals("hierarchy", "classify-demo", "hierarchy_failures", 0, P,
                              "g-timelike implies transversely timelike, transversely spacelike implies g-spacelike"));
  s.expected.push_back(equals("wedge-convexity", "classify-demo", "wedge_failures", 0, P,
                              "timewedges are convex open cones"));
  s.expected.push_back(equals("length-comparison", "classify-demo", "length_failures", 0, P,
                              "Lorentzian length at most transverse length, equal on horizontal curves"));
}

// Map from graph parameters (t, x, y) to chart coordinates (y; t, x).
Mat txy_to_ytx() {
  Mat A = Mat::Zero(3, 3);
  A(0, 2) = 1.0;
  A(1, 0) = 1.0;
  A(2, 1) = 1.0;
  return A;
}

double param_or(const std::map<std::string, double>& p, const std::string& k) { return p.at(k); }

// --- Minkowski with vertical y-lines ---------------------------------------------

ExampleSpec build_mink3(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "mink3_vertical";
  s.description = "Minkowski R^3, g = -dt^2 + dx^2 + dy^2, foliated by the y-lines; chart (y; t, x)";
  Chart c{"mink3", {line(), line(), line()}, constant_metric(Mat::Identity(3, 3)), {}, {}, {}};
  c.sample_box = {open(-2, 2), open(-2, 2), open(-2, 2)};
  LeafSpaceMeta meta{"leaf space R^2 = {(t, x)}", true, false, true};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [](int, const Vec& x) { return quantized_label(Vec(x.tail(2))); }, meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-1, 1}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(Mat::Identity(3, 3))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;
  s.ricci_bound = 0.0;

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"t", -1.0, 1.0, false, 0.0, 0.35}, {"x", -0.5, 0.5, false, 0.0, 0.35}, {"y", -1.0, 1.0, false, 0.5, 0.5}};
  d.to_chart = txy_to_ytx();
  d.offset = Vec::Zero(3);
  s.graph = d;
  s.graph_resolution = 20;
  s.seed_params = {Vec::Zero(3)};

  s.focal = FocalDefaults{0, Vec::Zero(3), unit(3, 1), 1.0, 0.0};

  const auto A = ClaimSource::Analytic;
  add_property_claims(s);
  s.expected.push_back(equals("no-cycle", "ladder-probe", "cycle", 0, A, "t increases along every edge"));
  s.expected.push_back(equals("push-up", "ladder-probe", "pushup_violations", 0, A, "flat cone algebra"));
  s.expected.push_back(equals("openness", "ladder-probe", "openness_violations", 0, A, "flat cone algebra"));
  s.expected.push_back(claim("linear-jacobi", "focal-scan", "linear_error", Comparison::AtMost, 0, 1e-12, A,
                             "flat quotient: A(s) = s I"));
  return s;
}

// --- Kronecker torus ---------------------------------------------------------------

ExampleSpec build_kronecker(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "kronecker_T2";
  const double lam = std::sqrt(2.0) - 1.0;
  s.params["slope"] = lam;
  s.description = "flat torus R^2/Z^2 foliated by lines of irrational slope sqrt(2) - 1; chart (s; u)";
  Mat G(2, 2);
  G << 1 + lam * lam, lam, lam, 1;
  Mat B(2, 2);
  B << 1, 0, -lam, 1;
  Chart c{"kronecker", {circle(0, 1), circle(0, 1)}, constant_metric(G), Lattice{B, {0, 1}}, {}, {}};
  LeafSpaceMeta meta{"u ~ u - slope (mod 1); every leaf is dense", false, false, false};
  s.fol = make_foliated_atlas(
      ChartAtlas(2, {c}), 1,
      [](int, const Vec& x) {
        Vec u(1);
        u[0] = x[1] - std::floor(x[1]);
        return quantized_label(u);
      },
      meta, true);
  s.expected.push_back(claim("dense-leaf", "classify-demo", "dense_orbit_gap", Comparison::AtMost, 0, 0.01,
                             ClaimSource::Published, "each leaf is dense in the torus"));
  s.expected.push_back(equals("codimension", "classify-demo", "codimension", 1, ClaimSource::Definitional,
                              "line foliation of a surface"));
  return s;
}

// --- dense spacelike lines on the flat 3-torus ---------------------------------

ExampleSpec build_torus3(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "torus3_dense";
  s.description =
      "flat Lorentzian T^3 = R^3/Z^3 foliated by lines along (1, sqrt2, sqrt3); chart (s; u, w) adapted to "
      "X = (1, sqrt2, sqrt3), N1 = (sqrt2, 1, 0), N2 = (sqrt3, sqrt6, -1)";
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  Mat L(3, 3);  // columns X, N1, N2 in (t, x, y)
  L << 1, r2, r3, r2, 1, r6, r3, 0, -1;
  Mat Linv = L.inverse();
  Chart c{"torus3", {circle(0, 1), circle(0, 1), circle(0, 1)}, constant_metric(Mat::Identity(3, 3)),
          Lattice{Linv, {}}, {}, {}};
  c.sample_box = {open(-2, 2), open(-2, 2), open(-2, 2)};
  LeafSpaceMeta meta{"every leaf is dense; labels name plaques only", false, false, false};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [](int, const Vec& x) { return quantized_label(Vec(x.tail(2))); }, meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-1, 4}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(diag({4, 1, 1}))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"t", 0, 1, true, 0, 0.2}, {"x", 0, 1, true, 0, 0.2}, {"y", 0, 1, true, 0, 0.2}};
  d.to_chart = Linv;
  d.offset = Vec::Zero(3);
  s.graph = d;
  s.graph_resolution = 10;
  s.seed_params = {Vec::Zero(3)};

  const auto P = ClaimSource::Published;
  add_property_claims(s);
  s.expected.push_back(equals("not-chronological", "ladder-probe", "cycle", 1, P,
                              "compact, hence a closed timelike curve"));
  s.expected.push_back(equals("cycle-replays", "ladder-probe", "cycle_replays", 1, ClaimSource::Analytic,
                              "cycle edges re-validate"));
  s.expected.push_back(equals("infinite-diameter", "diameter-graph", "infinite", 1, P,
                              "not transversely chronological"));
  return s;
}

// --- helix foliation -------------------------------------------------------------

ExampleSpec build_helix(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "helix_foliation";
  s.description =
      "Minkowski R^3 / (t, x + 2, y) ~ (t, x, y) foliated by integral curves of d_t + 2 d_x; chart (s; u, y) "
      "with t = s + 2u, x = 2s + u";
  const double per = 2.0 / 3.0;
  Mat B(3, 1);
  B << -4.0 / 3.0, per, 0;
  Chart c{"helix", {line(), circle(0, per), line()}, constant_metric(Mat::Identity(3, 3)), Lattice{B, {1}}, {}, {}};
  c.sample_box = {open(-2, 2), open(0, per), open(-1, 1)};
  LeafSpaceMeta meta{"(u, y) with u mod 2/3", true, false, false};
  const auto uper = static_cast<std::int64_t>(std::llround(per * 1e9));
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [uper](int, const Vec& x) {
                                auto u = static_cast<std::int64_t>(std::llround(x[1] * 1e9)) % uper;
                                if (u < 0) u += uper;
                                LeafLabel l{u, static_cast<std::int64_t>(std::llround(x[2] * 1e9)), 0};
                                return l;
                              },
                              meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-3, 1}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(diag({3, 1, 1}))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"t", -1, 1, false, 0, 0.2}, {"x", 0, 2, true, 0, 0.2}, {"y", -0.5, 0.5, false, 0, 0.2}};
  d.to_chart = Mat::Zero(3, 3);
  d.to_chart << -1.0 / 3.0, 2.0 / 3.0, 0, 2.0 / 3.0, -1.0 / 3.0, 0, 0, 0, 1;
  d.offset = Vec::Zero(3);
  s.graph = d;
  s.graph_resolution = 10;
  s.seed_params = {Vec::Zero(3)};

  const auto P = ClaimSource::Published;
  add_property_claims(s);
  s.expected.push_back(equals("totally-vicious", "ladder-probe", "leaves_without_self_reach", 0, P,
                              "every helix leaf meets its own transverse future"));
  s.expected.push_back(equals("not-chronological", "ladder-probe", "cycle", 1, P, "totally vicious"));
  return s;
}

// --- Misner suspension --------------------------------------------------------------

Mat boost(double r) {
  Mat B(2, 2);
  B << std::cosh(r), std::sinh(r), std::sinh(r), std::cosh(r);
  return B;
}

SuspensionSpec make_suspension(Mat map) {
  SuspensionSpec sp;
  sp.model = constant_metric(diag({-1, 1}));
  sp.map = [map](const Vec& y) { return Vec(map * y); };
  sp.differential = [map](const Vec&) { return map; };
  sp.time_ref = [](const Vec&) { return Vec(Vec::Unit(2, 0)); };
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) sp.probe_points.push_back(Vec((Vec(2) << -1 + i / 3.5, -1 + j / 3.5).finished()));
  return sp;
}

ExampleSpec build_misner(const std::map<std::string, double>& p) {
  ExampleSpec s;
  s.id = "misner_suspension";
  const double r = param_or(p, "rapidity");
  s.description = "suspension of a boost of Minkowski R^2 over the circle; charts (sigma; t, x) on two arcs";
  Mat B = boost(r), Binv = boost(-r);
  Chart c0{"arc0", {open(-0.25, 0.75), line(), line()}, constant_metric(Mat::Identity(3, 3)), {}, {}, {}};
  Chart c1{"arc1", {open(0.25, 1.25), line(), line()}, constant_metric(Mat::Identity(3, 3)), {}, {}, {}};
  c0.sample_box = {open(-0.25, 0.75), open(-2, 2), open(-2, 2)};
  c1.sample_box = {open(0.25, 1.25), open(-2, 2), open(-2, 2)};
  auto in = [](double lo, double hi) { return [lo, hi](const Vec& x) { return x[0] > lo && x[0] < hi; }; };
  auto identity_map = [](const Vec& x) { return x; };
  auto identity_jac = [](const Vec&) { return Mat(Mat::Identity(3, 3)); };
  auto twist = [](double shift, Mat M) {
    return [shift, M](const Vec& x) {
      Vec y = x;
      y[0] += shift;
      y.tail(2) = M * x.tail(2);
      return y;
    };
  };
  auto twist_jac = [](Mat M) {
    return [M](const Vec&) {
      Mat J = Mat::Identity(3, 3);
      J.bottomRightCorner(2, 2) = M;
      return J;
    };
  };
  std::vector<Transition> trs{
      {0, 1, in(0.25, 0.75), identity_map, identity_jac},
      {1, 0, in(0.25, 0.75), identity_map, identity_jac},
      {1, 0, in(0.75, 1.25), twist(-1.0, B), twist_jac(B)},
      {0, 1, in(-0.25, 0.25), twist(1.0, Binv), twist_jac(Binv)},
  };
  LeafSpaceMeta meta{"(sigma + 1, y) ~ (sigma, B y) with B the boost; labels name plaques", false, false, false};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c0, c1}, trs), 1, {}, meta);
  MetricFn eta = constant_metric(diag({-1, 1}));
  s.gt = TransverseMetricField{{eta, eta}, 1};
  MetricFn h = constant_metric(Mat::Identity(3, 3));
  s.g = assemble_bundle_like(s.fol, *s.gt, {h, h});
  s.orient = TimeOrientation{{constant_field(unit(3, 1)), constant_field(unit(3, 1))}};
  s.time_axis = 1;
  s.suspension = make_suspension(B);
  s.reversed_suspension = make_suspension(-Mat::Identity(2, 2));
  s.focal = FocalDefaults{0, Vec::Zero(3), unit(3, 1), 1.0, 0.0};

  add_property_claims(s);
  s.expected.push_back(equals("orientable", "classify-demo", "orientable", 1, ClaimSource::Published,
                              "boosts preserve the future cone"));
  s.expected.push_back(equals("reversed-not-orientable", "classify-demo", "reversed_orientable", 0,
                              ClaimSource::Definitional, "(t, x) -> (-t, -x) swaps the cones"));
  return s;
}

// --- deleted sets ---------------------------------------------------------------------

bool segment_meets_box(const Vec& a, const Vec& b, const std::vector<Interval>& box) {
  double lo = 0.0, hi = 1.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    double d = b[i] - a[i];
    if (d == 0.0) {
      if (a[i] < box[i].lo || a[i] > box[i].hi) return false;
      continue;
    }
    double s0 = (box[i].lo - a[i]) / d, s1 = (box[i].hi - a[i]) / d;
    if (s0 > s1) std::swap(s0, s1);
    lo = std::max(lo, s0);
    hi = std::min(hi, s1);
    if (lo > hi) return false;
  }
  return true;
}

bool segment_meets_point(const Vec& a, const Vec& b, const Vec& p) {
  Vec d = b - a;
  double dd = d.squaredNorm();
  double s = dd > 0 ? std::clamp((p - a).dot(d) / dd, 0.0, 1.0) : 0.0;
  return (a + s * d - p).norm() < 1e-12;
}

ExampleSpec build_deleted_segment(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "deleted_segment";
  s.description = "R^3 minus {(t, x, 0) : 0 <= t <= 1}, leaves are components of the fibers of (t, x, y) -> (t, x); "
                  "chart (y; t, x)";
  auto removed = [](const Vec& x) { return x[0] == 0.0 && x[1] >= 0.0 && x[1] <= 1.0; };
  Chart c{"slit", {line(), line(), line()}, constant_metric(Mat::Identity(3, 3)), {}, removed, {}};
  c.sample_box = {open(-2, 2), open(-2, 2), open(-2, 2)};
  LeafSpaceMeta meta{"(t, x) plus the side of y when 0 <= t <= 1", false, false, false};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [](int, const Vec& x) {
                                std::int64_t comp = 0;
                                if (x[1] >= 0.0 && x[1] <= 1.0) comp = x[0] > 0 ? 1 : -1;
                                return quantized_label(Vec(x.tail(2)), comp);
                              },
                              meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-1, 1}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(Mat::Identity(3, 3))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"t", -0.25, 1.25, false, 0, 0.15}, {"x", -0.25, 0.25, false, 0, 0.15}, {"y", -1, 1, false, 0.5, 1.0}};
  d.to_chart = txy_to_ytx();
  d.offset = Vec::Zero(3);
  d.blocked = [](const Vec& a, const Vec& b) {
    // chart coordinates (y; t, x): does the segment touch y = 0 with 0 <= t <= 1?
    if (a[0] == 0.0 && b[0] == 0.0) return std::max(a[1], b[1]) >= 0.0 && std::min(a[1], b[1]) <= 1.0;
    if ((a[0] > 0 && b[0] > 0) || (a[0] < 0 && b[0] < 0)) return false;
    double s = a[0] / (a[0] - b[0]);
    double t = a[1] + s * (b[1] - a[1]);
    return t >= 0.0 && t <= 1.0;
  };
  s.graph = d;
  s.graph_resolution = 20;
  s.seed_params = {(Vec(3) << 0.0, 0.0, -0.5).finished()};
  ReachProbe lower{"L_minus_hits", ReachMode::TransverseSaturated, {}};
  ReachProbe upper{"L_plus_hits", ReachMode::TransverseSaturated, {}};
  for (double a : {0.25, 0.5, 1.0}) {
    lower.params.push_back((Vec(3) << a, 0.0, -0.5).finished());
    upper.params.push_back((Vec(3) << a, 0.0, 0.5).finished());
  }
  s.reach_probes = {lower, upper};

  const auto P = ClaimSource::Published;
  add_property_claims(s);
  s.expected.push_back(equals("reaches-lower-leaves", "reach", "L_minus_hits", 3, P,
                              "L1 precedes L_a^- for a in {0.25, 0.5, 1}"));
  s.expected.push_back(equals("misses-upper-leaves", "reach", "L_plus_hits", 0, P, "L1 does not precede L_a^+"));
  return s;
}

ExampleSpec build_deleted_box(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "deleted_box";
  s.description = "R^3 minus K = {y <= 4, |t| <= 1, |x| <= 4} u {(-2, 0, 0)}, fibers of (t, x, y) -> (t, x); "
                  "chart (y; t, x)";
  const std::vector<Interval> K{{-kInf, 4.0, false}, {-1.0, 1.0, false}, {-4.0, 4.0, false}};
  const Vec hole = (Vec(3) << 0.0, -2.0, 0.0).finished();
  auto removed = [K, hole](const Vec& x) {
    bool in_box = x[0] <= 4.0 && std::abs(x[1]) <= 1.0 && std::abs(x[2]) <= 4.0;
    return in_box || (x - hole).norm() == 0.0;
  };
  Chart c{"box", {line(), line(), line()}, constant_metric(Mat::Identity(3, 3)), {}, removed, {}};
  c.sample_box = {open(-2, 8), open(-3, 3), open(-5, 5)};
  LeafSpaceMeta meta{"(t, x) plus the side of y over (-2, 0)", false, false, false};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [](int, const Vec& x) {
                                std::int64_t comp = 0;
                                if (std::abs(x[1] + 2.0) < 1e-12 && std::abs(x[2]) < 1e-12) comp = x[0] > 0 ? 1 : -1;
                                return quantized_label(Vec(x.tail(2)), comp);
                              },
                              meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-1, 1}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(Mat::Identity(3, 3))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"t", -2.5, 0.5, false, 0, 0.5}, {"x", -1.5, 1.5, false, 0, 0.5}, {"y", -2, 7, false, 1.0, 3.0}};
  d.to_chart = txy_to_ytx();
  d.offset = Vec::Zero(3);
  d.blocked = [K, hole](const Vec& a, const Vec& b) {
    return segment_meets_box(a, b, K) || segment_meets_point(a, b, hole);
  };
  s.graph = d;
  s.graph_resolution = 4;
  s.seed_params = {(Vec(3) << -2.0, 0.0, -1.0).finished()};
  const Vec probe = (Vec(3) << 0.0, 0.0, 6.0).finished();
  s.reach_probes = {{"probe_in_transverse_future", ReachMode::TransverseSaturated, {probe}},
                    {"probe_in_g_future_saturation", ReachMode::GFutureSaturation, {probe}}};

  const auto P = ClaimSource::Published;
  add_property_claims(s);
  s.expected.push_back(equals("probe-in-transverse-future", "reach", "probe_in_transverse_future", 1, P,
                              "(0, 0, 6) lies in the saturated transverse future of L"));
  s.expected.push_back(equals("probe-outside-g-future", "reach", "probe_in_g_future_saturation", 0, P,
                              "(0, 0, 6) is not in the saturation of the g-future of L"));
  return s;
}

// --- warped products ---------------------------------------------------------------------

ExampleSpec build_desitter(const std::map<std::string, double>& p) {
  ExampleSpec s;
  s.id = "desitter_warp";
  const double L = param_or(p, "L");
  s.description =
      "(0, L) x S^3 de Sitter base -dt^2 + cosh^2 t w3, flat torus fiber, warping f = sqrt t (p = 2); chart "
      "(phi1, phi2; t, chi, theta, varphi)";
  auto gB = MetricFn::from(4, [](const auto& y) {
    using T = scalar_of_t<decltype(y)>;
    using std::cosh;
    using std::sin;
    T a2 = cosh(y[0]) * cosh(y[0]);
    T s1 = sin(y[1]) * sin(y[1]);
    MatX<T> g = MatX<T>::Zero(4, 4);
    g(0, 0) = T(-1.0);
    g(1, 1) = a2;
    g(2, 2) = a2 * s1;
    g(3, 3) = a2 * s1 * sin(y[2]) * sin(y[2]);
    return g;
  });
  auto h = MetricFn::from(6, [](const auto& x) {
    using T = scalar_of_t<decltype(x)>;
    MatX<T> g = MatX<T>::Identity(6, 6);
    g(0, 0) = x[2];
    g(1, 1) = x[2];
    return g;
  });
  Chart c{"desitter",
          {circle(0, 2 * kPi), circle(0, 2 * kPi), open(0, L), open(0, kPi), open(0, kPi), circle(0, 2 * kPi)},
          constant_metric(Mat::Identity(6, 6)),
          {},
          {},
          {}};
  c.sample_box = {open(0, 2 * kPi), open(0, 2 * kPi), open(0.02 * L, L), open(0.2, kPi - 0.2), open(0.2, kPi - 0.2),
                  open(0, 2 * kPi)};
  LeafSpaceMeta meta{"leaf space is the base (0, L) x S^3", true, true, true};
  s.fol = make_foliated_atlas(ChartAtlas(6, {c}), 2,
                              [](int, const Vec& x) { return quantized_label(Vec(x.tail(4))); }, meta);
  s.gt = TransverseMetricField{{gB}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {h});
  s.orient = TimeOrientation{{constant_field(unit(6, 2))}};
  s.time_axis = 2;
  s.base_einstein = 3.0;
  s.warped = [gB](const Vec& x) {
    WarpedPointData d;
    d.p = 2;
    Vec y = x.tail(4);
    const double t = y[0];
    d.g_b = gB(y);
    d.ric_b = 3.0 * d.g_b;
    d.ric_f = Mat::Zero(2, 2);
    d.g_f = Mat::Identity(2, 2);
    d.f = std::sqrt(t);
    const double f1 = 0.5 / std::sqrt(t), f2 = -0.25 / (t * std::sqrt(t));
    d.grad_f = Vec::Zero(4);
    d.grad_f[0] = -f1;
    d.hess_f = Mat::Zero(4, 4);
    d.hess_f(0, 0) = f2;
    const double ct = std::cosh(t), st = std::sinh(t);
    for (int i = 1; i < 4; ++i) d.hess_f(i, i) = -st / ct * d.g_b(i, i) * f1;
    d.lap_f = -f2 - 3.0 * std::tanh(t) * f1;
    return d;
  };
  Vec x0(6);
  x0 << 0, 0, 0.01 * L, kPi / 2, kPi / 2, 0;
  s.focal = FocalDefaults{0, x0, unit(6, 2), 1.0, -1.0};
  for (double chi : {kPi / 2, kPi / 3}) {
    Vec st = x0;
    st[3] = chi;
    s.shoot_starts.push_back({0, st});
  }

  const auto P = ClaimSource::Published, A = ClaimSource::Analytic;
  add_property_claims(s);
  s.expected.push_back(claim("ricci-lower", "ricci-scan", "ricci_g_min", Comparison::AtLeast, 1 - 1e-4, 0, P,
                             "Ric_g(T, T) >= 1 on unit timelike T for L <= sqrt(p)/4"));
  s.expected.push_back(claim("transverse-ricci-upper", "ricci-scan", "ricci_transverse_max_g_unit",
                             Comparison::AtMost, 0, -3 + 1e-4, P, "Ric_T(T, T) <= -3 on g-unit timelike T"));
  s.expected.push_back(claim("de-sitter-identity", "ricci-scan", "base_identity_error", Comparison::AtMost, 0, 1e-6,
                             P, "Ric_B(v, v) = 3 g_B(v, v)"));
  s.expected.push_back(claim("oneill", "ricci-scan", "closed_form_rel_error", Comparison::AtMost, 0, 1e-5, A,
                             "numeric Ricci against the warped-product formula"));
  s.expected.push_back(claim("sinh-jacobi", "focal-scan", "sinh_error", Comparison::AtMost, 0, 1e-6, A,
                             "j'' = j on de Sitter, j = sinh s"));
  return s;
}

ExampleSpec build_logt(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "logt_warp";
  s.description =
      "base (1, e) x R with -dt^2 + dx^2, fiber a cusp chart of the hyperbolic plane (dxi^2 + deta^2)/eta^2, "
      "warping f = log t (p = 2); chart (xi, eta; t, x)";
  const double e = std::exp(1.0);
  auto h = MetricFn::from(4, [](const auto& x) {
    using T = scalar_of_t<decltype(x)>;
    using std::log;
    T l = log(x[2]);
    T w = l * l / (x[1] * x[1]);
    MatX<T> g = MatX<T>::Identity(4, 4);
    g(0, 0) = w;
    g(1, 1) = w;
    return g;
  });
  Chart c{"logt", {circle(0, 1), open(0.5, 2), open(1, e), line()}, constant_metric(Mat::Identity(4, 4)), {}, {}, {}};
  LeafSpaceMeta meta{"leaf space is the base (1, e) x R", true, false, true};
  s.fol = make_foliated_atlas(ChartAtlas(4, {c}), 2,
                              [](int, const Vec& x) { return quantized_label(Vec(x.tail(2))); }, meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-1, 1}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {h});
  s.orient = TimeOrientation{{constant_field(unit(4, 2))}};
  s.time_axis = 2;
  s.negative_ricci_window = Interval{2.5, e, false};
  s.warped = [](const Vec& x) {
    WarpedPointData d;
    d.p = 2;
    const double t = x[2], eta = x[1];
    d.g_b = diag({-1, 1});
    d.ric_b = Mat::Zero(2, 2);
    d.g_f = Mat::Identity(2, 2) / (eta * eta);
    d.ric_f = -d.g_f;
    d.f = std::log(t);
    d.grad_f = (Vec(2) << -1.0 / t, 0.0).finished();
    d.hess_f = diag({-1.0 / (t * t), 0.0});
    d.lap_f = 1.0 / (t * t);
    return d;
  };
  Vec x0(4);
  x0 << 0, 1, 1.05, 0;
  s.focal = FocalDefaults{0, x0, unit(4, 2), 2.0, std::nullopt};
  s.shoot_starts.push_back({0, x0});

  const auto P = ClaimSource::Published, A = ClaimSource::Analytic;
  add_property_claims(s);
  s.expected.push_back(claim("transverse-ricci-positive", "ricci-scan", "ricci_transverse_min", Comparison::AtLeast,
                             2.0 / (e * e) - 1e-6, 0, P, "Ric_T(E, E) >= p/e^2 as printed"));
  s.expected.push_back(equals("ricci-negative-somewhere", "ricci-scan", "ricci_g_negative_found", 1, P,
                              "a timelike E with Ric_g(E, E) < 0 near t = e"));
  s.expected.push_back(claim("oneill", "ricci-scan", "closed_form_rel_error", Comparison::AtMost, 0, 1e-5, A,
                             "numeric Ricci against the warped-product formula"));
  return s;
}

ExampleSpec build_cos_warp(const std::map<std::string, double>& p) {
  ExampleSpec s;
  s.id = "cos_warp";
  const double C = param_or(p, "C"), eps = param_or(p, "eps");
  if (!(C > 0) || !(eps > 0)) throw Error(ErrorCode::InvalidAtlas, "cos_warp needs C > 0 and eps > 0");
  const double rc = std::sqrt(C), a = kPi / (2 * rc);
  if (!(eps < a)) throw Error(ErrorCode::InvalidAtlas, "cos_warp eps leaves an empty slab");
  s.description = "base (-pi/(2 sqrt C) + eps, pi/(2 sqrt C) - eps) x S^1 with -dt^2 + cos^2(sqrt(C) t) dtheta^2, "
                  "product circle fiber; chart (phi; t, theta)";
  auto gB = MetricFn::from(2, [rc](const auto& y) {
    using T = scalar_of_t<decltype(y)>;
    using std::cos;
    T c = cos(rc * y[0]);
    MatX<T> g = MatX<T>::Zero(2, 2);
    g(0, 0) = T(-1.0);
    g(1, 1) = c * c;
    return g;
  });
  Chart c{"cos", {circle(0, 2 * kPi), open(-a + eps, a - eps), circle(-kPi, kPi)},
          constant_metric(Mat::Identity(3, 3)), {}, {}, {}};
  LeafSpaceMeta meta{"leaf space is the base slab x S^1", true, true, true};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [](int, const Vec& x) { return quantized_label(Vec(x.tail(2))); }, meta);
  s.gt = TransverseMetricField{{gB}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(Mat::Identity(3, 3))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;
  s.ricci_bound = C;
  s.warped = [gB, C](const Vec& x) {
    WarpedPointData d;
    d.p = 1;
    d.g_b = gB(Vec(x.tail(2)));
    d.ric_b = -C * d.g_b;
    d.ric_f = Mat::Zero(1, 1);
    d.g_f = Mat::Identity(1, 1);
    d.f = 1.0;
    d.grad_f = Vec::Zero(2);
    d.hess_f = Mat::Zero(2, 2);
    d.lap_f = 0.0;
    return d;
  };
  const double t0 = -a + eps + 1e-3;
  s.focal = FocalDefaults{0, (Vec(3) << 0, t0, 0).finished(), unit(3, 1), 2 * a, C};
  for (double off : {1e-3, 0.05, 0.25}) s.shoot_starts.push_back({0, (Vec(3) << 0, -a + eps + off, 0).finished()});

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"phi", 0, 0, false, 1.0, 0.0}, {"t", -a + eps, a - eps, false, 0, 0.2}, {"theta", -0.25, 0.25, false, 0, 0.1}};
  d.to_chart = Mat::Identity(3, 3);
  d.offset = Vec::Zero(3);
  s.graph = d;
  s.graph_resolution = 40;
  s.graph_resolutions = {10, 20, 40};
  s.seed_params = {(Vec(3) << 0, 0, 0).finished()};

  const double D = 2 * a - 2 * eps;  // supremum of transverse lengths across the slab
  const auto A = ClaimSource::Analytic;
  add_property_claims(s);
  s.expected.push_back(claim("ricci-bound", "ricci-scan", "ricci_bound_margin", Comparison::AtLeast, -1e-9, 0, A,
                             "Ric_T(v, v) = C on unit timelike v"));
  s.expected.push_back(claim("shoot-sharp", "diameter-shoot", "value", Comparison::Within, 0.99 * D,
                             kPi / rc + 1e-3, A, "slab height, below pi/sqrt(C)"));
  s.expected.push_back(claim("graph-inner", "diameter-graph", "value", Comparison::Within, D - (kPi - 0.1 - 2.85),
                             D + 1e-6, A, "graph paths are inner approximations"));
  s.expected.push_back(equals("graph-monotone", "diameter-graph", "monotone", 1, A,
                              "nested grids: longest paths cannot shrink under refinement"));
  s.expected.push_back(claim("riccati-cot", "focal-scan", "riccati_cot_error", Comparison::AtMost, 0, 1e-4, A,
                             "u = sqrt(C) cot(sqrt(C) s)"));
  if (kPi / rc - (2 * a - 2 * eps - 1e-3) < 0.02)
    s.expected.push_back(claim("riccati-blowup", "focal-scan", "end_abs_riccati", Comparison::AtLeast, 40, 0, A,
                               "focal point just beyond the slab"));
  return s;
}

ExampleSpec build_flat_slab(const std::map<std::string, double>&) {
  ExampleSpec s;
  s.id = "flat_slab";
  s.description = "Minkowski slab 0 < t < 1 with circle theta and circle leaves phi, g = dphi^2 - dt^2 + dtheta^2";
  Chart c{"slab", {circle(0, 2 * kPi), open(0, 1), circle(-kPi, kPi)}, constant_metric(Mat::Identity(3, 3)), {}, {}, {}};
  LeafSpaceMeta meta{"leaf space is (0, 1) x S^1", true, true, true};
  s.fol = make_foliated_atlas(ChartAtlas(3, {c}), 1,
                              [](int, const Vec& x) { return quantized_label(Vec(x.tail(2))); }, meta);
  s.gt = TransverseMetricField{{constant_metric(diag({-1, 1}))}, 1};
  s.g = assemble_bundle_like(s.fol, *s.gt, {constant_metric(Mat::Identity(3, 3))});
  s.orient = TimeOrientation{{constant_field(unit(3, 1))}};
  s.time_axis = 1;
  s.ricci_bound = 0.0;
  s.focal = FocalDefaults{0, (Vec(3) << 0, 1e-3, 0).finished(), unit(3, 1), 2.0, 0.0};
  s.shoot_starts.push_back({0, (Vec(3) << 0, 1e-3, 0).finished()});

  GraphDomain d;
  d.chart = 0;
  d.axes = {{"phi", 0, 0, false, 1.0, 0.0}, {"t", 0, 1, false, 0, 0.2}, {"theta", -0.25, 0.25, false, 0, 0.1}};
  d.to_chart = Mat::Identity(3, 3);
  d.offset = Vec::Zero(3);
  s.graph = d;
  s.graph_resolution = 20;
  s.graph_resolutions = {10, 20, 40};
  s.seed_params = {(Vec(3) << 0, 0.5, 0).finished()};

  const auto A = ClaimSource::Analytic;
  add_property_claims(s);
  s.expected.push_back(claim("shoot", "diameter-shoot", "value", Comparison::Within, 0.99, 1 + 1e-6, A,
                             "slab height 1"));
  s.expected.push_back(claim("graph-inner", "diameter-graph", "value", Comparison::AtMost, 0, 1 + 1e-9, A,
                             "graph paths are inner approximations"));
  s.expected.push_back(equals("graph-monotone", "diameter-graph", "monotone", 1, A,
                              "nested grids: longest paths cannot shrink under refinement"));
  s.expected.push_back(equals("no-cycle", "ladder-probe", "cycle", 0, A, "t increases along every edge"));
  s.expected.push_back(claim("linear-jacobi", "focal-scan", "linear_error", Comparison::AtMost, 0, 1e-12, A,
                             "flat quotient: A(s) = s I"));
  return s;
}

// --- registry ---------------------------------------------------------------------

struct Entry {
  std::string id;
  std::map<std::string, double> defaults;
  ExampleSpec (*build)(const std::map<std::string, double>&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"mink3_vertical", {}, build_mink3},
      {"kronecker_T2", {}, build_kronecker},
      {"torus3_dense", {}, build_torus3},
      {"helix_foliation", {}, build_helix},
      {"misner_suspension", {{"rapidity", 1.0}}, build_misner},
      {"deleted_segment", {}, build_deleted_segment},
      {"deleted_box", {}, build_deleted_box},
      {"desitter_warp", {{"L", std::sqrt(2.0) / 4.0}}, build_desitter},
      {"logt_warp", {}, build_logt},
      {"cos_warp", {{"C", 1.0}, {"eps", 0.05}}, build_cos_warp},
      {"flat_slab", {}, build_flat_slab},
  };
  return entries;
}

void audit(const ExampleSpec& s) {
  for (const auto& c : s.expected)
    if (c.source == ClaimSource::Unset || c.id.empty() || c.task.empty() || c.key.empty())
      throw Error(ErrorCode::AuditFailed, s.id + ": claim without provenance: " + c.id);
  auto fail = [&](const std::string& what, const AuditReport& r) {
    if (!r.passed) throw Error(ErrorCode::AuditFailed, s.id + ": " + what + ": " + r.first_failure);
  };
  if (s.gt) fail("transverse metric", audit_transverse_metric(s.fol, *s.gt, 50, 11));
  if (s.gt && s.orient) fail("time orientation", audit_time_orientation(s.fol, *s.gt, *s.orient, 50, 12));
  if (s.g) {
    fail("signature", audit_signature(*s.g, 50, 13, 1));
    fail("transitions", audit_transitions(*s.g, 50, 14));
  }
}

}  // namespace

std::string_view to_string(ClaimSource s) {
  switch (s) {
    case ClaimSource::Unset: return "unset";
    case ClaimSource::Published: return "published";
    case ClaimSource::Analytic: return "analytic";
    case ClaimSource::Definitional: return "definitional";
  }
  return "?";
}

bool ExpectedClaim::check(double v) const {
  if (!std::isfinite(v)) return false;
  switch (cmp) {
    case Comparison::AtLeast: return v >= lo;
    case Comparison::AtMost: return v <= hi;
    case Comparison::Within: return v >= lo && v <= hi;
    case Comparison::Equals: return v == lo;
  }
  return false;
}

std::vector<std::string> list_examples() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.id);
  return out;
}

const ExampleSpec& get_example(const std::string& id, const std::map<std::string, double>& overrides) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<ExampleSpec>> cache;
  const Entry* entry = nullptr;
  for (const auto& e : registry())
    if (e.id == id) entry = &e;
  if (!entry) throw Error(ErrorCode::UnknownExample, "no example named '" + id + "'");
  std::map<std::string, double> params = entry->defaults;
  for (const auto& [k, v] : overrides) {
    if (!params.count(k)) throw Error(ErrorCode::UnknownKey, id + " has no parameter '" + k + "'");
    params[k] = v;
  }
  std::ostringstream key;
  key.precision(17);
  key << id;
  for (const auto& [k, v] : params) key << ';' << k << '=' << v;

  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it != cache.end()) return *it->second;
  auto spec = std::make_unique<ExampleSpec>(entry->build(params));
  for (const auto& [k, v] : params) spec->params[k] = v;
  audit(*spec);
  return *cache.emplace(key.str(), std::move(spec)).first->second;
}

}  // namespace leafcausal
