#include "leafcausal/foliation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace leafcausal {

namespace {

VecX<double> tail_of(const Vec& x, int q) { return x.tail(q); }

void require_chart_fields(const FoliatedAtlas& fol, const TransverseMetricField& gt) {
  if (static_cast<int>(gt.h.size()) != fol.base.chart_count())
    throw Error(ErrorCode::InvalidAtlas, "transverse metric needs one field per chart");
}

// Leaf coordinate values inside a chart, used to anchor quotient transitions.
std::vector<Vec> leaf_anchors(const Chart& c, int p) {
  std::vector<Vec> out;
  const int steps = 9;
  Vec a(p);
  std::vector<std::vector<double>> axis(p);
  for (int i = 0; i < p; ++i) {
    const auto& iv = c.box[i];
    double lo = std::isfinite(iv.lo) ? iv.lo : -4.0;
    double hi = std::isfinite(iv.hi) ? iv.hi : 4.0;
    for (int k = 1; k <= steps; ++k) axis[i].push_back(lo + (hi - lo) * k / (steps + 1.0));
  }
  std::vector<int> idx(p, 0);
  for (;;) {
    for (int i = 0; i < p; ++i) a[i] = axis[i][idx[i]];
    out.push_back(a);
    int i = 0;
    while (i < p && ++idx[i] == steps) idx[i++] = 0;
    if (i == p) break;
  }
  return out;
}

}  // namespace

std::string_view to_string(TransverseCausal c) {
  switch (c) {
    case TransverseCausal::Timelike: return "transversely-timelike";
    case TransverseCausal::Lightlike: return "transversely-lightlike";
    case TransverseCausal::Spacelike: return "transversely-spacelike";
  }
  return "?";
}

std::string_view to_string(Wedge w) {
  switch (w) {
    case Wedge::None: return "none";
    case Wedge::Future: return "future";
    case Wedge::Past: return "past";
  }
  return "?";
}

LeafLabel quantized_label(const Vec& transverse, std::int64_t component) {
  LeafLabel out;
  out.reserve(transverse.size() + 1);
  for (Eigen::Index i = 0; i < transverse.size(); ++i)
    out.push_back(static_cast<std::int64_t>(std::llround(transverse[i] * 1e9)));
  out.push_back(component);
  return out;
}

LeafLabel FoliatedAtlas::label(int chart, const Vec& x) const {
  if (leaf_label) return leaf_label(chart, x);
  LeafLabel l = quantized_label(transverse(chart, x));
  l.insert(l.begin(), chart);
  return l;
}

FoliatedAtlas make_foliated_atlas(ChartAtlas base, int p,
                                  std::function<LeafLabel(int, const Vec&)> leaf_label,
                                  LeafSpaceMeta meta, bool allow_codim_one) {
  const int n = base.dim();
  if (p < 1 || p >= n) throw Error(ErrorCode::InvalidAtlas, "leaf dimension out of range");
  const int q = n - p;
  if (q < 2 && !allow_codim_one) throw Error(ErrorCode::InvalidAtlas, "codimension must be at least 2");

  // transverse block of each transition may not move along leaves
  Rng rng(7);
  for (const auto& tr : base.transitions()) {
    int checked = 0;
    for (int k = 0; k < 2000 && checked < 50; ++k) {
      Vec x = sample_point(base, tr.from, rng);
      if (tr.domain && !tr.domain(x)) continue;
      ++checked;
      Vec y0 = tr.map(x).tail(q);
      for (int i = 0; i < p; ++i) {
        double h = 1e-3;
        Vec xs = x;
        xs[i] += h;
        if (!base.contains(tr.from, xs) || (tr.domain && !tr.domain(xs))) {
          h = -h;
          xs[i] = x[i] + h;
          if (!base.contains(tr.from, xs) || (tr.domain && !tr.domain(xs))) continue;
        }
        Vec y1 = tr.map(xs).tail(q);
        if ((y1 - y0).cwiseAbs().maxCoeff() / std::abs(h) > 1e-8)
          throw Error(ErrorCode::InvalidAtlas, "transition mixes leaf coordinates into transverse block");
      }
    }
  }
  FoliatedAtlas fol;
  fol.base = std::move(base);
  fol.p = p;
  fol.q = q;
  fol.leaf_label = std::move(leaf_label);
  fol.meta = std::move(meta);
  return fol;
}

Mat transverse_matrix(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart, const Vec& x) {
  require_chart_fields(fol, gt);
  if (!fol.base.contains(chart, x))
    throw Error(ErrorCode::PointOutsideChart, "point outside chart " + fol.base.chart(chart).name);
  Mat h = gt.h[chart](tail_of(fol.base.reduce(chart, x), fol.q));
  if (!h.allFinite()) throw Error(ErrorCode::NonFiniteCoefficient, "transverse metric not finite");
  return 0.5 * (h + h.transpose());
}

Mat transverse_full(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart, const Vec& x) {
  Mat g = Mat::Zero(fol.dim(), fol.dim());
  g.bottomRightCorner(fol.q, fol.q) = transverse_matrix(fol, gt, chart, x);
  return g;
}

double transverse_form(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart,
                       const Vec& x, const Vec& v, const Vec& w) {
  Mat h = transverse_matrix(fol, gt, chart, x);
  return v.tail(fol.q).dot(h * w.tail(fol.q));
}

ChartAtlas quotient_atlas(const FoliatedAtlas& fol, const TransverseMetricField& gt) {
  require_chart_fields(fol, gt);
  const int p = fol.p, q = fol.q;
  std::vector<Chart> charts;
  for (int c = 0; c < fol.base.chart_count(); ++c) {
    const Chart& src = fol.base.chart(c);
    Chart qc;
    qc.name = src.name + "/leaves";
    qc.box.assign(src.box.begin() + p, src.box.end());
    if (!src.sample_box.empty()) qc.sample_box.assign(src.sample_box.begin() + p, src.sample_box.end());
    qc.metric = gt.h[c];
    charts.push_back(std::move(qc));
  }
  std::vector<Transition> trs;
  for (const auto& tr : fol.base.transitions()) {
    const Chart& src = fol.base.chart(tr.from);
    // one representative plaque per transition; the transverse block is leaf-independent
    std::vector<Vec> anchors = leaf_anchors(src, p);
    Transition qt;
    qt.from = tr.from;
    qt.to = tr.to;
    auto lift = [anchors, p, q, tr](const Vec& y) -> std::optional<Vec> {
      Vec x(p + q);
      x.tail(q) = y;
      for (const auto& a : anchors) {
        x.head(p) = a;
        if (!tr.domain || tr.domain(x)) return x;
      }
      return std::nullopt;
    };
    qt.domain = [lift](const Vec& y) { return lift(y).has_value(); };
    qt.map = [lift, tr, q](const Vec& y) -> Vec {
      auto x = lift(y);
      if (!x) throw Error(ErrorCode::ChartChainNotFound, "no plaque over transverse point");
      return tr.map(*x).tail(q);
    };
    qt.jacobian = [lift, tr, q](const Vec& y) -> Mat {
      auto x = lift(y);
      if (!x) throw Error(ErrorCode::ChartChainNotFound, "no plaque over transverse point");
      return tr.jacobian(*x).bottomRightCorner(q, q);
    };
    trs.push_back(std::move(qt));
  }
  return ChartAtlas(q, std::move(charts), std::move(trs));
}

AuditReport audit_transverse_metric(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                    int samples, std::uint64_t seed) {
  require_chart_fields(fol, gt);
  AuditReport rep;
  const int q = fol.q, p = fol.p;
  for (int c = 0; c < fol.base.chart_count(); ++c) {
    Rng rng(seed + c);
    for (int k = 0; k < samples; ++k) {
      Vec x = sample_point(fol.base, c, rng);
      ++rep.checks;
      Mat full = transverse_full(fol, gt, c, x);
      if (full.topRows(p).cwiseAbs().maxCoeff() != 0.0 || full.leftCols(p).cwiseAbs().maxCoeff() != 0.0) {
        rep.passed = false;
        rep.first_failure = "transverse tensor not leaf-degenerate";
        return rep;
      }
      Mat h = full.bottomRightCorner(q, q);
      Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-12) {
        rep.passed = false;
        rep.first_failure = "degenerate transverse metric";
        return rep;
      }
      if (negative_eigenvalues(h) != gt.index) {
        rep.passed = false;
        rep.first_failure = "transverse index differs from declared index";
        return rep;
      }
    }
  }
  for (std::size_t t = 0; t < fol.base.transitions().size(); ++t) {
    const auto& tr = fol.base.transitions()[t];
    Rng rng(seed + 1000 + t);
    int found = 0;
    for (int k = 0; k < 50 * samples && found < samples; ++k) {
      Vec x = sample_point(fol.base, tr.from, rng);
      if (tr.domain && !tr.domain(x)) continue;
      ++found;
      ++rep.checks;
      Vec y = tr.map(x);
      Mat Jt = tr.jacobian(x).bottomRightCorner(q, q);
      Mat pulled = Jt.transpose() * transverse_matrix(fol, gt, tr.to, y) * Jt;
      Mat h = transverse_matrix(fol, gt, tr.from, x);
      if ((pulled - h).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
        rep.passed = false;
        rep.first_failure = "transition is not a transverse isometry";
        return rep;
      }
    }
  }
  return rep;
}

AuditReport audit_time_orientation(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                   const TimeOrientation& orient, int samples, std::uint64_t seed) {
  AuditReport rep;
  if (static_cast<int>(orient.field.size()) != fol.base.chart_count()) {
    rep.passed = false;
    rep.first_failure = "time orientation needs one field per chart";
    return rep;
  }
  for (int c = 0; c < fol.base.chart_count(); ++c) {
    Rng rng(seed + c);
    for (int k = 0; k < samples; ++k) {
      Vec x = sample_point(fol.base, c, rng);
      Vec X = orient.field[c](x);
      ++rep.checks;
      if (!(transverse_form(fol, gt, c, x, X, X) < 0)) {
        rep.passed = false;
        rep.first_failure = "reference field not transversely timelike";
        return rep;
      }
    }
  }
  for (std::size_t t = 0; t < fol.base.transitions().size(); ++t) {
    const auto& tr = fol.base.transitions()[t];
    Rng rng(seed + 2000 + t);
    int found = 0;
    for (int k = 0; k < 50 * samples && found < samples; ++k) {
      Vec x = sample_point(fol.base, tr.from, rng);
      if (tr.domain && !tr.domain(x)) continue;
      ++found;
      ++rep.checks;
      Vec y = tr.map(x);
      Vec pushed = tr.jacobian(x) * orient.field[tr.from](x);
      if (!(transverse_form(fol, gt, tr.to, y, pushed, orient.field[tr.to](y)) < 0)) {
        rep.passed = false;
        rep.first_failure = "reference fields disagree on wedge across a transition";
        return rep;
      }
    }
  }
  return rep;
}

ChartAtlas assemble_bundle_like(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                const std::vector<MetricFn>& h, int audit_samples, std::uint64_t seed) {
  require_chart_fields(fol, gt);
  const int n = fol.dim(), p = fol.p, q = fol.q;
  if (static_cast<int>(h.size()) != fol.base.chart_count())
    throw Error(ErrorCode::InvalidAtlas, "auxiliary metric needs one field per chart");
  std::vector<MetricFn> metrics;
  for (int c = 0; c < fol.base.chart_count(); ++c) {
    if (h[c].dim() != n) throw Error(ErrorCode::InvalidAtlas, "auxiliary metric has wrong size");
    MetricFn hc = h[c], tc = gt.h[c];
    metrics.push_back(MetricFn::from(n, [hc, tc, p, q](const auto& x) {
      using T = scalar_of_t<decltype(x)>;
      MatX<T> H = hc(x);
      // h restricted to the h-orthogonal projection onto the leaf directions
      MatX<T> rows = H.topRows(p);
      MatX<T> coeff = solve_generic<T>(H.topLeftCorner(p, p), rows);
      MatX<T> g = rows.transpose() * coeff;
      VecX<T> y = x.tail(q);
      g.bottomRightCorner(q, q) += tc(y);
      return g;
    }));
  }
  ChartAtlas out = fol.base.with_metrics(metrics);
  Rng rng(seed);
  for (int c = 0; c < out.chart_count(); ++c)
    for (int k = 0; k < std::min(audit_samples, 50); ++k) {
      Vec x = sample_point(out, c, rng);
      if (negative_eigenvalues(h[c](out.reduce(c, x))) != 0)
        throw Error(ErrorCode::InvalidAtlas, "auxiliary metric is not Riemannian");
    }
  auto rep = audit_signature(out, audit_samples, seed, gt.index);
  if (!rep.passed) throw Error(ErrorCode::IndexMismatch, rep.first_failure);
  return out;
}

SplitResult split(const FoliatedAtlas& fol, const ChartAtlas& g, const TangentVector& v) {
  const int p = fol.p;
  Mat G = eval_metric(g, v.chart, v.base);
  Vec coeff = G.topLeftCorner(p, p).ldlt().solve(G.topRows(p) * v.comps);
  SplitResult r;
  r.vertical = Vec::Zero(fol.dim());
  r.vertical.head(p) = coeff;
  r.horizontal = v.comps - r.vertical;
  return r;
}

TransverseClass classify_transverse(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                    const TimeOrientation& orient, const TangentVector& v, double tol) {
  TransverseClass out;
  Vec vt = v.comps.tail(fol.q);
  double s = vt.cwiseAbs().maxCoeff();
  if (s == 0.0) return out;
  Mat h = transverse_matrix(fol, gt, v.chart, v.base);
  Vec u = vt / s;
  out.kind = static_cast<TransverseCausal>(classify_value(u.dot(h * u), false, tol));
  if (out.kind == TransverseCausal::Spacelike) return out;
  Vec X = normalize_max_abs(Vec(orient.field[v.chart](v.base).tail(fol.q)));
  double w = u.dot(h * X);
  if (std::abs(w) <= tol) {
    out.ambiguous = true;
    return out;
  }
  out.wedge = w < 0 ? Wedge::Future : Wedge::Past;
  return out;
}

QuadratureResult transverse_length(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                   const CurveSamples& curve) {
  validate_curve(fol.base, curve);
  const std::size_t n = curve.size();
  std::vector<double> f(n), fl(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = curve.samples[i];
    Mat h = transverse_matrix(fol, gt, s.chart, s.point);
    Vec vt = s.velocity.tail(fol.q);
    f[i] = std::sqrt(std::abs(vt.dot(h * vt)));
    if (s.velocity_left) {
      Vec vl = s.velocity_left->tail(fol.q);
      fl[i] = std::sqrt(std::abs(vl.dot(h * vl)));
    } else {
      fl[i] = f[i];
    }
  }
  auto r = integrate_samples(curve.params, f, curve.breakpoints, fl);
  r.value = std::max(0.0, r.value);
  return r;
}

CurveSamples waterfall(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                       const TimeOrientation& orient, const CurveSamples& alpha, const Vec& z,
                       std::size_t pivot) {
  (void)gt;
  (void)orient;
  validate_curve(fol.base, alpha);
  const int p = fol.p, q = fol.q;
  const int chart = alpha.samples.front().chart;
  const Vec& a0 = alpha.samples.front().point;
  if (z.size() != fol.dim() || !fol.base.contains(chart, z))
    throw Error(ErrorCode::NotSameLeaf, "z is not a point of the starting chart");
  Vec d = fol.base.displacement(chart, a0, z);
  if (d.tail(q).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::NotSameLeaf, "z does not lie on the plaque of alpha's start");
  if (d.cwiseAbs().maxCoeff() == 0.0) return alpha;

  const std::size_t n = alpha.size();
  std::size_t k0 = pivot ? pivot : std::max<std::size_t>(1, (n - 1) / 4);
  k0 = std::min(k0, n - 1);
  for (std::size_t i = 1; i <= k0; ++i)
    if (alpha.samples[i].chart != chart)
      throw Error(ErrorCode::ChartChainNotFound, "alpha leaves the starting chart before the pivot");

  const double ta = alpha.params.front(), t0 = alpha.params[k0];
  Vec x0 = z.head(p);
  Vec dleaf = alpha.samples[k0].point.head(p) - x0;
  Vec leaf_vel = dleaf / (t0 - ta);

  CurveSamples beta;
  beta.params = alpha.params;
  beta.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = alpha.samples[i];
    if (i >= k0) {
      beta.samples[i] = s;
      continue;
    }
    CurveSample b;
    b.chart = chart;
    b.point.resize(p + q);
    b.point.head(p) = x0 + (alpha.params[i] - ta) / (t0 - ta) * dleaf;
    b.point.tail(q) = s.point.tail(q);
    b.velocity.resize(p + q);
    b.velocity.head(p) = leaf_vel;
    b.velocity.tail(q) = s.velocity.tail(q);
    if (s.velocity_left) {
      Vec vl(p + q);
      vl.head(p) = leaf_vel;
      vl.tail(q) = s.velocity_left->tail(q);
      b.velocity_left = vl;
    }
    if (!fol.base.contains(chart, b.point))
      throw Error(ErrorCode::ChartChainNotFound, "leaf segment leaves the chart");
    beta.samples[i] = std::move(b);
  }
  Vec vl(p + q);
  vl.head(p) = leaf_vel;
  vl.tail(q) = alpha.samples[k0].velocity_left ? alpha.samples[k0].velocity_left->tail(q)
                                               : alpha.samples[k0].velocity.tail(q);
  beta.samples[k0].velocity_left = vl;
  beta.breakpoints = alpha.breakpoints;
  if (std::find(beta.breakpoints.begin(), beta.breakpoints.end(), k0) == beta.breakpoints.end())
    beta.breakpoints.push_back(k0);
  std::sort(beta.breakpoints.begin(), beta.breakpoints.end());
  return beta;
}

CurveSamples lift_curve(const FoliatedAtlas& fol, const CurveSamples& base_curve, const Vec& start) {
  const int p = fol.p, q = fol.q;
  const std::size_t n = base_curve.size();
  if (n == 0 || base_curve.params.size() != n) throw Error(ErrorCode::InvalidCurve, "empty base curve");
  if (start.size() != fol.dim()) throw Error(ErrorCode::InvalidCurve, "start point has wrong arity");
  if ((start.tail(q) - base_curve.samples.front().point).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::NotSameLeaf, "start point does not lie over the base curve's start");

  CurveSamples out;
  out.params = base_curve.params;
  out.breakpoints = base_curve.breakpoints;
  out.samples.resize(n);
  Vec leaf = start.head(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = base_curve.samples[i];
    if (b.point.size() != q || b.velocity.size() != q)
      throw Error(ErrorCode::InvalidCurve, "base sample is not transverse");
    if (i > 0 && b.chart != out.samples[i - 1].chart) {
      const auto& prev = out.samples[i - 1];
      const Transition* tr = fol.base.find_transition(prev.chart, b.chart, prev.point);
      if (!tr) throw Error(ErrorCode::ChartChainNotFound, "no transition between base charts");
      leaf = tr->map(prev.point).head(p);
    }
    CurveSample s;
    s.chart = b.chart;
    s.point.resize(p + q);
    s.point.head(p) = leaf;
    s.point.tail(q) = b.point;
    s.velocity = Vec::Zero(p + q);
    s.velocity.tail(q) = b.velocity;
    if (b.velocity_left) {
      Vec vl = Vec::Zero(p + q);
      vl.tail(q) = *b.velocity_left;
      s.velocity_left = vl;
    }
    if (!fol.base.contains(s.chart, s.point))
      throw Error(ErrorCode::ChartChainNotFound, "lift leaves the chart cover at sample " + std::to_string(i));
    out.samples[i] = std::move(s);
  }
  return out;
}

std::vector<Vec> sample_unit_timelike(const Mat& g, const Vec& future_ref, int count, double chi_max, Rng& rng) {
  if (!(future_ref.dot(g * future_ref) < 0))
    throw Error(ErrorCode::NoTimelikeDirections, "reference vector is not timelike");
  Frame f = orthonormal_frame(g, future_ref);
  const Eigen::Index m = g.rows();
  std::uniform_real_distribution<double> uchi(0.0, chi_max);
  std::normal_distribution<double> gauss;
  std::vector<Vec> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    double chi = uchi(rng);
    Vec dir(m - 1);
    for (Eigen::Index i = 0; i < m - 1; ++i) dir[i] = gauss(rng);
    if (dir.norm() == 0.0) dir.setUnit(0);
    dir.normalize();
    Vec v = std::cosh(chi) * f.e.col(0);
    for (Eigen::Index i = 0; i < m - 1; ++i) v += std::sinh(chi) * dir[i] * f.e.col(i + 1);
    out.push_back(v);
  }
  return out;
}

bool check_transverse_time_orientability(const SuspensionSpec& spec, std::uint64_t seed) {
  std::vector<Vec> points = spec.probe_points;
  if (points.empty()) points.push_back(Vec::Zero(spec.model.dim()));
  Rng rng(seed);
  const int per_point = std::max<int>(1, 64 / static_cast<int>(points.size()));
  bool preserved = true;
  for (const auto& y : points) {
    Mat g = spec.model(y);
    Vec z = spec.map(y);
    Mat J = spec.differential(y);
    Mat gz = spec.model(z);
    Mat pulled = J.transpose() * gz * J;
    if ((pulled - g).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, g.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::NotAnIsometry, "holonomy map does not preserve the transverse model metric");
    Vec Xz = spec.time_ref(z);
    for (const auto& v : sample_unit_timelike(g, spec.time_ref(y), per_point, 3.0, rng))
      if (!((J * v).dot(gz * Xz) < 0)) preserved = false;
  }
  return preserved;
}

}  // namespace leafcausal
