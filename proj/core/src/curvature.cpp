#include "leafcausal/curvature.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "leafcausal/parallel.hpp"

namespace leafcausal {

namespace {

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat inverse_checked(const Mat& g) {
  Eigen::FullPivLU<Mat> lu(g);
  double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  lu.setThreshold(1e-13);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300)
    throw Error(ErrorCode::SingularMetric, "metric not invertible");
  Mat inv = lu.inverse();
  if (!inv.allFinite() || (g * inv - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw Error(ErrorCode::SingularMetric, "metric ill-conditioned");
  return inv;
}

MetricJet jet_dual(const MetricFn& metric, const Vec& x, bool second) {
  const Eigen::Index n = x.size();
  MetricJet jet;
  jet.dg.assign(n, Mat::Zero(n, n));
  if (!second) {
    for (Eigen::Index k = 0; k < n; ++k) {
      VecX<Dual1> xd(n);
      for (Eigen::Index m = 0; m < n; ++m) xd[m] = make_dual(x[m], m == k ? 1.0 : 0.0);
      MatX<Dual1> g = metric(xd);
      if (k == 0) jet.g = g.unaryExpr([](const Dual1& a) { return a.v; });
      jet.dg[k] = g.unaryExpr([](const Dual1& a) { return a.d; });
    }
    if (n == 0) jet.g = metric(VecX<double>(x));
    return jet;
  }
  jet.ddg.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k; l < n; ++l) {
      VecX<Dual2> xd(n);
      for (Eigen::Index m = 0; m < n; ++m) xd[m] = make_dual2(x[m], m == k ? 1.0 : 0.0, m == l ? 1.0 : 0.0);
      MatX<Dual2> g = metric(xd);
      if (k == 0 && l == 0) jet.g = g.unaryExpr([](const Dual2& a) { return a.v.v; });
      if (k == l) jet.dg[k] = g.unaryExpr([](const Dual2& a) { return a.d.v; });
      jet.ddg[k][l] = g.unaryExpr([](const Dual2& a) { return a.d.d; });
      jet.ddg[l][k] = jet.ddg[k][l];
    }
  return jet;
}

MetricJet jet_fd(const MetricFn& metric, const Vec& x, const DerivEngine& e, bool second) {
  const Eigen::Index n = x.size();
  auto g_at = [&](const Vec& y) { return Mat(metric(VecX<double>(y))); };
  MetricJet jet;
  jet.g = g_at(x);
  auto d1 = [&](Eigen::Index k, double h) {
    Vec a = x, b = x;
    a[k] += h;
    b[k] -= h;
    return Mat((g_at(a) - g_at(b)) / (2 * h));
  };
  auto d2 = [&](Eigen::Index k, Eigen::Index l, double h) {
    if (k == l) {
      Vec a = x, b = x;
      a[k] += h;
      b[k] -= h;
      return Mat((g_at(a) - 2 * jet.g + g_at(b)) / (h * h));
    }
    Vec pp = x, pm = x, mp = x, mm = x;
    pp[k] += h, pp[l] += h;
    pm[k] += h, pm[l] -= h;
    mp[k] -= h, mp[l] += h;
    mm[k] -= h, mm[l] -= h;
    return Mat((g_at(pp) - g_at(pm) - g_at(mp) + g_at(mm)) / (4 * h * h));
  };
  const double h = e.fd_step;
  jet.dg.resize(n);
  for (Eigen::Index k = 0; k < n; ++k)
    jet.dg[k] = e.richardson ? Mat((4 * d1(k, h / 2) - d1(k, h)) / 3) : d1(k, h);
  if (second) {
    jet.ddg.assign(n, std::vector<Mat>(n));
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index l = k; l < n; ++l) {
        jet.ddg[k][l] = e.richardson ? Mat((4 * d2(k, l, h / 2) - d2(k, l, h)) / 3) : d2(k, l, h);
        jet.ddg[l][k] = jet.ddg[k][l];
      }
  }
  return jet;
}

}  // namespace

void DerivEngine::validate() const {
  if (mode == DerivMode::CentralFd && !(fd_step >= 1e-7 && fd_step <= 1e-3))
    throw Error(ErrorCode::InvalidAtlas, "fd_step must lie in [1e-7, 1e-3]");
}

MetricJet metric_jet(const MetricFn& metric, const Vec& x, const DerivEngine& engine, bool second) {
  engine.validate();
  MetricJet jet = engine.mode == DerivMode::ForwardDual ? jet_dual(metric, x, second)
                                                          : jet_fd(metric, x, engine, second);
  if (!jet.g.allFinite()) throw Error(ErrorCode::NonFiniteCoefficient, "metric not finite");
  jet.g = sym(jet.g);
  for (auto& d : jet.dg) d = sym(d);
  for (auto& row : jet.ddg)
    for (auto& d : row) d = sym(d);
  return jet;
}

Christoffel christoffel_from_jet(const MetricJet& jet) {
  const Eigen::Index n = jet.g.rows();
  Mat ginv = inverse_checked(jet.g);
  // lowered symbols Γ_{l,ij}
  std::vector<Mat> low(n, Mat::Zero(n, n));
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        low[l](i, j) = 0.5 * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
  Christoffel gam(n, Mat::Zero(n, n));
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l)
      if (ginv(k, l) != 0.0) gam[k] += ginv(k, l) * low[l];
  for (auto& m : gam) m = sym(m);
  return gam;
}

Christoffel christoffel(const MetricFn& metric, const Vec& x, const DerivEngine& engine) {
  return christoffel_from_jet(metric_jet(metric, x, engine, false));
}

std::vector<Christoffel> christoffel_gradient(const MetricJet& jet) {
  const Eigen::Index n = jet.g.rows();
  if (static_cast<Eigen::Index>(jet.ddg.size()) != n)
    throw Error(ErrorCode::InvalidAtlas, "second derivatives missing from metric jet");
  Mat ginv = inverse_checked(jet.g);
  std::vector<Christoffel> dgam(n, Christoffel(n, Mat::Zero(n, n)));
  for (Eigen::Index m = 0; m < n; ++m) {
    Mat dginv = -ginv * jet.dg[m] * ginv;
    for (Eigen::Index d = 0; d < n; ++d) {
      Mat low(n, n), dlow(n, n);
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index c = 0; c < n; ++c) {
          low(b, c) = 0.5 * (jet.dg[b](c, d) + jet.dg[c](b, d) - jet.dg[d](b, c));
          dlow(b, c) = 0.5 * (jet.ddg[m][b](c, d) + jet.ddg[m][c](b, d) - jet.ddg[m][d](b, c));
        }
      for (Eigen::Index a = 0; a < n; ++a) dgam[m][a] += dginv(a, d) * low + ginv(a, d) * dlow;
    }
  }
  return dgam;
}

CurvatureAtPoint curvature_at(const MetricFn& metric, const Vec& x, const DerivEngine& engine) {
  MetricJet jet = metric_jet(metric, x, engine, true);
  const Eigen::Index n = jet.g.rows();
  Mat ginv = inverse_checked(jet.g);
  Christoffel gam = christoffel_from_jet(jet);
  std::vector<Christoffel> dgam = christoffel_gradient(jet);

  // Ric_bd = ∂_a Γ^a_{db} − ∂_d Γ^a_{ab} + Γ^a_{ae} Γ^e_{db} − Γ^a_{de} Γ^e_{ab}
  Mat ric = Mat::Zero(n, n);
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index d = 0; d < n; ++d) {
      double s = 0.0;
      for (Eigen::Index a = 0; a < n; ++a) {
        s += dgam[a][a](d, b) - dgam[d][a](a, b);
        for (Eigen::Index e = 0; e < n; ++e) s += gam[a](a, e) * gam[e](d, b) - gam[a](d, e) * gam[e](a, b);
      }
      ric(b, d) = s;
    }
  CurvatureAtPoint out;
  out.christoffel = std::move(gam);
  out.ricci = sym(ric);
  out.scalar = (ginv * out.ricci).trace();
  return out;
}

Mat ricci(const MetricFn& metric, const Vec& x, const DerivEngine& engine) {
  return curvature_at(metric, x, engine).ricci;
}

Christoffel christoffel(const ChartAtlas& atlas, int chart, const Vec& x, const DerivEngine& engine) {
  if (!atlas.contains(chart, x)) throw Error(ErrorCode::PointOutsideChart, "point outside chart");
  return christoffel(atlas.chart(chart).metric, atlas.reduce(chart, x), engine);
}

Mat ricci(const ChartAtlas& atlas, int chart, const Vec& x, const DerivEngine& engine) {
  if (!atlas.contains(chart, x)) throw Error(ErrorCode::PointOutsideChart, "point outside chart");
  return ricci(atlas.chart(chart).metric, atlas.reduce(chart, x), engine);
}

Mat transverse_ricci_matrix(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart,
                            const Vec& x, const DerivEngine& engine) {
  if (!fol.base.contains(chart, x)) throw Error(ErrorCode::PointOutsideChart, "point outside chart");
  return ricci(gt.h[chart], fol.transverse(chart, x), engine);
}

double transverse_ricci(const FoliatedAtlas& fol, const TransverseMetricField& gt, int chart, const Vec& x,
                        const Vec& v, const Vec& w, const DerivEngine& engine) {
  Vec vt = v.tail(fol.q), wt = w.tail(fol.q);
  if (vt.cwiseAbs().maxCoeff() == 0.0 || wt.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Mat r = transverse_ricci_matrix(fol, gt, chart, x, engine);
  return vt.dot(r * wt);
}

double warped_ricci_closed_form(const WarpedPointData& d, const Vec& t_v, const Vec& t_h) {
  if (!(d.f > 0)) throw Error(ErrorCode::ZeroWarping, "warping function must be positive");
  const double p = d.p;
  double fsharp = d.lap_f / d.f + (p - 1.0) * d.grad_f.dot(d.g_b * d.grad_f) / (d.f * d.f);
  double gvv = d.f * d.f * t_v.dot(d.g_f * t_v);
  return t_v.dot(d.ric_f * t_v) - gvv * fsharp + t_h.dot(d.ric_b * t_h) - p / d.f * t_h.dot(d.hess_f * t_h);
}

std::vector<Vec> unit_timelike_directions(const Mat& g, const Vec& future_ref, int count, double chi_max,
                                          std::uint64_t seed) {
  if (!(future_ref.dot(g * future_ref) < 0))
    throw Error(ErrorCode::NoTimelikeDirections, "no timelike reference direction");
  Frame f = orthonormal_frame(g, future_ref);
  if (negative_eigenvalues(g) != 1) throw Error(ErrorCode::NoTimelikeDirections, "form is not Lorentzian");
  const Eigen::Index m = g.rows();
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Vec> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    // boosts stratified in [0, chi_max], endpoint included
    double chi = count > 1 ? chi_max * k / (count - 1.0) : 0.0;
    Vec dir(m - 1);
    for (Eigen::Index i = 0; i < m - 1; ++i) dir[i] = gauss(rng);
    if (m > 1) {
      if (dir.norm() == 0.0) dir.setUnit(0);
      dir.normalize();
    }
    Vec v = std::cosh(chi) * f.e.col(0);
    for (Eigen::Index i = 0; i < m - 1; ++i) v += std::sinh(chi) * dir[i] * f.e.col(i + 1);
    out.push_back(v);
  }
  return out;
}

RicciBoundReport scan_ricci_bound(const ChartAtlas& atlas, int chart,
                                  const std::function<Vec(const Vec&)>& future_ref, const RicciForm& form,
                                  double C, double factor, const ScanConfig& cfg) {
  if (cfg.points.empty() || cfg.directions <= 0)
    throw Error(ErrorCode::EmptyGrid, "ricci scan needs points and directions");
  struct Best {
    double value = std::numeric_limits<double>::infinity();
    int dir = -1;
    Vec v;
  };
  std::vector<Best> best(cfg.points.size());
  parallel_for(cfg.points.size(), [&](std::size_t i) {
    const Vec& x = cfg.points[i];
    Mat g = eval_metric(atlas, chart, x);
    auto dirs = unit_timelike_directions(g, future_ref(x), cfg.directions, cfg.chi_max, cfg.seed + 7919 * i);
    for (int k = 0; k < cfg.directions; ++k) {
      double val = form(x, dirs[k]);
      if (val < best[i].value) best[i] = {val, k, dirs[k]};
    }
  });
  RicciBoundReport rep;
  rep.C = C;
  rep.factor = factor;
  rep.chi_max = cfg.chi_max;
  rep.seed = cfg.seed;
  rep.point_count = cfg.points.size();
  rep.direction_count = static_cast<std::size_t>(cfg.directions);
  rep.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < best.size(); ++i)
    if (best[i].value < rep.min_value) {
      rep.min_value = best[i].value;
      rep.argmin_point = cfg.points[i];
      rep.argmin_direction = best[i].v;
      rep.argmin_index = i * cfg.directions + best[i].dir;
    }
  return rep;
}

RicciBoundReport scan_ricci_bound(const ChartAtlas& atlas, int chart,
                                  const std::function<Vec(const Vec&)>& future_ref, double C, double factor,
                                  const ScanConfig& cfg, const DerivEngine& engine) {
  auto form = [&](const Vec& x, const Vec& v) {
    Mat r = ricci(atlas, chart, x, engine);
    return v.dot(r * v);
  };
  return scan_ricci_bound(atlas, chart, future_ref, form, C, factor, cfg);
}

RicciBoundReport scan_transverse_ricci_bound(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                             const TimeOrientation& orient, int chart, double C,
                                             double factor, const ScanConfig& cfg, const DerivEngine& engine) {
  ChartAtlas quot = quotient_atlas(fol, gt);
  const Chart& c = fol.base.chart(chart);
  // lift a transverse point to the chart to read the reference field
  Vec leaf(fol.p);
  for (int i = 0; i < fol.p; ++i) {
    const auto& iv = c.box[i];
    leaf[i] = iv.finite() ? 0.5 * (iv.lo + iv.hi) : (std::isfinite(iv.lo) ? iv.lo + 1 : 0.0);
  }
  auto ref = [&](const Vec& y) {
    Vec x(fol.dim());
    x.head(fol.p) = leaf;
    x.tail(fol.q) = y;
    return Vec(orient.field[chart](x).tail(fol.q));
  };
  auto form = [&](const Vec& y, const Vec& v) {
    Mat r = ricci(quot, chart, y, engine);
    return v.dot(r * v);
  };
  return scan_ricci_bound(quot, chart, ref, form, C, factor, cfg);
}

}  // namespace leafcausal
