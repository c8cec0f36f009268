#include "leafcausal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "leafcausal/parallel.hpp"

namespace leafcausal {

namespace {

struct PhasePoint {
  Vec x;
  Vec v;
};

Vec geodesic_accel(const MetricFn& metric, const Vec& x, const Vec& v, const DerivEngine& engine) {
  Christoffel gam = christoffel(metric, x, engine);
  Vec a(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) a[k] = -v.dot(gam[k] * v);
  return a;
}

std::optional<PhasePoint> rk4(const ChartAtlas& atlas, int chart, const PhasePoint& s, double h,
                              const DerivEngine& engine) {
  const MetricFn& m = atlas.chart(chart).metric;
  try {
    Vec k1x = s.v;
    Vec k1v = geodesic_accel(m, s.x, s.v, engine);
    Vec k2x = s.v + 0.5 * h * k1v;
    Vec k2v = geodesic_accel(m, s.x + 0.5 * h * k1x, k2x, engine);
    Vec k3x = s.v + 0.5 * h * k2v;
    Vec k3v = geodesic_accel(m, s.x + 0.5 * h * k2x, k3x, engine);
    Vec k4x = s.v + h * k3v;
    Vec k4v = geodesic_accel(m, s.x + h * k3x, k4x, engine);
    PhasePoint out{s.x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x), s.v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)};
    if (!out.x.allFinite() || !out.v.allFinite()) return std::nullopt;
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Moves to the neighbouring chart with the largest interior margin, if that
// improves on the current one.
void maybe_switch(const ChartAtlas& atlas, int& chart, PhasePoint& s, double margin) {
  double here = atlas.interior_margin(chart, s.x);
  if (here >= margin) return;
  const Transition* best = nullptr;
  double best_margin = here;
  for (const Transition* t : atlas.transitions_from(chart)) {
    if (t->domain && !t->domain(s.x)) continue;
    Vec y = t->map(s.x);
    if (!atlas.contains(t->to, y)) continue;
    double m = atlas.interior_margin(t->to, y);
    if (m > best_margin) {
      best_margin = m;
      best = t;
    }
  }
  if (!best) return;
  Mat J = best->jacobian(s.x);
  s.x = atlas.reduce(best->to, best->map(s.x));
  s.v = J * s.v;
  chart = best->to;
}

double speed(const ChartAtlas& atlas, int chart, const Vec& x, const Vec& v) {
  return std::sqrt(std::abs(v.dot(eval_metric(atlas, chart, x) * v)));
}

}  // namespace

GeodesicRun integrate_geodesic_run(const ChartAtlas& atlas, const GeodesicState& s0, double max_param,
                                   const DerivEngine& engine, const IntegratorConfig& cfg) {
  if (!atlas.contains(s0.chart, s0.point))
    throw Error(ErrorCode::PointOutsideChart, "initial point outside chart");
  int chart = s0.chart;
  PhasePoint s{atlas.reduce(chart, s0.point), s0.velocity};
  GeodesicRun run;
  const double q0 = s.v.dot(eval_metric(atlas, chart, s.x) * s.v);
  auto record = [&](double t) {
    run.curve.params.push_back(t);
    run.curve.samples.push_back({chart, s.x, s.v, std::nullopt});
    double q = s.v.dot(eval_metric(atlas, chart, s.x) * s.v);
    run.norm_drift = std::max(run.norm_drift, std::abs(q - q0));
    double len = run.proper_length.empty() ? s0.length : run.proper_length.back();
    if (!run.proper_length.empty()) {
      const auto& prev = run.curve.samples[run.curve.samples.size() - 2];
      double dt = t - run.curve.params[run.curve.params.size() - 2];
      len += 0.5 * dt * (speed(atlas, prev.chart, prev.point, prev.velocity) + std::sqrt(std::abs(q)));
    }
    run.proper_length.push_back(len);
  };
  double t = 0.0;
  record(t);
  std::size_t steps = 0;
  while (t < max_param * (1 - 1e-15) && steps++ < cfg.max_steps) {
    maybe_switch(atlas, chart, s, cfg.switch_margin);
    double h = std::min(cfg.step, max_param - t);
    std::optional<PhasePoint> next;
    for (;;) {
      next = rk4(atlas, chart, s, h, engine);
      if (next) break;
      h *= 0.5;
      if (h < cfg.min_step) throw Error(ErrorCode::StepUnderflow, "geodesic step underflow");
    }
    if (atlas.contains(chart, next->x)) {
      s = {atlas.reduce(chart, next->x), next->v};
      t += h;
      record(t);
      continue;
    }
    // land on the boundary: largest step that stays inside
    double lo = 0.0, hi = h;
    std::optional<PhasePoint> inside;
    for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, t); ++it) {
      double mid = 0.5 * (lo + hi);
      auto trial = rk4(atlas, chart, s, mid, engine);
      if (trial && atlas.contains(chart, trial->x)) {
        lo = mid;
        inside = trial;
      } else {
        hi = mid;
      }
    }
    if (inside && lo > 0.0) {
      s = {atlas.reduce(chart, inside->x), inside->v};
      t += lo;
      record(t);
    }
    run.left_domain = true;
    if (cfg.on_exit == ExitMode::Throw) {
      std::ostringstream os;
      os << "geodesic left the atlas at parameter " << t;
      throw Error(ErrorCode::LeftAtlas, os.str());
    }
    break;
  }
  return run;
}

CurveSamples integrate_geodesic(const ChartAtlas& atlas, const GeodesicState& s0, double max_param,
                                const DerivEngine& engine, const IntegratorConfig& cfg) {
  return integrate_geodesic_run(atlas, s0, max_param, engine, cfg).curve;
}

double check_horizontal(const FoliatedAtlas& fol, const ChartAtlas& g, const CurveSamples& curve) {
  double worst = 0.0;
  for (const auto& s : curve.samples) {
    SplitResult sp = split(fol, g, {s.chart, s.point, s.velocity});
    Mat G = eval_metric(g, s.chart, s.point);
    worst = std::max(worst, std::sqrt(std::abs(sp.vertical.dot(G * sp.vertical))));
  }
  return worst;
}

Vec horizontal_lift(const FoliatedAtlas& fol, const ChartAtlas& g, int chart, const Vec& x, const Vec& w) {
  const int p = fol.p, q = fol.q;
  Mat G = eval_metric(g, chart, x);
  Vec v(p + q);
  v.tail(q) = w;
  v.head(p) = -G.topLeftCorner(p, p).ldlt().solve(G.topRightCorner(p, q) * w);
  return v;
}

// --- focal scan ------------------------------------------------------------------

namespace {

struct JacobiSystem {
  const MetricFn* metric;
  DerivEngine engine;
  int q;
  int m;  // q - 1 Jacobi fields

  // layout: γ | γ' | J_1..J_m | δv_1..δv_m | E_1..E_m
  Eigen::Index size() const { return q * (2 + 3 * m); }

  Vec rhs(const Vec& y) const {
    Vec x = y.segment(0, q), v = y.segment(q, q);
    MetricJet jet = metric_jet(*metric, x, engine, true);
    Christoffel gam = christoffel_from_jet(jet);
    std::vector<Christoffel> dgam = christoffel_gradient(jet);
    Vec out(size());
    out.segment(0, q) = v;
    for (int k = 0; k < q; ++k) out[q + k] = -v.dot(gam[k] * v);
    for (int j = 0; j < m; ++j) {
      Vec J = y.segment(2 * q + j * q, q);
      Vec dv = y.segment(2 * q + (m + j) * q, q);
      Vec E = y.segment(2 * q + (2 * m + j) * q, q);
      out.segment(2 * q + j * q, q) = dv;
      Vec acc(q), dE(q);
      for (int k = 0; k < q; ++k) {
        double s = -2.0 * v.dot(gam[k] * dv);
        for (int mm = 0; mm < q; ++mm) s -= J[mm] * v.dot(dgam[mm][k] * v);
        acc[k] = s;
        dE[k] = -v.dot(gam[k] * E);
      }
      out.segment(2 * q + (m + j) * q, q) = acc;
      out.segment(2 * q + (2 * m + j) * q, q) = dE;
    }
    return out;
  }

  Vec step(const Vec& y, double h) const {
    Vec k1 = rhs(y);
    Vec k2 = rhs(y + 0.5 * h * k1);
    Vec k3 = rhs(y + 0.5 * h * k2);
    Vec k4 = rhs(y + h * k3);
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }

  // A_ij = h(J_j, E_i), A'_ij = h(DJ_j/ds, E_i)
  std::pair<Mat, Mat> frame_matrices(const Vec& y) const {
    Vec x = y.segment(0, q), v = y.segment(q, q);
    Mat H = (*metric)(VecX<double>(x));
    Christoffel gam = christoffel(*metric, x, engine);
    Mat A(m, m), Ad(m, m);
    for (int j = 0; j < m; ++j) {
      Vec J = y.segment(2 * q + j * q, q);
      Vec DJ = y.segment(2 * q + (m + j) * q, q);
      for (int k = 0; k < q; ++k) DJ[k] += v.dot(gam[k] * J);
      for (int i = 0; i < m; ++i) {
        Vec E = y.segment(2 * q + (2 * m + i) * q, q);
        A(i, j) = E.dot(H * J);
        Ad(i, j) = E.dot(H * DJ);
      }
    }
    return {A, Ad};
  }
};

}  // namespace

FocalScanResult focal_scan(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                           int chart, const Vec& leaf_point, const Vec& direction, double max_param,
                           const DerivEngine& engine, const FocalConfig& cfg) {
  const int p = fol.p, q = fol.q;
  Mat G = eval_metric(g, chart, leaf_point);
  double scale = std::max({1.0, G.cwiseAbs().maxCoeff(), direction.cwiseAbs().maxCoeff()});
  Vec leaf_part = (G * direction).head(p);
  if (leaf_part.cwiseAbs().maxCoeff() > 1e-9 * scale * scale)
    throw Error(ErrorCode::NotNormal, "direction is not orthogonal to the leaf");
  if (!(direction.dot(G * direction) < -kCausalTol * scale * scale))
    throw Error(ErrorCode::NotTimelike, "direction is not timelike");

  ChartAtlas quot = quotient_atlas(fol, gt);
  JacobiSystem sys{&quot.chart(chart).metric, engine, q, q - 1};
  Vec y0 = fol.transverse(chart, leaf_point);
  Mat H = quot.chart(chart).metric(VecX<double>(y0));
  Vec w = direction.tail(q);
  w /= std::sqrt(-w.dot(H * w));
  Frame fr = orthonormal_frame(H, w);

  Vec y = Vec::Zero(sys.size());
  y.segment(0, q) = y0;
  y.segment(q, q) = w;
  for (int j = 0; j < sys.m; ++j) {
    y.segment(2 * q + (sys.m + j) * q, q) = fr.e.col(j + 1);
    y.segment(2 * q + (2 * sys.m + j) * q, q) = fr.e.col(j + 1);
  }

  FocalScanResult res;
  double s = 0.0, h = cfg.initial_step;
  double prev_det = 0.0;
  double prev_s = 0.0;
  auto emit = [&](const Vec& state) {
    auto [A, Ad] = sys.frame_matrices(state);
    FocalSample fs;
    fs.s = s;
    fs.det = A.determinant();
    fs.riccati = A.partialPivLu().solve(Ad).trace();
    fs.scalar_jacobi = std::pow(std::abs(fs.det), 1.0 / sys.m);
    if (!res.first_zero_param && !res.samples.empty() && prev_det != 0.0 && (fs.det > 0) != (prev_det > 0))
      res.first_zero_param = prev_s + (s - prev_s) * prev_det / (prev_det - fs.det);
    prev_det = fs.det;
    prev_s = s;
    res.samples.push_back(fs);
    res.final_a = A;
  };

  auto inside = [&](const Vec& state) { return quot.contains(chart, state.segment(0, q)); };
  while (s < max_param * (1 - 1e-15)) {
    h = std::min(h, max_param - s);
    Vec full, half;
    try {
      full = sys.step(y, h);
      half = sys.step(sys.step(y, 0.5 * h), 0.5 * h);
    } catch (const Error&) {
      full = half = Vec::Constant(sys.size(), std::nan(""));
    }
    if (!full.allFinite() || !half.allFinite() || !inside(half)) {
      // shrink towards the boundary; stop once the step is negligible
      if (h < 1e-9) {
        res.domain_end = true;
        break;
      }
      h *= 0.5;
      continue;
    }
    double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    double tol = cfg.tol * std::max(1.0, half.cwiseAbs().maxCoeff());
    if (err > tol && h > 1e-12) {
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
      continue;
    }
    y = half;
    y.segment(0, q) = quot.reduce(chart, y.segment(0, q));
    s += h;
    emit(y);
    double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
    h = std::min(cfg.max_step, h * std::clamp(grow, 0.2, 4.0));
  }
  res.end_param = s;
  return res;
}

// --- shooting ---------------------------------------------------------------------

namespace {

struct Ray {
  double length = -1.0;
  CurveSamples curve;
};

Ray shoot_one(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
              const TimeOrientation& orient, const LeafStart& st, const Vec& spatial, double chi,
              const ShootConfig& cfg, const DerivEngine& engine) {
  const int q = fol.q;
  Mat H = transverse_matrix(fol, gt, st.chart, st.point);
  Vec ref = orient.field[st.chart](st.point).tail(q);
  Frame fr = orthonormal_frame(H, ref);
  Vec w = std::cosh(chi) * fr.e.col(0);
  for (int i = 0; i < q - 1; ++i) w += std::sinh(chi) * spatial[i] * fr.e.col(i + 1);
  Vec v = horizontal_lift(fol, g, st.chart, st.point, w);
  GeodesicRun run = integrate_geodesic_run(g, {st.chart, st.point, v, 0.0}, cfg.max_param, engine, cfg.integrator);
  Ray r;
  if (run.curve.size() < 2) {
    r.length = 0.0;
    return r;
  }
  r.length = transverse_length(fol, gt, run.curve).value;
  r.curve = std::move(run.curve);
  return r;
}

}  // namespace

DiameterEstimate shoot_diameter(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                                const TimeOrientation& orient, const std::vector<LeafStart>& starts,
                                const ShootConfig& cfg, const DerivEngine& engine) {
  if (starts.empty() || cfg.boosts.empty() || cfg.spatial_directions <= 0)
    throw Error(ErrorCode::EmptyGrid, "shooting grid is empty");
  const int q = fol.q;
  std::vector<Vec> spatial;
  if (q == 2) {
    spatial.push_back(Vec::Constant(1, 1.0));
    if (cfg.spatial_directions > 1) spatial.push_back(Vec::Constant(1, -1.0));
  } else {
    Rng rng(cfg.seed);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < cfg.spatial_directions; ++k) {
      Vec d(q - 1);
      for (int i = 0; i < q - 1; ++i) d[i] = gauss(rng);
      spatial.push_back(d.normalized());
    }
  }
  const std::size_t nb = cfg.boosts.size(), nd = spatial.size();
  const std::size_t total = starts.size() * nd * nb;
  std::vector<double> lengths(total, -1.0);
  parallel_for(total, [&](std::size_t idx) {
    std::size_t c = idx % nb, d = (idx / nb) % nd, k = idx / (nb * nd);
    lengths[idx] = shoot_one(fol, gt, g, orient, starts[k], spatial[d], cfg.boosts[c], cfg, engine).length;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < total; ++i)
    if (lengths[i] > lengths[best]) best = i;
  std::size_t bc = best % nb, bd = (best / nb) % nd, bk = best / (nb * nd);

  double best_chi = cfg.boosts[bc];
  Ray best_ray = shoot_one(fol, gt, g, orient, starts[bk], spatial[bd], best_chi, cfg, engine);

  // golden-section refinement on the boost inside the neighbouring cells
  double a = bc > 0 ? cfg.boosts[bc - 1] : cfg.boosts[bc];
  double b = bc + 1 < nb ? cfg.boosts[bc + 1] : cfg.boosts[bc];
  if (b > a && cfg.refine_iterations > 0) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto L = [&](double chi) { return shoot_one(fol, gt, g, orient, starts[bk], spatial[bd], chi, cfg, engine); };
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    Ray r1 = L(x1), r2 = L(x2);
    for (int it = 0; it < cfg.refine_iterations && b - a > 1e-9; ++it) {
      if (r1.length >= r2.length) {
        b = x2;
        x2 = x1;
        r2 = std::move(r1);
        x1 = b - phi * (b - a);
        r1 = L(x1);
      } else {
        a = x1;
        x1 = x2;
        r1 = std::move(r2);
        x2 = a + phi * (b - a);
        r2 = L(x2);
      }
    }
    if (r1.length > best_ray.length) best_ray = std::move(r1), best_chi = x1;
    if (r2.length > best_ray.length) best_ray = std::move(r2), best_chi = x2;
  }

  DiameterEstimate est;
  est.method = DiameterMethod::Shooting;
  est.value = std::max(0.0, best_ray.length);
  est.witness = std::move(best_ray.curve);
  est.open_domain = true;
  std::ostringstream chi;
  chi.precision(12);
  chi << best_chi;
  est.parameters["starts"] = std::to_string(starts.size());
  est.parameters["boosts"] = std::to_string(nb);
  est.parameters["spatial_directions"] = std::to_string(nd);
  est.parameters["best_start"] = std::to_string(bk);
  est.parameters["best_boost"] = chi.str();
  est.parameters["seed"] = std::to_string(cfg.seed);
  return est;
}

}  // namespace leafcausal
