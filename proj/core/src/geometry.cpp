#include "leafcausal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace leafcausal {

namespace {

double wrap(double x, double lo, double period) {
  double r = std::fmod(x - lo, period);
  if (r < 0) r += period;
  if (r >= period) r = 0.0;  // fmod rounding at the seam
  return lo + r;
}

bool is_pivot(const Chart& c, int axis) {
  if (!c.lattice) return false;
  if (c.lattice->pivots.empty()) return true;
  const auto& p = c.lattice->pivots;
  return std::find(p.begin(), p.end(), axis) != p.end();
}

// Composite Simpson on an arbitrary strictly increasing grid.
double simpson(const double* x, const double* f, std::size_t n) {
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
  double s = 0.0;
  std::size_t m = n - 1;  // intervals
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    double h0 = x[i + 1] - x[i];
    double h1 = x[i + 2] - x[i + 1];
    double hs = h0 + h1;
    s += hs / 6.0 *
         ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i < m) {
    // odd interval count: quadratic through the last three points over the last interval
    double h0 = x[m - 1] - x[m - 2];
    double h1 = x[m] - x[m - 1];
    double alpha = (2 * h1 * h1 + 3 * h0 * h1) / (6 * (h0 + h1));
    double beta = (h1 * h1 + 3 * h1 * h0) / (6 * h0);
    double eta = h1 * h1 * h1 / (6 * h0 * (h0 + h1));
    s += alpha * f[m] + beta * f[m - 1] - eta * f[m - 2];
  }
  return s;
}

double trapezoid(const double* x, const double* f, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
  return s;
}

std::string fmt_point(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

// --- ChartAtlas -------------------------------------------------------------

ChartAtlas::ChartAtlas(int dim, std::vector<Chart> charts, std::vector<Transition> transitions)
    : dim_(dim), charts_(std::move(charts)), transitions_(std::move(transitions)) {
  if (dim_ < 1) throw Error(ErrorCode::InvalidAtlas, "dimension must be positive");
  if (charts_.empty()) throw Error(ErrorCode::InvalidAtlas, "atlas has no charts");
  for (const auto& c : charts_) {
    if (static_cast<int>(c.box.size()) != dim_)
      throw Error(ErrorCode::InvalidAtlas, "chart " + c.name + " box has wrong arity");
    for (const auto& iv : c.box) {
      if (!(iv.lo < iv.hi)) throw Error(ErrorCode::InvalidAtlas, "empty box in chart " + c.name);
      if (iv.periodic && !iv.finite())
        throw Error(ErrorCode::InvalidAtlas, "periodic axis without finite period in " + c.name);
    }
    if (!c.metric || c.metric.dim() != dim_)
      throw Error(ErrorCode::InvalidAtlas, "chart " + c.name + " has no metric of matching size");
    if (c.lattice && c.lattice->pivots.empty()) {
      const auto& B = c.lattice->basis;
      if (B.rows() != dim_ || B.cols() != dim_ || std::abs(B.determinant()) < 1e-12)
        throw Error(ErrorCode::InvalidAtlas, "parallelepiped lattice needs a full-rank square basis in " + c.name);
      for (const auto& iv : c.box)
        if (!iv.periodic) throw Error(ErrorCode::InvalidAtlas, "parallelepiped lattice needs periodic axes in " + c.name);
    } else if (c.lattice) {
      const auto& L = *c.lattice;
      if (L.basis.rows() != dim_ || L.basis.cols() != static_cast<Eigen::Index>(L.pivots.size()))
        throw Error(ErrorCode::InvalidAtlas, "lattice shape mismatch in " + c.name);
      for (std::size_t k = 0; k < L.pivots.size(); ++k) {
        int p = L.pivots[k];
        const auto& iv = c.box[p];
        if (!iv.periodic || std::abs(iv.period() - L.basis(p, k)) > 1e-12)
          throw Error(ErrorCode::InvalidAtlas, "lattice pivot must span its periodic box axis");
        for (std::size_t j = k + 1; j < L.pivots.size(); ++j)
          if (L.basis(p, j) != 0.0)
            throw Error(ErrorCode::InvalidAtlas, "lattice basis must be triangular in its pivots");
      }
    }
  }
  for (const auto& t : transitions_) {
    if (t.from < 0 || t.from >= chart_count() || t.to < 0 || t.to >= chart_count())
      throw Error(ErrorCode::InvalidAtlas, "transition references unknown chart");
    if (!t.map || !t.jacobian) throw Error(ErrorCode::InvalidAtlas, "transition lacks map");
  }
}

const Chart& ChartAtlas::chart(int id) const {
  if (id < 0 || id >= chart_count())
    throw Error(ErrorCode::PointOutsideChart, "unknown chart id " + std::to_string(id));
  return charts_[id];
}

Vec ChartAtlas::reduce(int chart_id, Vec x) const {
  const Chart& c = chart(chart_id);
  if (c.lattice && c.lattice->pivots.empty()) {
    const Mat& B = c.lattice->basis;
    Vec lo(dim_);
    for (int i = 0; i < dim_; ++i) lo[i] = c.box[i].lo;
    Vec k = B.partialPivLu().solve(x - lo);
    for (int i = 0; i < dim_; ++i) {
      k[i] -= std::floor(k[i]);
      if (k[i] >= 1.0) k[i] = 0.0;
    }
    return lo + B * k;
  }
  if (c.lattice) {
    const auto& L = *c.lattice;
    for (std::size_t k = 0; k < L.pivots.size(); ++k) {
      int p = L.pivots[k];
      double per = L.basis(p, k);
      double n = std::floor((x[p] - c.box[p].lo) / per);
      if (n != 0.0) x -= n * L.basis.col(k);
      x[p] = wrap(x[p], c.box[p].lo, per);
    }
  }
  for (int i = 0; i < dim_; ++i) {
    const auto& iv = c.box[i];
    if (iv.periodic && !is_pivot(c, i)) x[i] = wrap(x[i], iv.lo, iv.period());
  }
  return x;
}

bool ChartAtlas::contains(int chart_id, const Vec& x) const {
  if (x.size() != dim_) return false;
  const Chart& c = chart(chart_id);
  if (!x.allFinite()) return false;
  Vec r = reduce(chart_id, x);
  for (int i = 0; i < dim_; ++i) {
    const auto& iv = c.box[i];
    if (iv.periodic) continue;
    if (!(r[i] > iv.lo && r[i] < iv.hi)) return false;
  }
  if (c.excluded && c.excluded(r)) return false;
  return true;
}

Vec ChartAtlas::displacement(int chart_id, const Vec& a, const Vec& b) const {
  const Chart& c = chart(chart_id);
  Vec d = b - a;
  if (c.lattice && c.lattice->pivots.empty()) {
    const Mat& B = c.lattice->basis;
    Vec k = B.partialPivLu().solve(d);
    for (int i = 0; i < dim_; ++i) k[i] -= std::round(k[i]);
    return B * k;
  }
  if (c.lattice) {
    const auto& L = *c.lattice;
    for (std::size_t k = 0; k < L.pivots.size(); ++k) {
      int p = L.pivots[k];
      double n = std::round(d[p] / L.basis(p, k));
      if (n != 0.0) d -= n * L.basis.col(k);
    }
  }
  for (int i = 0; i < dim_; ++i) {
    const auto& iv = c.box[i];
    if (iv.periodic && !is_pivot(c, i)) d[i] -= std::round(d[i] / iv.period()) * iv.period();
  }
  return d;
}

double ChartAtlas::interior_margin(int chart_id, const Vec& x) const {
  const Chart& c = chart(chart_id);
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) {
    const auto& iv = c.box[i];
    if (iv.periodic) continue;
    m = std::min({m, x[i] - iv.lo, iv.hi - x[i]});
  }
  return m;
}

const Transition* ChartAtlas::find_transition(int from, int to, const Vec& x) const {
  for (const auto& t : transitions_)
    if (t.from == from && t.to == to && (!t.domain || t.domain(x))) return &t;
  return nullptr;
}

std::vector<const Transition*> ChartAtlas::transitions_from(int from) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions_)
    if (t.from == from) out.push_back(&t);
  return out;
}

ChartAtlas ChartAtlas::with_metrics(const std::vector<MetricFn>& metrics) const {
  if (static_cast<int>(metrics.size()) != chart_count())
    throw Error(ErrorCode::InvalidAtlas, "metric count does not match chart count");
  auto charts = charts_;
  for (std::size_t i = 0; i < charts.size(); ++i) charts[i].metric = metrics[i];
  return ChartAtlas(dim_, std::move(charts), transitions_);
}

// --- pointwise operations ----------------------------------------------------

std::string_view to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
    case CausalClass::Spacelike: return "spacelike";
  }
  return "?";
}

Mat eval_metric(const ChartAtlas& atlas, int chart_id, const Vec& x) {
  if (!atlas.contains(chart_id, x))
    throw Error(ErrorCode::PointOutsideChart,
                "point " + fmt_point(x) + " outside chart " + atlas.chart(chart_id).name);
  Mat g = atlas.chart(chart_id).metric(atlas.reduce(chart_id, x));
  if (!g.allFinite())
    throw Error(ErrorCode::NonFiniteCoefficient, "metric not finite at " + fmt_point(x));
  return 0.5 * (g + g.transpose());
}

Vec normalize_max_abs(const Vec& v) {
  double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return v;
  return v / m;
}

CausalClass classify_value(double q, bool is_zero, double tol) {
  if (is_zero) return CausalClass::Spacelike;
  if (q < -tol) return CausalClass::Timelike;
  if (std::abs(q) <= tol) return CausalClass::Lightlike;
  return CausalClass::Spacelike;
}

CausalClass classify(const ChartAtlas& atlas, const TangentVector& v, double tol) {
  Mat g = eval_metric(atlas, v.chart, v.base);
  Vec u = normalize_max_abs(v.comps);
  bool zero = v.comps.cwiseAbs().maxCoeff() == 0.0;
  return classify_value(u.dot(g * u), zero, tol);
}

double inner(const ChartAtlas& atlas, const TangentVector& v, const TangentVector& w) {
  if (v.chart != w.chart || v.base.size() != w.base.size() ||
      atlas.displacement(v.chart, v.base, w.base).cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorCode::BasePointMismatch, "vectors live at different points");
  Mat g = eval_metric(atlas, v.chart, v.base);
  return v.comps.dot(g * w.comps);
}

// --- curves and quadrature ---------------------------------------------------

void validate_curve(const ChartAtlas& atlas, const CurveSamples& curve, double velocity_tol) {
  const auto n = curve.samples.size();
  if (curve.params.size() != n) throw Error(ErrorCode::InvalidCurve, "params/samples size mismatch");
  if (n < 2) throw Error(ErrorCode::InvalidCurve, "curve needs at least two samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(curve.params[i] > curve.params[i - 1]))
      throw Error(ErrorCode::InvalidCurve, "params not strictly increasing at " + std::to_string(i));
  for (auto b : curve.breakpoints)
    if (b >= n) throw Error(ErrorCode::InvalidCurve, "breakpoint index out of range");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = curve.samples[i];
    if (s.point.size() != atlas.dim() || s.velocity.size() != atlas.dim())
      throw Error(ErrorCode::InvalidCurve, "sample arity mismatch at " + std::to_string(i));
    if (!atlas.contains(s.chart, s.point))
      throw Error(ErrorCode::InvalidCurve, "sample " + std::to_string(i) + " outside its chart");
    if (i > 0 && curve.samples[i - 1].chart != s.chart &&
        !atlas.find_transition(curve.samples[i - 1].chart, s.chart, curve.samples[i - 1].point))
      throw Error(ErrorCode::InvalidCurve, "chart change without transition at " + std::to_string(i));
  }
  if (velocity_tol <= 0.0) return;
  auto is_break = [&](std::size_t i) {
    return std::find(curve.breakpoints.begin(), curve.breakpoints.end(), i) != curve.breakpoints.end();
  };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto& a = curve.samples[i - 1];
    const auto& b = curve.samples[i];
    const auto& c = curve.samples[i + 1];
    if (is_break(i) || a.chart != b.chart || c.chart != b.chart) continue;
    Vec fd = atlas.displacement(b.chart, a.point, c.point) / (curve.params[i + 1] - curve.params[i - 1]);
    double scale = std::max(1.0, b.velocity.cwiseAbs().maxCoeff());
    if ((fd - b.velocity).cwiseAbs().maxCoeff() > velocity_tol * scale)
      throw Error(ErrorCode::InvalidCurve, "velocity mismatch at sample " + std::to_string(i));
  }
}

QuadratureResult integrate_samples(const std::vector<double>& params, const std::vector<double>& values,
                                   const std::vector<std::size_t>& breakpoints,
                                   const std::vector<double>& left_values) {
  const std::size_t n = params.size();
  QuadratureResult out;
  if (n < 2) return out;
  std::vector<std::size_t> cuts{0};
  std::vector<std::size_t> bps(breakpoints);
  std::sort(bps.begin(), bps.end());
  for (auto b : bps)
    if (b > cuts.back() && b < n - 1) cuts.push_back(b);
  cuts.push_back(n - 1);

  std::vector<double> fx, ff;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    std::size_t a = cuts[k], b = cuts[k + 1];
    fx.assign(params.begin() + a, params.begin() + b + 1);
    ff.assign(values.begin() + a, values.begin() + b + 1);
    bool end_is_break = std::binary_search(bps.begin(), bps.end(), b);
    if (end_is_break && left_values.size() == n) ff.back() = left_values[b];
    std::size_t m = fx.size();
    double fine = simpson(fx.data(), ff.data(), m);
    out.value += fine;
    double coarse;
    if (m >= 5) {
      std::vector<double> cx, cf;
      for (std::size_t i = 0; i < m; i += 2) {
        cx.push_back(fx[i]);
        cf.push_back(ff[i]);
      }
      if ((m - 1) % 2 != 0) {
        cx.push_back(fx.back());
        cf.push_back(ff.back());
      }
      coarse = simpson(cx.data(), cf.data(), cx.size());
      out.error_estimate += std::abs(fine - coarse) / 15.0;
    } else {
      coarse = trapezoid(fx.data(), ff.data(), m);
      out.error_estimate += std::abs(fine - coarse);
    }
  }
  return out;
}

QuadratureResult lorentz_length(const ChartAtlas& atlas, const CurveSamples& curve) {
  validate_curve(atlas, curve);
  const std::size_t n = curve.size();
  std::vector<double> f(n), fl(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = curve.samples[i];
    Mat g = eval_metric(atlas, s.chart, s.point);
    f[i] = std::sqrt(std::abs(s.velocity.dot(g * s.velocity)));
    fl[i] = s.velocity_left ? std::sqrt(std::abs(s.velocity_left->dot(g * *s.velocity_left))) : f[i];
  }
  auto r = integrate_samples(curve.params, f, curve.breakpoints, fl);
  r.value = std::max(0.0, r.value);
  return r;
}

// --- audits --------------------------------------------------------------------

Vec sample_point(const ChartAtlas& atlas, int chart_id, Rng& rng) {
  const Chart& c = atlas.chart(chart_id);
  const auto& box = c.sample_box.empty() ? c.box : c.sample_box;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vec x(atlas.dim());
    for (int i = 0; i < atlas.dim(); ++i) {
      double lo = box[i].lo, hi = box[i].hi;
      if (!std::isfinite(lo) && !std::isfinite(hi)) lo = -1.0, hi = 1.0;
      else if (!std::isfinite(lo)) lo = hi - 2.0;
      else if (!std::isfinite(hi)) hi = lo + 2.0;
      x[i] = lo + (hi - lo) * u(rng);
    }
    if (atlas.contains(chart_id, x)) return x;
  }
  throw Error(ErrorCode::InvalidAtlas, "could not sample a point in chart " + c.name);
}

int negative_eigenvalues(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  int neg = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] < 0) ++neg;
  return neg;
}

AuditReport audit_signature(const ChartAtlas& atlas, int samples_per_chart, std::uint64_t seed,
                            int expected_index) {
  AuditReport rep;
  for (int c = 0; c < atlas.chart_count(); ++c) {
    Rng rng(seed + static_cast<std::uint64_t>(c));
    int index = expected_index;
    for (int k = 0; k < samples_per_chart; ++k) {
      Vec x = sample_point(atlas, c, rng);
      Mat raw = atlas.chart(c).metric(atlas.reduce(c, x));
      ++rep.checks;
      double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
      if ((raw - raw.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        rep.passed = false;
        rep.first_failure = "asymmetric metric at " + fmt_point(x);
        return rep;
      }
      Mat g = 0.5 * (raw + raw.transpose());
      Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().cwiseAbs().minCoeff() <= 1e-14 * scale) {
        rep.passed = false;
        rep.first_failure = "degenerate metric at " + fmt_point(x);
        return rep;
      }
      int neg = negative_eigenvalues(g);
      if (index < 0) index = neg;
      if (neg != index) {
        rep.passed = false;
        rep.first_failure = "signature changes at " + fmt_point(x) + " in chart " + atlas.chart(c).name;
        return rep;
      }
    }
  }
  return rep;
}

AuditReport audit_transitions(const ChartAtlas& atlas, int samples, std::uint64_t seed) {
  AuditReport rep;
  for (std::size_t t = 0; t < atlas.transitions().size(); ++t) {
    const auto& tr = atlas.transitions()[t];
    Rng rng(seed + t);
    int found = 0;
    for (int k = 0; k < 50 * samples && found < samples; ++k) {
      Vec x = sample_point(atlas, tr.from, rng);
      if (tr.domain && !tr.domain(x)) continue;
      ++found;
      ++rep.checks;
      Vec y = tr.map(x);
      if (!atlas.contains(tr.to, y)) {
        rep.passed = false;
        rep.first_failure = "transition image outside target chart at " + fmt_point(x);
        return rep;
      }
      Mat J = tr.jacobian(x);
      Mat pulled = J.transpose() * eval_metric(atlas, tr.to, y) * J;
      Mat g = eval_metric(atlas, tr.from, x);
      if ((pulled - g).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, g.cwiseAbs().maxCoeff())) {
        rep.passed = false;
        rep.first_failure = "pulled-back metric disagrees at " + fmt_point(x);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace leafcausal
