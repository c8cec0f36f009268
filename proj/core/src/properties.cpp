#include "leafcausal/properties.hpp"

#include <cmath>
#include <sstream>

#include "leafcausal/dynamics.hpp"

namespace leafcausal {

namespace {

struct Site {
  int chart = 0;
  Vec x;
};

Site random_site(const ChartAtlas& atlas, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, atlas.chart_count() - 1);
  Site s;
  s.chart = pick(rng);
  s.x = sample_point(atlas, s.chart, rng);
  return s;
}

Vec gaussian(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> N;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

void record(PropertyCount& c, bool ok, const std::string& what) {
  ++c.checks;
  if (ok) return;
  if (c.failures++ == 0) c.first_failure = what;
}

std::string describe(const Site& s, const Vec& v) {
  std::ostringstream os;
  os.precision(6);
  os << "chart " << s.chart << " x=(" << s.x.transpose() << ") v=(" << v.transpose() << ")";
  return os.str();
}

Vec transverse_future(const FoliatedAtlas& fol, const TimeOrientation& orient, const Site& s) {
  return orient.field[s.chart](s.x).tail(fol.q);
}

}  // namespace

PropertyCount hierarchy_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                              const TimeOrientation& orient, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  PropertyCount out;
  const int n = fol.dim(), q = fol.q;
  for (std::size_t k = 0; k < samples; ++k) {
    Site s = random_site(g, rng);
    Mat G = eval_metric(g, s.chart, s.x);
    Mat H = transverse_full(fol, gt, s.chart, s.x);
    Vec v = gaussian(n, rng);
    if (k % 3 == 1) {
      // g-null: v = w + s X with X the horizontal lift of the time reference
      Vec X = horizontal_lift(fol, g, s.chart, s.x, transverse_future(fol, orient, s));
      double a = X.dot(G * X), b = 2 * v.dot(G * X), c = v.dot(G * v);
      double disc = b * b - 4 * a * c;
      if (disc >= 0) v += ((-b - std::sqrt(disc)) / (2 * a)) * X;
    } else if (k % 3 == 2) {
      // transversely null with an arbitrary vertical part
      Mat Ht = H.bottomRightCorner(q, q);
      Vec t = sample_unit_timelike(Ht, transverse_future(fol, orient, s), 1, 2.0, rng)[0];
      Vec sp = gaussian(q, rng);
      sp -= (sp.dot(Ht * t) / t.dot(Ht * t)) * t;
      double ns = std::sqrt(std::max(sp.dot(Ht * sp), 0.0));
      if (ns > 0) v.tail(q) = t + sp / ns;
    }
    TangentVector tv{s.chart, s.x, v};
    CausalClass cg = classify(g, tv);
    TransverseClass ct = classify_transverse(fol, gt, orient, tv);
    // g-value on the transverse scale, to tell band effects from counterexamples
    double st = v.tail(q).cwiseAbs().maxCoeff();
    double g_on_t = st > 0 ? v.dot(G * v) / (st * st) : 0.0;
    bool ok = true;
    if (cg == CausalClass::Timelike && ct.kind != TransverseCausal::Timelike) ok = false;
    if (cg == CausalClass::Lightlike && ct.kind == TransverseCausal::Spacelike && !(g_on_t > kCausalTol)) ok = false;
    if (ct.kind == TransverseCausal::Spacelike && cg == CausalClass::Timelike) ok = false;
    record(out, ok, describe(s, v));
  }
  return out;
}

PropertyCount wedge_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt, const TimeOrientation& orient,
                          std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  PropertyCount out;
  std::uniform_real_distribution<double> logc(-3.0, 3.0);
  std::bernoulli_distribution coin;
  const int n = fol.dim(), p = fol.p, q = fol.q;
  for (std::size_t k = 0; k < samples; ++k) {
    Site s = random_site(fol.base, rng);
    Mat Ht = transverse_matrix(fol, gt, s.chart, s.x);
    auto tl = sample_unit_timelike(Ht, transverse_future(fol, orient, s), 2, 3.0, rng);
    auto full = [&](const Vec& t) {
      Vec v(n);
      v.head(p) = gaussian(p, rng);
      v.tail(q) = t;
      return v;
    };
    // convexity inside one wedge
    double sign = coin(rng) ? 1.0 : -1.0;
    Vec v = full(sign * tl[0]), w = full(sign * tl[1]);
    Vec mix = std::exp(logc(rng)) * v + std::exp(logc(rng)) * w;
    TransverseClass cm = classify_transverse(fol, gt, orient, {s.chart, s.x, mix});
    Wedge want = sign > 0 ? Wedge::Future : Wedge::Past;
    record(out, cm.kind == TransverseCausal::Timelike && cm.wedge == want, describe(s, mix));
    // dichotomy: g⊤(u, v) < 0 exactly for same-wedge pairs
    double s2 = coin(rng) ? 1.0 : -1.0;
    Vec a = tl[0], b = s2 * tl[1];
    double ip = a.dot(Ht * b);
    record(out, ip != 0.0 && ((ip < 0) == (s2 > 0)), describe(s, b));
  }
  return out;
}

PropertyCount orthogonality_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt,
                                  const TimeOrientation& orient, std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  PropertyCount out;
  const int n = fol.dim(), q = fol.q;
  for (std::size_t k = 0; k < samples; ++k) {
    Site s = random_site(fol.base, rng);
    Mat Ht = transverse_matrix(fol, gt, s.chart, s.x);
    Vec t = sample_unit_timelike(Ht, transverse_future(fol, orient, s), 1, 3.0, rng)[0];
    Vec w = gaussian(n, rng);
    Vec wt = w.tail(q);
    wt -= (wt.dot(Ht * t) / t.dot(Ht * t)) * t;
    w.tail(q) = wt;
    if (wt.cwiseAbs().maxCoeff() < 1e-6) continue;
    TransverseClass c = classify_transverse(fol, gt, orient, {s.chart, s.x, w});
    record(out, c.kind == TransverseCausal::Spacelike, describe(s, w));
  }
  return out;
}

LengthSuiteResult length_suite(const FoliatedAtlas& fol, const TransverseMetricField& gt, const ChartAtlas& g,
                               const TimeOrientation& orient, std::size_t polylines, std::uint64_t seed,
                               double gap_tol) {
  Rng rng(seed);
  LengthSuiteResult out;
  out.min_vertical_gap = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int p = fol.p, q = fol.q;
  constexpr int kSegments = 3, kIntervals = 8;
  for (std::size_t k = 0; k < polylines; ++k) {
    const bool horizontal = k % 2 == 0;
    CurveSamples c;
    bool built = false;
    for (int attempt = 0; attempt < 200 && !built; ++attempt) {
      c = CurveSamples{};
      Site s = random_site(g, rng);
      Vec x = s.x;
      bool ok = true;
      for (int seg = 0; seg < kSegments && ok; ++seg) {
        Mat Ht = transverse_matrix(fol, gt, s.chart, x);
        Vec t = sample_unit_timelike(Ht, transverse_future(fol, orient, {s.chart, x}), 1, 1.5, rng)[0];
        Vec d = horizontal_lift(fol, g, s.chart, x, t);
        if (!horizontal) {
          Mat G = eval_metric(g, s.chart, x);
          Vec vert = Vec::Zero(p + q);
          vert.head(p) = gaussian(p, rng);
          double hn = vert.dot(G * vert);
          if (hn > 0) d += std::sqrt((0.05 + 0.75 * unif(rng)) / hn) * vert;
        }
        double room = g.interior_margin(s.chart, x);
        double scale = std::min(0.2, 0.25 * room / d.cwiseAbs().maxCoeff());
        if (scale < 0.02) {
          ok = false;  // too close to a box face for a measurable gap
          break;
        }
        d *= scale;
        for (int i = 0; i <= kIntervals; ++i) {
          if (seg > 0 && i == 0) {
            // breakpoint: keep the incoming velocity
            auto& last = c.samples.back();
            last.velocity_left = last.velocity;
            last.velocity = d;
            c.breakpoints.push_back(c.samples.size() - 1);
            continue;
          }
          Vec y = x + (static_cast<double>(i) / kIntervals) * d;
          if (!g.contains(s.chart, y)) {
            ok = false;
            break;
          }
          Mat G = eval_metric(g, s.chart, y);
          if (!(d.dot(G * d) < 0)) {
            ok = false;
            break;
          }
          c.params.push_back(seg + static_cast<double>(i) / kIntervals);
          c.samples.push_back({s.chart, y, d, std::nullopt});
        }
        x += d;
      }
      built = ok;
    }
    if (!built) {
      record(out.inequality, false, "could not build a causal polyline");
      continue;
    }
    double lg = lorentz_length(g, c).value;
    double lt = transverse_length(fol, gt, c).value;
    std::ostringstream what;
    what.precision(12);
    what << "polyline " << k << " l_g=" << lg << " l_T=" << lt;
    record(out.inequality, lg <= lt + gap_tol * std::max(1.0, lt), what.str());
    double gap = lt - lg;
    if (horizontal) {
      out.max_horizontal_gap = std::max(out.max_horizontal_gap, std::abs(gap));
      record(out.equality, std::abs(gap) <= gap_tol, what.str());
    } else {
      out.min_vertical_gap = std::min(out.min_vertical_gap, gap);
      record(out.equality, gap > gap_tol, what.str());
    }
  }
  if (!std::isfinite(out.min_vertical_gap)) out.min_vertical_gap = 0.0;
  return out;
}

}  // namespace leafcausal
