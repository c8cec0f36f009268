#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "leafcausal/catalog.hpp"
#include "leafcausal/dynamics.hpp"
#include "leafcausal/foliation.hpp"
#include "support.hpp"

using namespace leafcausal;
using namespace leafcausal::testing;

namespace {

// vertical-y foliation of Minkowski R^3 in adapted coordinates (y; t, x)
struct Mink {
  FoliatedAtlas fol;
  TransverseMetricField gt;
  ChartAtlas g;
  TimeOrientation orient;
};

Mink mink() {
  Mink m;
  ChartAtlas base(3, {Chart{"R3", {Interval{}, Interval{}, Interval{}}, constant(Mat::Identity(3, 3)), {}, {}, {}}});
  m.fol = make_foliated_atlas(base, 1, [](int, const Vec& x) { return quantized_label(Vec(x.tail(2))); }, {});
  m.gt = TransverseMetricField{{constant(minkowski(2))}, 1};
  m.g = assemble_bundle_like(m.fol, m.gt, {constant(Mat::Identity(3, 3))});
  m.orient = TimeOrientation{{[](const Vec&) { return vec({0, 1, 0}); }}};
  return m;
}

// v_{a,b} = a dy + b dx + dt in chart order (y, t, x)
Vec v_ab(double a, double b) { return vec({a, 1, b}); }

}  // namespace

TEST(MakeFoliatedAtlas, RejectsCodimensionOneWithoutFlag) {
  ChartAtlas base(2, {Chart{"R2", {Interval{}, Interval{}}, constant(Mat::Identity(2, 2)), {}, {}, {}}});
  auto label = [](int, const Vec& x) { return quantized_label(Vec(x.tail(1))); };
  EXPECT_THROW(make_foliated_atlas(base, 1, label, {}), Error);
  EXPECT_NO_THROW(make_foliated_atlas(base, 1, label, {}, true));
}

TEST(AssembleBundleLike, MinkowskiFromTransverseAndEuclidean) {
  auto m = mink();
  Mat want = Mat::Identity(3, 3);
  want(1, 1) = -1.0;
  EXPECT_EQ(eval_metric(m.g, 0, vec({1, 2, 3})), want);
}

TEST(AssembleBundleLike, RiemannianTransverseGivesProduct) {
  auto m = mink();
  TransverseMetricField euclid{{constant(Mat::Identity(2, 2))}, 0};
  ChartAtlas g = assemble_bundle_like(m.fol, euclid, {constant(Mat::Identity(3, 3))});
  EXPECT_EQ(eval_metric(g, 0, vec({0, 0, 0})), Mat::Identity(3, 3));
}

TEST(AssembleBundleLike, CosWarpHandExpansion) {
  const auto& ex = get_example("cos_warp");
  for (double t : {-1.2, 0.0, 0.7}) {
    Mat g = eval_metric(*ex.g, 0, vec({0.5, t, 0.3}));
    Mat want = Mat::Zero(3, 3);
    want(0, 0) = 1.0;
    want(1, 1) = -1.0;
    want(2, 2) = std::cos(t) * std::cos(t);
    EXPECT_LT((g - want).cwiseAbs().maxCoeff(), 1e-15) << t;
  }
}

TEST(AssembleBundleLike, WrongIndexIsRejected) {
  auto m = mink();
  // a two-timelike transverse form makes g of index 2
  TransverseMetricField bad{{constant(-Mat::Identity(2, 2))}, 1};
  try {
    assemble_bundle_like(m.fol, bad, {constant(Mat::Identity(3, 3))});
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::IndexMismatch || e.code() == ErrorCode::AuditFailed) << e.what();
  }
}

TEST(Split, OrthogonalCoordinates) {
  auto m = mink();
  auto s = split(m.fol, m.g, {0, Vec::Zero(3), vec({2, 1, 1})});
  EXPECT_EQ(s.vertical, vec({2, 0, 0}));
  EXPECT_EQ(s.horizontal, vec({0, 1, 1}));
  s = split(m.fol, m.g, {0, Vec::Zero(3), vec({1, 1, 0})});
  EXPECT_EQ(s.vertical, vec({1, 0, 0}));
  EXPECT_EQ(s.horizontal, vec({0, 1, 0}));
}

TEST(Split, NonDiagonalAuxiliaryMetricIsOrthogonal) {
  auto m = mink();
  Mat H(3, 3);
  H << 1.0, 0.3, -0.2, 0.3, 1.5, 0.1, -0.2, 0.1, 0.8;
  ChartAtlas g = assemble_bundle_like(m.fol, m.gt, {constant(H)});
  Rng rng(5);
  std::normal_distribution<double> N;
  for (int k = 0; k < 200; ++k) {
    Vec x = vec({N(rng), N(rng), N(rng)}), v = vec({N(rng), N(rng), N(rng)});
    auto s = split(m.fol, g, {0, x, v});
    EXPECT_LT((s.vertical + s.horizontal - v).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(s.vertical.tail(2).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(std::abs(inner(g, {0, x, s.vertical}, {0, x, s.horizontal})), 1e-10);
    // the horizontal part carries the transverse form unchanged
    EXPECT_NEAR(inner(g, {0, x, s.horizontal}, {0, x, s.horizontal}),
                transverse_form(m.fol, m.gt, 0, x, v, v), 1e-12 * (1 + v.squaredNorm()));
  }
}

TEST(ClassifyTransverse, RemarkVectors) {
  auto m = mink();
  Vec o = Vec::Zero(3);
  for (double a : {-5.0, 0.0, 2.0, 40.0}) {
    auto c = classify_transverse(m.fol, m.gt, m.orient, {0, o, v_ab(a, 0.5)});
    EXPECT_EQ(c.kind, TransverseCausal::Timelike);
    EXPECT_EQ(c.wedge, Wedge::Future);
  }
  auto c = classify_transverse(m.fol, m.gt, m.orient, {0, o, v_ab(3, 1)});
  EXPECT_EQ(c.kind, TransverseCausal::Lightlike);
  EXPECT_EQ(c.wedge, Wedge::Future);
  c = classify_transverse(m.fol, m.gt, m.orient, {0, o, vec({1, 0, 0})});
  EXPECT_EQ(c.kind, TransverseCausal::Spacelike);
  c = classify_transverse(m.fol, m.gt, m.orient, {0, o, -v_ab(1, 0.5)});
  EXPECT_EQ(c.wedge, Wedge::Past);
}

TEST(ClassifyTransverse, VerticalPartDoesNotMatterButGCausalityDoes) {
  auto m = mink();
  Vec o = Vec::Zero(3);
  // transversely timelike while g-spacelike: a = 2, b = 0
  EXPECT_EQ(classify(m.g, {0, o, v_ab(2, 0)}), CausalClass::Spacelike);
  EXPECT_EQ(classify_transverse(m.fol, m.gt, m.orient, {0, o, v_ab(2, 0)}).kind, TransverseCausal::Timelike);
}

TEST(TransverseLength, Examples) {
  auto m = mink();
  auto in_leaf = sample_curve(0, 0, 1, 8, [](double s) { return vec({5 * s, 0.2, 0.1}); },
                              [](double) { return vec({5, 0, 0}); });
  EXPECT_EQ(transverse_length(m.fol, m.gt, in_leaf).value, 0.0);
  // alpha(s) = (t, x, y) = (s, 0, 7s)
  auto slanted = sample_curve(0, 0, 1, 8, [](double s) { return vec({7 * s, s, 0}); },
                              [](double) { return vec({7, 1, 0}); });
  EXPECT_NEAR(transverse_length(m.fol, m.gt, slanted).value, 1.0, 1e-14);
  EXPECT_NEAR(lorentz_length(m.g, slanted).value, std::sqrt(48.0), 1e-13);  // g-spacelike: |g|^(1/2)
}

TEST(Waterfall, ProofFormulaExample) {
  auto m = mink();
  // alpha(t) = ((sin t), (t, 0)), z = (0.5, (0, 0))
  auto alpha = sample_curve(0, 0, 1, 40, [](double s) { return vec({std::sin(s), s, 0}); },
                            [](double s) { return vec({std::cos(s), 1, 0}); });
  Vec z = vec({0.5, 0, 0});
  auto beta = waterfall(m.fol, m.gt, m.orient, alpha, z, 10);
  EXPECT_EQ(beta.samples.front().point, z);
  EXPECT_EQ(beta.samples.back().point, alpha.samples.back().point);
  for (std::size_t i = 10; i < alpha.size(); ++i) EXPECT_EQ(beta.samples[i].point, alpha.samples[i].point);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const auto &a = alpha.samples[i], &b = beta.samples[i];
    EXPECT_EQ(b.point.tail(2), a.point.tail(2));
    EXPECT_EQ(transverse_form(m.fol, m.gt, 0, b.point, b.velocity, b.velocity),
              transverse_form(m.fol, m.gt, 0, a.point, a.velocity, a.velocity));
  }
  // leaf segment is the straight line from z to alpha(t0)
  const double t0 = alpha.params[10];
  for (std::size_t i = 0; i <= 10; ++i)
    EXPECT_NEAR(beta.samples[i].point[0], 0.5 + (std::sin(t0) - 0.5) * alpha.params[i] / t0, 1e-15);
  EXPECT_EQ(transverse_length(m.fol, m.gt, beta).value, transverse_length(m.fol, m.gt, alpha).value);
}

TEST(Waterfall, IdentityWhenStartingPointIsReused) {
  auto m = mink();
  auto alpha = sample_curve(0, 0, 1, 8, [](double s) { return vec({s, s, 0}); },
                            [](double) { return vec({1, 1, 0}); });
  auto beta = waterfall(m.fol, m.gt, m.orient, alpha, alpha.samples.front().point);
  for (std::size_t i = 0; i < alpha.size(); ++i) EXPECT_EQ(beta.samples[i].point, alpha.samples[i].point);
}

TEST(Waterfall, OtherLeafIsRejected) {
  auto m = mink();
  auto alpha = sample_curve(0, 0, 1, 8, [](double s) { return vec({0, s, 0}); },
                            [](double) { return vec({0, 1, 0}); });
  try {
    waterfall(m.fol, m.gt, m.orient, alpha, vec({0, 0, 0.1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSameLeaf);
  }
}

TEST(LiftCurve, ConstantSection) {
  auto m = mink();
  CurveSamples base = sample_curve(0, 0, 1, 8, [](double s) { return vec({s, 0}); },
                                   [](double) { return vec({1, 0}); });
  auto lifted = lift_curve(m.fol, base, vec({5, 0, 0}));
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(lifted.samples[i].point, vec({5, base.params[i], 0}));
    EXPECT_EQ(lifted.samples[i].velocity, vec({0, 1, 0}));
  }
}

TEST(LiftCurve, CosWarpLengthRoundTrip) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas q = quotient_atlas(ex.fol, *ex.gt);
  auto base = sample_curve(0, 0, 1, 64, [](double s) { return vec({-0.5 + s, 0.3 * std::sin(s)}); },
                           [](double s) { return vec({1, 0.3 * std::cos(s)}); });
  auto lifted = lift_curve(ex.fol, base, vec({1.0, -0.5, 0.0}));
  EXPECT_NEAR(transverse_length(ex.fol, *ex.gt, lifted).value, lorentz_length(q, base).value, 1e-9);
}

TEST(LiftCurve, KroneckerWrapsModuloPeriod) {
  const auto& ex = get_example("kronecker_T2");
  const auto& fol = ex.fol;
  const auto& box = fol.base.chart(0).box;
  const double lo = box.back().lo, period = box.back().period();
  // a transverse curve crossing the identification once
  auto base = sample_curve(0, 0, 1, 16, [&](double s) { return vec({lo + period * (0.8 + 0.4 * s)}); },
                           [&](double) { return vec({0.4 * period}); });
  Vec start = fol.base.reduce(0, Vec::Constant(fol.dim(), 0.0));
  start.tail(1) = base.samples.front().point;
  auto lifted = lift_curve(fol, base, start);
  for (std::size_t i = 0; i < base.size(); ++i) {
    double d = std::remainder(fol.transverse(0, lifted.samples[i].point)[0] - base.samples[i].point[0], period);
    EXPECT_NEAR(d, 0.0, 1e-12);
  }
}

TEST(Orientability, SuspensionExamples) {
  const auto& ex = get_example("misner_suspension");
  EXPECT_TRUE(check_transverse_time_orientability(*ex.suspension));
  EXPECT_FALSE(check_transverse_time_orientability(*ex.reversed_suspension));
  SuspensionSpec id = *ex.suspension;
  id.map = [](const Vec& x) { return x; };
  id.differential = [](const Vec& x) { return Mat::Identity(x.size(), x.size()); };
  EXPECT_TRUE(check_transverse_time_orientability(id));
}

TEST(Orientability, NonIsometryIsRejected) {
  SuspensionSpec s = *get_example("misner_suspension").suspension;
  s.map = [](const Vec& x) { return 2.0 * x; };
  s.differential = [](const Vec& x) { return 2.0 * Mat::Identity(x.size(), x.size()); };
  try {
    check_transverse_time_orientability(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAnIsometry);
  }
}

TEST(Audits, EveryCatalogEntryPasses) {
  for (const auto& id : list_examples()) {
    const auto& ex = get_example(id);
    if (!ex.gt) continue;
    auto tm = audit_transverse_metric(ex.fol, *ex.gt, 50, 0);
    EXPECT_TRUE(tm.passed) << id << ": " << tm.first_failure;
    if (ex.orient) {
      auto to = audit_time_orientation(ex.fol, *ex.gt, *ex.orient, 50, 0);
      EXPECT_TRUE(to.passed) << id << ": " << to.first_failure;
    }
  }
}

TEST(SampleUnitTimelike, OnTheFutureHyperboloid) {
  Mat G = minkowski(3);
  Rng rng(2);
  for (const Vec& v : sample_unit_timelike(G, vec({1, 0, 0}), 200, 3.0, rng)) {
    EXPECT_NEAR(v.dot(G * v), -1.0, 1e-12);
    EXPECT_GT(v[0], 0.0);
    EXPECT_LE(v[0], std::cosh(3.0) + 1e-12);
  }
}
