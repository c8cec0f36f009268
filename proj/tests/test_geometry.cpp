#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "leafcausal/catalog.hpp"
#include "leafcausal/geometry.hpp"
#include "support.hpp"

using namespace leafcausal;
using namespace leafcausal::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ChartAtlas mink3() {
  return ChartAtlas(3, {Chart{"R3", {Interval{}, Interval{}, Interval{}}, constant(minkowski(3)), {}, {}, {}}});
}

}  // namespace

TEST(EvalMetric, MinkowskiIsConstant) {
  auto a = mink3();
  EXPECT_EQ(eval_metric(a, 0, vec({0.3, -7, 2})), minkowski(3));
}

TEST(EvalMetric, DeSitterSlabAtTimeZeroKeepsRoundSphere) {
  const auto& ex = get_example("desitter_warp");
  ChartAtlas base = quotient_atlas(ex.fol, *ex.gt);
  // L bounds t away from 0, so compare the coefficient function at t -> 0 directly
  Vec y = vec({1e-9, 0.7, 1.1, 2.0});
  Mat g = ex.gt->h[0](y);
  const double s1 = std::sin(0.7), s2 = std::sin(1.1);
  EXPECT_DOUBLE_EQ(g(0, 0), -1.0);
  EXPECT_NEAR(g(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(g(2, 2), s1 * s1, 1e-15);
  EXPECT_NEAR(g(3, 3), s1 * s1 * s2 * s2, 1e-15);
  EXPECT_EQ(base.dim(), 4);
}

TEST(EvalMetric, CosWarpAtQuarterPi) {
  const auto& ex = get_example("cos_warp");
  Mat g = eval_metric(quotient_atlas(ex.fol, *ex.gt), 0, vec({kPi / 4, 0.3}));
  EXPECT_DOUBLE_EQ(g(0, 0), -1.0);
  EXPECT_NEAR(g(1, 1), 0.5, 1e-15);
  EXPECT_EQ(g(0, 1), 0.0);
}

TEST(EvalMetric, Errors) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas q = quotient_atlas(ex.fol, *ex.gt);
  try {
    eval_metric(q, 0, vec({2.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointOutsideChart);
  }
  auto bad = MetricFn::from(1, [](const auto& x) {
    using T = scalar_of_t<decltype(x)>;
    MatX<T> g(1, 1);
    g(0, 0) = T(1.0) / (x[0] - x[0]);
    return g;
  });
  ChartAtlas a(1, {Chart{"bad", {Interval{}}, bad, {}, {}, {}}});
  try {
    eval_metric(a, 0, vec({1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteCoefficient);
  }
}

TEST(EvalMetric, Symmetrizes) {
  auto skew = MetricFn::from(2, [](const auto& x) {
    using T = scalar_of_t<decltype(x)>;
    MatX<T> g(2, 2);
    g << T(-1.0), T(0.4), T(0.0), T(1.0);
    return g;
  });
  ChartAtlas a(2, {Chart{"s", {Interval{}, Interval{}}, skew, {}, {}, {}}});
  Mat g = eval_metric(a, 0, vec({0, 0}));
  EXPECT_DOUBLE_EQ(g(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.2);
}

TEST(Classify, MinkowskiExamples) {
  auto a = mink3();
  Vec o = Vec::Zero(3);
  EXPECT_EQ(classify(a, {0, o, vec({1, 0, 0})}), CausalClass::Timelike);
  EXPECT_EQ(classify(a, {0, o, vec({1, 1, 0})}), CausalClass::Lightlike);
  // v_{a,b} = a dy + b dx + dt with a = 2, b = 0: q = -1 + 4 = 3
  EXPECT_EQ(classify(a, {0, o, vec({1, 0, 2})}), CausalClass::Spacelike);
  EXPECT_EQ(classify(a, {0, o, vec({0, 0, 0})}), CausalClass::Spacelike);
}

TEST(Classify, ToleranceBandIsOnNormalizedValue) {
  auto a = mink3();
  Vec o = Vec::Zero(3);
  // scaling does not move a vector in or out of the band
  EXPECT_EQ(classify(a, {0, o, 1e6 * vec({1, 1 + 1e-11, 0})}), CausalClass::Lightlike);
  EXPECT_EQ(classify(a, {0, o, 1e-6 * vec({1, 1 + 1e-6, 0})}), CausalClass::Spacelike);
}

TEST(LorentzLength, MinkowskiTimelikeAndNull) {
  auto a = mink3();
  auto tl = sample_curve(0, 0, 2, 16, [](double s) { return vec({s, 0, 0}); },
                         [](double) { return vec({1, 0, 0}); });
  EXPECT_NEAR(lorentz_length(a, tl).value, 2.0, 1e-14);
  auto nl = sample_curve(0, 0, 1, 16, [](double s) { return vec({s, s, 0}); },
                         [](double) { return vec({1, 1, 0}); });
  EXPECT_NEAR(lorentz_length(a, nl).value, 0.0, 1e-14);
}

TEST(LorentzLength, CosWarpTimeLine) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas q = quotient_atlas(ex.fol, *ex.gt);
  auto c = sample_curve(0, -kPi / 2 + 0.05, kPi / 2 - 0.05, 64, [](double s) { return vec({s, 0.4}); },
                        [](double) { return vec({1, 0}); });
  // the parameter reaches the open boundary of the slab, so shrink by a hair
  c.samples.front().point[0] += 1e-12;
  c.samples.back().point[0] -= 1e-12;
  EXPECT_NEAR(lorentz_length(q, c).value, kPi - 0.1, 1e-9);
}

TEST(LorentzLength, InvalidCurve) {
  auto a = mink3();
  CurveSamples c = sample_curve(0, 0, 1, 4, [](double s) { return vec({s, 0, 0}); },
                                [](double) { return vec({1, 0, 0}); });
  std::swap(c.params[1], c.params[2]);
  try {
    lorentz_length(a, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidCurve);
  }
}

TEST(IntegrateSamples, SimpsonIsExactOnCubics) {
  std::vector<double> t, f;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(i * 0.1);
    f.push_back(std::pow(i * 0.1, 3));
  }
  EXPECT_NEAR(integrate_samples(t, f, {}).value, 0.25, 1e-15);
}

TEST(Inner, Examples) {
  auto a = mink3();
  Vec o = Vec::Zero(3);
  EXPECT_EQ(inner(a, {0, o, vec({1, 0, 0})}, {0, o, vec({1, 0, 0})}), -1.0);
  EXPECT_EQ(inner(a, {0, o, vec({1, 0, 0})}, {0, o, vec({0, 1, 0})}), 0.0);
  const auto& ex = get_example("desitter_warp");
  ChartAtlas base = quotient_atlas(ex.fol, *ex.gt);
  Vec x = vec({0.3, 1.0, 1.0, 1.0});
  EXPECT_EQ(inner(base, {0, x, vec({1, 0, 0, 0})}, {0, x, vec({1, 0, 0, 0})}), -1.0);
  try {
    inner(a, {0, o, vec({1, 0, 0})}, {0, vec({1, 0, 0}), vec({1, 0, 0})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BasePointMismatch);
  }
}

TEST(Inner, SymmetricBilinearAndPolarizes) {
  const auto& ex = get_example("logt_warp");
  Rng rng(3);
  std::normal_distribution<double> N;
  for (int k = 0; k < 100; ++k) {
    Vec x = sample_point(*ex.g, 0, rng);
    Vec u(4), v(4), w(4);
    for (int i = 0; i < 4; ++i) u[i] = N(rng), v[i] = N(rng), w[i] = N(rng);
    auto ip = [&](const Vec& a, const Vec& b) { return inner(*ex.g, {0, x, a}, {0, x, b}); };
    const double scale = 1 + std::abs(ip(u, u)) + std::abs(ip(v, v)) + std::abs(ip(w, w));
    EXPECT_NEAR(ip(u, v), ip(v, u), 1e-12 * scale);
    EXPECT_NEAR(ip(2 * u + w, v), 2 * ip(u, v) + ip(w, v), 1e-12 * scale);
    EXPECT_NEAR(ip(u, v), 0.25 * (ip(u + v, u + v) - ip(u - v, u - v)), 1e-12 * scale);
  }
}

TEST(Atlas, PeriodicReductionAndDisplacement) {
  ChartAtlas a(1, {Chart{"S1", {Interval{0, 1, true}}, constant(Mat::Identity(1, 1)), {}, {}, {}}});
  EXPECT_NEAR(a.reduce(0, vec({2.25}))[0], 0.25, 1e-15);
  EXPECT_NEAR(a.displacement(0, vec({0.9}), vec({0.1}))[0], 0.2, 1e-15);
  EXPECT_TRUE(a.contains(0, vec({-3.5})));
}

TEST(Audit, CatalogSignaturesHaveIndexOne) {
  for (const auto& id : list_examples()) {
    const auto& ex = get_example(id);
    if (!ex.g) continue;
    auto rep = audit_signature(*ex.g, 20, 0, 1);
    EXPECT_TRUE(rep.passed) << id << ": " << rep.first_failure;
  }
}
