#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "leafcausal/catalog.hpp"
#include "leafcausal/dynamics.hpp"
#include "support.hpp"

using namespace leafcausal;
using namespace leafcausal::testing;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Geodesic, MinkowskiStraightLine) {
  ChartAtlas a(3, {Chart{"R3", {Interval{}, Interval{}, Interval{}}, constant(minkowski(3)), {}, {}, {}}});
  auto c = integrate_geodesic(a, {0, Vec::Zero(3), vec({1, 0, 0}), 0.0}, 2.0);
  ASSERT_GT(c.size(), 2u);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR((c.samples[i].point - vec({c.params[i], 0, 0})).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  }
  EXPECT_NEAR(c.params.back(), 2.0, 1e-14);
}

TEST(Geodesic, CosWarpTimeLineConservesNorm) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas q = quotient_atlas(ex.fol, *ex.gt);
  auto run = integrate_geodesic_run(q, {0, vec({0.0, 0.0}), vec({1.0, 0.0}), 0.0}, 1.2);
  for (std::size_t i = 0; i < run.curve.size(); ++i) {
    const auto& s = run.curve.samples[i];
    EXPECT_NEAR(s.point[0], run.curve.params[i], 1e-12);
    EXPECT_EQ(s.point[1], 0.0);
  }
  EXPECT_LE(run.norm_drift, 1e-8);
}

TEST(Geodesic, DriftPerUnitParameterOnBoostedCosWarp) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas q = quotient_atlas(ex.fol, *ex.gt);
  // boosted start: g(v, v) = -1.25 + cos^2(-0.8) * 1.0
  auto run = integrate_geodesic_run(q, {0, vec({-0.8, 0.0}), vec({1.5, 1.0}), 0.0}, 1.0);
  EXPECT_LE(run.norm_drift, 1e-7);
}

TEST(Geodesic, LeavingTheAtlas) {
  const auto& ex = get_example("cos_warp");
  ChartAtlas q = quotient_atlas(ex.fol, *ex.gt);
  GeodesicState s0{0, vec({1.0, 0.0}), vec({1.0, 0.0}), 0.0};
  try {
    integrate_geodesic(q, s0, 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LeftAtlas);
  }
  IntegratorConfig cfg;
  cfg.on_exit = ExitMode::Truncate;
  auto run = integrate_geodesic_run(q, s0, 5.0, {}, cfg);
  EXPECT_TRUE(run.left_domain);
  EXPECT_NEAR(run.curve.samples.back().point[0], kPi / 2 - 0.05, 1e-8);
}

TEST(Geodesic, ChartSwitchingAcrossMisnerArcs) {
  const auto& ex = get_example("misner_suspension");
  // along the circle direction the trajectory must cross both arcs and the twist
  auto run = integrate_geodesic_run(*ex.g, {0, vec({0.0, 0.0, 0.0}), vec({1.0, 0.0, 0.0}), 0.0}, 2.5);
  EXPECT_FALSE(run.left_domain);
  bool saw[2] = {false, false};
  for (const auto& s : run.curve.samples) saw[s.chart] = true;
  EXPECT_TRUE(saw[0] && saw[1]);
  EXPECT_LE(run.norm_drift, 1e-10);
}

TEST(Horizontal, HorizontalGeodesicsStayHorizontal) {
  for (const char* id : {"cos_warp", "desitter_warp", "logt_warp"}) {
    const auto& ex = get_example(id);
    const int n = ex.fol.dim();
    Vec x = ex.focal->leaf_point;
    Vec w = Vec::Zero(ex.fol.q);
    w[0] = 1.0;
    if (ex.fol.q > 1) w[1] = 0.3;
    Vec v = horizontal_lift(ex.fol, *ex.g, 0, x, w);
    IntegratorConfig cfg;
    cfg.on_exit = ExitMode::Truncate;
    auto c = integrate_geodesic(*ex.g, {0, x, v, 0.0}, 0.5, {}, cfg);
    EXPECT_LE(check_horizontal(ex.fol, *ex.g, c), 1e-7) << id;
    EXPECT_EQ(v.size(), n);
  }
}

TEST(Horizontal, LeafCurveIsFullyVertical) {
  const auto& ex = get_example("mink3_vertical");
  auto c = sample_curve(0, 0, 1, 8, [](double s) { return vec({3 * s, 0.1, 0.2}); },
                        [](double) { return vec({3, 0, 0}); });
  EXPECT_DOUBLE_EQ(check_horizontal(ex.fol, *ex.g, c), 3.0);
}

TEST(Horizontal, SlantedLineReportsVerticalSpeed) {
  const auto& ex = get_example("mink3_vertical");
  // (t, x, y) = (s, 0.2 s, 0.7 s): vertical speed 0.7
  auto c = sample_curve(0, 0, 1, 8, [](double s) { return vec({0.7 * s, s, 0.2 * s}); },
                        [](double) { return vec({0.7, 1, 0.2}); });
  EXPECT_DOUBLE_EQ(check_horizontal(ex.fol, *ex.g, c), 0.7);
}

TEST(Focal, MinkowskiIsExactlyLinear) {
  const auto& ex = get_example("mink3_vertical");
  auto r = focal_scan(ex.fol, *ex.gt, *ex.g, 0, Vec::Zero(3), vec({0, 1, 0}), 1.0);
  EXPECT_FALSE(r.first_zero_param.has_value());
  ASSERT_FALSE(r.samples.empty());
  for (const auto& s : r.samples) EXPECT_NEAR(s.scalar_jacobi, s.s, 1e-12 * s.s);
  EXPECT_LE((r.final_a - r.end_param * Mat::Identity(1, 1)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Focal, DeSitterScalarJacobiIsSinh) {
  const auto& ex = get_example("desitter_warp");
  const auto& f = *ex.focal;
  auto r = focal_scan(ex.fol, *ex.gt, *ex.g, f.chart, f.leaf_point, f.direction, f.max_param);
  EXPECT_FALSE(r.first_zero_param.has_value());
  for (const auto& s : r.samples) EXPECT_NEAR(s.scalar_jacobi, std::sinh(s.s), 1e-6) << s.s;
}

TEST(Focal, CosWarpRiccatiIsCotangent) {
  const auto& ex = get_example("cos_warp", {{"eps", 0.005}});
  const auto& f = *ex.focal;
  auto r = focal_scan(ex.fol, *ex.gt, *ex.g, f.chart, f.leaf_point, f.direction, f.max_param);
  EXPECT_FALSE(r.first_zero_param.has_value());
  EXPECT_TRUE(r.domain_end);
  double worst = 0.0;
  for (const auto& s : r.samples) worst = std::max(worst, std::abs(s.riccati - 1.0 / std::tan(s.s)));
  EXPECT_LE(worst, 1e-4);
  EXPECT_GT(std::abs(r.samples.back().riccati), 40.0);
}

TEST(Focal, DirectionChecks) {
  const auto& ex = get_example("mink3_vertical");
  try {
    focal_scan(ex.fol, *ex.gt, *ex.g, 0, Vec::Zero(3), vec({0, 0, 1}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotTimelike);
  }
  try {
    focal_scan(ex.fol, *ex.gt, *ex.g, 0, Vec::Zero(3), vec({1, 1, 0}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNormal);
  }
}

TEST(Shoot, CosWarpDiameter) {
  const auto& ex = get_example("cos_warp");
  auto est = shoot_diameter(ex.fol, *ex.gt, *ex.g, *ex.orient, ex.shoot_starts);
  EXPECT_GE(est.value, 0.99 * (kPi - 0.1));
  EXPECT_LE(est.value, kPi - 0.1 + 1e-6);
  EXPECT_GT(est.witness.size(), 2u);
}

TEST(Shoot, CosWarpWithCurvatureFourStaysBelowBound) {
  const auto& ex = get_example("cos_warp", {{"C", 4.0}});
  auto est = shoot_diameter(ex.fol, *ex.gt, *ex.g, *ex.orient, ex.shoot_starts);
  EXPECT_LE(est.value, kPi / 2);
  EXPECT_GE(est.value, 0.99 * (kPi / 2 - 0.1));
}

TEST(Shoot, FlatSlabIsOne) {
  const auto& ex = get_example("flat_slab");
  auto est = shoot_diameter(ex.fol, *ex.gt, *ex.g, *ex.orient, ex.shoot_starts);
  EXPECT_NEAR(est.value, 1.0, 0.01);
}

TEST(Shoot, EmptyGrid) {
  const auto& ex = get_example("flat_slab");
  try {
    shoot_diameter(ex.fol, *ex.gt, *ex.g, *ex.orient, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
  }
}
