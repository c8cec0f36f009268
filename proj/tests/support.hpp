#pragma once

#include <functional>
#include <string>

#include "leafcausal/scenario.hpp"

namespace leafcausal::testing {

inline MetricFn constant(const Mat& G) {
  return MetricFn::from(static_cast<int>(G.rows()), [G](const auto& x) {
    using T = scalar_of_t<decltype(x)>;
    return MatX<T>(G.template cast<T>());
  });
}

inline Mat minkowski(int n) {
  Mat G = Mat::Identity(n, n);
  G(0, 0) = -1.0;
  return G;
}

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// Samples s -> (point(s), point'(s)) on a uniform grid of `intervals` cells.
inline CurveSamples sample_curve(int chart, double a, double b, int intervals,
                                 const std::function<Vec(double)>& point,
                                 const std::function<Vec(double)>& velocity) {
  CurveSamples c;
  for (int i = 0; i <= intervals; ++i) {
    double s = a + (b - a) * i / intervals;
    c.params.push_back(s);
    c.samples.push_back({chart, point(s), velocity(s), std::nullopt});
  }
  return c;
}

inline Scenario scenario(const std::string& text) { return parse_scenario(text); }

}  // namespace leafcausal::testing
