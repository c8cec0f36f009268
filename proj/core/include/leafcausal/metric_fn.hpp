#pragma once

#include <functional>
#include <type_traits>
#include <utility>

#include <Eigen/Core>

#include "leafcausal/dual.hpp"

namespace leafcausal {

template <class T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Scalar type of a coordinate vector passed to a generic coefficient lambda.
template <class V>
using scalar_of_t = typename std::decay_t<V>::Scalar;

/// A closed-form symmetric matrix field x -> g(x), instantiated for plain
/// doubles and for first- and second-order duals so the differentiation
/// engine can take exact derivatives of the same coefficient code.
class MetricFn {
 public:
  MetricFn() = default;

  /// `f` must be a generic callable `(const VecX<T>&) -> MatX<T>`.
  template <class F>
  static MetricFn from(int dim, F f) {
    MetricFn m;
    m.dim_ = dim;
    m.f0_ = [f](const VecX<double>& x) { return MatX<double>(f(x)); };
    m.f1_ = [f](const VecX<Dual1>& x) { return MatX<Dual1>(f(x)); };
    m.f2_ = [f](const VecX<Dual2>& x) { return MatX<Dual2>(f(x)); };
    return m;
  }

  int dim() const { return dim_; }
  explicit operator bool() const { return static_cast<bool>(f0_); }

  MatX<double> operator()(const VecX<double>& x) const { return f0_(x); }
  MatX<Dual1> operator()(const VecX<Dual1>& x) const { return f1_(x); }
  MatX<Dual2> operator()(const VecX<Dual2>& x) const { return f2_(x); }

 private:
  int dim_ = 0;
  std::function<MatX<double>(const VecX<double>&)> f0_;
  std::function<MatX<Dual1>(const VecX<Dual1>&)> f1_;
  std::function<MatX<Dual2>(const VecX<Dual2>&)> f2_;
};

/// Applies `op` to the coefficient matrix of `base` for every scalar type.
/// `op` is a generic callable `(const VecX<T>& x, MatX<T> g) -> MatX<T>`.
template <class Op>
MetricFn transform_metric(int dim, MetricFn base, Op op) {
  return MetricFn::from(dim, [base = std::move(base), op](const auto& x) {
    return op(x, base(x));
  });
}

}  // namespace leafcausal
