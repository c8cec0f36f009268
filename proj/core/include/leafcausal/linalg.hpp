#pragma once

#include <cmath>
#include <utility>

#include "leafcausal/error.hpp"
#include "leafcausal/metric_fn.hpp"

namespace leafcausal {

/// Solves A X = B by Gaussian elimination with partial pivoting on the real
/// part. Works for dual scalars, where Eigen's decompositions do not.
template <class T>
MatX<T> solve_generic(MatX<T> A, MatX<T> B) {
  const Eigen::Index n = A.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(value_of(A(i, k))) > std::abs(value_of(A(piv, k)))) piv = i;
    if (value_of(A(piv, k)) == 0.0) throw Error(ErrorCode::SingularMetric, "singular block");
    if (piv != k) {
      A.row(k).swap(A.row(piv));
      B.row(k).swap(B.row(piv));
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      T f = A(i, k) / A(k, k);
      if (value_of(f) == 0.0 && !is_dual<T>::value) continue;
      A.row(i) -= f * A.row(k);
      B.row(i) -= f * B.row(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    B.row(k) /= A(k, k);
    for (Eigen::Index i = 0; i < k; ++i) B.row(i) -= A(i, k) * B.row(k);
  }
  return B;
}

/// Orthonormal frame of a nondegenerate symmetric form, built by
/// Gram-Schmidt starting from `first` and then the coordinate axes.
/// Columns of `e` satisfy g(e_i, e_j) = eps_i delta_ij.
struct Frame {
  Mat e;
  Vec eps;
};

inline Frame orthonormal_frame(const Mat& g, const Vec& first) {
  const Eigen::Index n = g.rows();
  Frame f{Mat::Zero(n, n), Vec::Zero(n)};
  Eigen::Index k = 0;
  auto try_add = [&](Vec v) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < k; ++j) v -= f.eps[j] * v.dot(g * f.e.col(j)) * f.e.col(j);
    double q = v.dot(g * v);
    double scale = std::max(1e-300, v.squaredNorm());
    if (std::abs(q) < 1e-10 * scale) return;
    f.e.col(k) = v / std::sqrt(std::abs(q));
    f.eps[k] = q < 0 ? -1.0 : 1.0;
    ++k;
  };
  if (first.size() == n && first.squaredNorm() > 0) try_add(first);
  for (Eigen::Index i = 0; i < n && k < n; ++i) try_add(Vec::Unit(n, i));
  // null coordinate axes: fall back to sums and differences
  for (Eigen::Index i = 0; i < n && k < n; ++i)
    for (Eigen::Index j = i + 1; j < n && k < n; ++j) {
      try_add(Vec::Unit(n, i) + Vec::Unit(n, j));
      if (k < n) try_add(Vec::Unit(n, i) - Vec::Unit(n, j));
    }
  if (k < n) throw Error(ErrorCode::SingularMetric, "could not complete an orthonormal frame");
  return f;
}

}  // namespace leafcausal
