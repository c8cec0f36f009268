#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> yields exact mixed
// second partial derivatives, which is what the curvature engine relies on.

#include <cmath>
#include <type_traits>

#include <Eigen/Core>

namespace leafcausal {

template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    T inv = T(1.0) / o.v;
    d = (d - v * inv * o.d) * inv;
    v *= inv;
    return *this;
  }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Innermost real value of a (possibly nested) dual.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <class T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a) {
  return a;
}

// Mixed operations with plain doubles.
template <class T>
Dual<T> operator+(Dual<T> a, double b) {
  a.v += b;
  return a;
}
template <class T>
Dual<T> operator+(double b, Dual<T> a) {
  a.v += b;
  return a;
}
template <class T>
Dual<T> operator-(Dual<T> a, double b) {
  a.v -= b;
  return a;
}
template <class T>
Dual<T> operator-(double b, const Dual<T>& a) {
  return {b - a.v, -a.d};
}
template <class T>
Dual<T> operator*(Dual<T> a, double b) {
  a.v *= b;
  a.d *= b;
  return a;
}
template <class T>
Dual<T> operator*(double b, Dual<T> a) {
  a.v *= b;
  a.d *= b;
  return a;
}
template <class T>
Dual<T> operator/(Dual<T> a, double b) {
  a.v /= b;
  a.d /= b;
  return a;
}
template <class T>
Dual<T> operator/(double b, const Dual<T>& a) {
  return Dual<T>(b) / a;
}

template <class T>
bool operator<(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) < value_of(b);
}
template <class T>
bool operator>(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) > value_of(b);
}
template <class T>
bool operator<=(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) <= value_of(b);
}
template <class T>
bool operator>=(const Dual<T>& a, const Dual<T>& b) {
  return value_of(a) >= value_of(b);
}
template <class T>
bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return a.v == b.v && a.d == b.d;
}
template <class T>
bool operator!=(const Dual<T>& a, const Dual<T>& b) {
  return !(a == b);
}

// Elementary functions. Unqualified calls in generic metric code pick these
// up through ADL; plain doubles resolve to <cmath> via using-declarations.
template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -(a.d * sin(a.v))};
}
template <class T>
Dual<T> tan(const Dual<T>& a) {
  using std::cos;
  using std::tan;
  T c = cos(a.v);
  return {tan(a.v), a.d / (c * c)};
}
template <class T>
Dual<T> sinh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {sinh(a.v), a.d * cosh(a.v)};
}
template <class T>
Dual<T> cosh(const Dual<T>& a) {
  using std::cosh;
  using std::sinh;
  return {cosh(a.v), a.d * sinh(a.v)};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  T t = tanh(a.v);
  return {t, a.d * (T(1.0) - t * t)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return value_of(a) < 0.0 ? -a : a;
}
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  return {pow(a.v, p), a.d * (p * pow(a.v, p - 1.0))};
}

template <class T>
bool isfinite(const Dual<T>& a) {
  using std::isfinite;
  return isfinite(a.v) && isfinite(a.d);
}

/// Seeds a first-order dual: value x, derivative `seed`.
inline Dual1 make_dual(double x, double seed) { return {x, seed}; }

/// Seeds a nested dual for the mixed partial along directions (i, j):
/// outer derivative tracks seed_i, inner tracks seed_j.
inline Dual2 make_dual2(double x, double seed_i, double seed_j) {
  return {Dual1(x, seed_j), Dual1(seed_i, 0.0)};
}

}  // namespace leafcausal

namespace Eigen {

template <class T>
struct NumTraits<leafcausal::Dual<T>> : NumTraits<double> {
  using Real = leafcausal::Dual<T>;
  using NonInteger = leafcausal::Dual<T>;
  using Nested = leafcausal::Dual<T>;
  using Literal = leafcausal::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 4,
    MulCost = 8
  };
};

template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<leafcausal::Dual<T>, double, BinaryOp> {
  using ReturnType = leafcausal::Dual<T>;
};
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<double, leafcausal::Dual<T>, BinaryOp> {
  using ReturnType = leafcausal::Dual<T>;
};

}  // namespace Eigen
