#pragma once

// Minimal forward-mode differentiation types used by the biped kinematics.
//
// Dual<N> carries a value and N first partials. Jet2 carries the first three
// Taylor coefficients of f(q + s qdot) in s, which gives both J qdot and
// (dJ/dt) qdot from a single pass.

#include <array>
#include <cmath>

namespace gaitlab::ad {

template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  static Dual variable(double value, int index) {
    Dual r(value);
    r.d[static_cast<std::size_t>(index)] = 1.0;
    return r;
  }
};

template <int N>
inline Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.v + b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

template <int N>
inline Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.v - b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

template <int N>
inline Dual<N> operator-(const Dual<N>& a) {
  Dual<N> r(-a.v);
  for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}

template <int N>
inline Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r(a.v * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a.v * b.d[i] + a.d[i] * b.v;
  return r;
}

template <int N>
inline Dual<N> operator*(double a, const Dual<N>& b) {
  Dual<N> r(a * b.v);
  for (int i = 0; i < N; ++i) r.d[i] = a * b.d[i];
  return r;
}

template <int N>
inline Dual<N> operator*(const Dual<N>& a, double b) {
  return b * a;
}

template <int N>
inline Dual<N> sin(const Dual<N>& a) {
  const double c = std::cos(a.v);
  Dual<N> r(std::sin(a.v));
  for (int i = 0; i < N; ++i) r.d[i] = c * a.d[i];
  return r;
}

template <int N>
inline Dual<N> cos(const Dual<N>& a) {
  const double s = std::sin(a.v);
  Dual<N> r(std::cos(a.v));
  for (int i = 0; i < N; ++i) r.d[i] = -s * a.d[i];
  return r;
}

/// Truncated Taylor series v + d1 s + d2 s^2.
struct Jet2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Jet2(double value, double first, double second) : v(value), d1(first), d2(second) {}
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v, a.v * b.d1 + a.d1 * b.v, a.v * b.d2 + a.d1 * b.d1 + a.d2 * b.v};
}
inline Jet2 operator*(double a, const Jet2& b) { return {a * b.v, a * b.d1, a * b.d2}; }
inline Jet2 operator*(const Jet2& a, double b) { return b * a; }

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return {s, c * a.d1, c * a.d2 - 0.5 * s * a.d1 * a.d1};
}

inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return {c, -s * a.d1, -s * a.d2 - 0.5 * c * a.d1 * a.d1};
}

inline double value_of(double a) { return a; }
template <int N>
inline double value_of(const Dual<N>& a) {
  return a.v;
}
inline double value_of(const Jet2& a) { return a.v; }

}  // namespace gaitlab::ad
