#pragma once

// Second-order forward-mode differentiation.
//
// A Jet carries the value, gradient and Hessian of a scalar quantity with
// respect to up to three chart coordinates. Arithmetic on jets is truncated
// Taylor arithmetic, so any expression built from seeded coordinate jets
// yields exact first and second partials.
//
// Components that a computation cannot supply (for instance the Hessian of a
// Lie bracket built from order-2 inputs) are filled with NaN so that misuse
// shows up instead of silently producing zeros.

#include <array>
#include <cmath>
#include <limits>

namespace mcurv {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;

struct Jet {
  double v = 0.0;
  std::array<double, kMaxDim> d{};
  std::array<std::array<double, kMaxDim>, kMaxDim> h{};

  static Jet constant(double c) {
    Jet j;
    j.v = c;
    return j;
  }

  // Coordinate x_i seeded at value x.
  static Jet variable(double x, int i) {
    Jet j;
    j.v = x;
    j.d[i] = 1.0;
    return j;
  }
};

using JetPoint = std::array<Jet, kMaxDim>;
using VecJet = std::array<Jet, kMaxDim>;
using MatJet = std::array<std::array<Jet, kMaxDim>, kMaxDim>;

inline JetPoint seed(const Point& x) {
  JetPoint p;
  for (int i = 0; i < kMaxDim; ++i) p[i] = Jet::variable(x[i], i);
  return p;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  for (int i = 0; i < kMaxDim; ++i) {
    r.d[i] = a.d[i] + b.d[i];
    for (int j = 0; j < kMaxDim; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
  }
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  for (int i = 0; i < kMaxDim; ++i) {
    r.d[i] = -a.d[i];
    for (int j = 0; j < kMaxDim; ++j) r.h[i][j] = -a.h[i][j];
  }
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  for (int i = 0; i < kMaxDim; ++i) {
    r.d[i] = a.d[i] - b.d[i];
    for (int j = 0; j < kMaxDim; ++j) r.h[i][j] = a.h[i][j] - b.h[i][j];
  }
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = a.v * b.d[i] + b.v * a.d[i];
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = 0; j < kMaxDim; ++j)
      r.h[i][j] = a.v * b.h[i][j] + b.v * a.h[i][j] + a.d[i] * b.d[j] +
                  b.d[i] * a.d[j];
  return r;
}

inline Jet operator*(double c, const Jet& a) {
  Jet r;
  r.v = c * a.v;
  for (int i = 0; i < kMaxDim; ++i) {
    r.d[i] = c * a.d[i];
    for (int j = 0; j < kMaxDim; ++j) r.h[i][j] = c * a.h[i][j];
  }
  return r;
}

inline Jet operator*(const Jet& a, double c) { return c * a; }

inline Jet operator+(const Jet& a, double c) {
  Jet r = a;
  r.v += c;
  return r;
}
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, double c) { return a + (-c); }
inline Jet operator-(double c, const Jet& a) { return (-a) + c; }

inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

// f(a) given f, f', f'' evaluated at a.v.
inline Jet chain(const Jet& a, double f0, double f1, double f2) {
  Jet r;
  r.v = f0;
  for (int i = 0; i < kMaxDim; ++i) r.d[i] = f1 * a.d[i];
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = 0; j < kMaxDim; ++j)
      r.h[i][j] = f1 * a.h[i][j] + f2 * a.d[i] * a.d[j];
  return r;
}

inline Jet reciprocal(const Jet& a) {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double c) { return (1.0 / c) * a; }
inline Jet operator/(double c, const Jet& a) { return c * reciprocal(a); }

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

inline Jet tan(const Jet& a) {
  const double t = std::tan(a.v);
  const double sec2 = 1.0 + t * t;
  return chain(a, t, sec2, 2.0 * t * sec2);
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

inline Jet log(const Jet& a) {
  const double inv = 1.0 / a.v;
  return chain(a, std::log(a.v), inv, -inv * inv);
}

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

// a^e for real e; a.v must be positive unless e is a small integer handled by
// square().
inline Jet pow(const Jet& a, double e) {
  const double p = std::pow(a.v, e);
  return chain(a, p, e * p / a.v, e * (e - 1.0) * p / (a.v * a.v));
}

inline Jet square(const Jet& a) { return a * a; }

// d/dx_i as a jet one order lower. The Hessian of the result is unknown.
inline Jet partial(const Jet& a, int i) {
  Jet r;
  r.v = a.d[i];
  for (int j = 0; j < kMaxDim; ++j) r.d[j] = a.h[i][j];
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& row : r.h) row.fill(nan);
  return r;
}

// Drops derivative information above `order`, replacing it with NaN.
inline Jet truncate(Jet a, int order) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (order < 2)
    for (auto& row : a.h) row.fill(nan);
  if (order < 1) a.d.fill(nan);
  return a;
}

}  // namespace mcurv
