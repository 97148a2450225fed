#pragma once

// Second-order forward-mode jets: (value, first, second derivative) of a
// scalar function of one variable, propagated through arithmetic.

#include <cmath>

namespace wbcomp {

struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static constexpr Jet constant(double x) { return {x, 0.0, 0.0}; }
  static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }

  [[nodiscard]] constexpr bool is_constant() const { return d1 == 0.0 && d2 == 0.0; }
};

/// Apply a scalar function given its value and first two derivatives at j.v.
constexpr Jet chain(const Jet& j, double f, double fp, double fpp) {
  return {f, fp * j.d1, fpp * j.d1 * j.d1 + fp * j.d2};
}

constexpr Jet operator-(const Jet& a) { return {-a.v, -a.d1, -a.d2}; }
constexpr Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
constexpr Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
constexpr Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
constexpr Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.d1, s * a.d2}; }
constexpr Jet operator*(const Jet& a, double s) { return s * a; }
constexpr Jet operator+(const Jet& a, double s) { return {a.v + s, a.d1, a.d2}; }
constexpr Jet operator+(double s, const Jet& a) { return a + s; }
constexpr Jet operator-(const Jet& a, double s) { return {a.v - s, a.d1, a.d2}; }
constexpr Jet operator-(double s, const Jet& a) { return {s - a.v, -a.d1, -a.d2}; }

inline Jet reciprocal(const Jet& a) {
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}
inline Jet log(const Jet& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}
inline Jet sinh(const Jet& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return chain(a, s, c, s);
}
inline Jet cosh(const Jet& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return chain(a, c, s, c);
}
inline Jet sqrt(const Jet& a) {
  const double r = std::sqrt(a.v);
  return chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}

/// a^k for a constant exponent k; negative bases are fine for integer k.
inline Jet pow(const Jet& a, double k) {
  if (k == 0.0) return Jet::constant(1.0);
  if (k == 1.0) return a;
  if (k == 2.0) return a * a;
  const double p2 = std::pow(a.v, k - 2.0);
  const double p1 = p2 * a.v;
  return chain(a, p1 * a.v, k * p1, k * (k - 1.0) * p2);
}

/// a^b; falls back to exp(b log a) when the exponent varies.
inline Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) return pow(a, b.v);
  return exp(b * log(a));
}

}  // namespace wbcomp
