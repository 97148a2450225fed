#pragma once

// Closed-form model functions: the Jacobi solutions sn_kappa and
// sn_{kappa,lambda}, their barriers, the (kappa, lambda) classification and
// the model mean curvatures H_kappa, H_{kappa,lambda}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wbcomp/extended_real.hpp"
#include "wbcomp/numerics.hpp"

namespace wbcomp {

/// Value and first derivative of a Jacobi solution at one point.
struct SnValue {
  double value = 0.0;
  double derivative = 0.0;
};

/// Solution of psi'' + kappa psi = 0 with psi(0) = 0, psi'(0) = 1.
inline SnValue sn_point(double kappa, double s) {
  if (kappa > 0.0) {
    const double a = std::sqrt(kappa);
    return {std::sin(a * s) / a, std::cos(a * s)};
  }
  if (kappa < 0.0) {
    const double a = std::sqrt(-kappa);
    return {std::sinh(a * s) / a, std::cosh(a * s)};
  }
  return {s, 1.0};
}

/// Solution of psi'' + kappa psi = 0 with psi(0) = 1, psi'(0) = -lambda.
/// Convex ball pairs use sin_kappa(C - s) / sin_kappa(C), which keeps full
/// relative accuracy next to the zero C.
inline SnValue sn_boundary(double kappa, double lambda, double s) {
  if (kappa > 0.0 && lambda > 0.0) {
    const double a = std::sqrt(kappa);
    const double C = (0.5 * numerics::kPi - std::atan(lambda / a)) / a;
    const double base = std::sin(a * C);
    return {std::sin(a * (C - s)) / base, -a * std::cos(a * (C - s)) / base};
  }
  if (kappa < 0.0 && lambda > std::sqrt(-kappa)) {
    const double a = std::sqrt(-kappa);
    const double C = std::atanh(a / lambda) / a;
    const double base = std::sinh(a * C);
    return {std::sinh(a * (C - s)) / base, -a * std::cosh(a * (C - s)) / base};
  }
  if (kappa > 0.0) {
    const double a = std::sqrt(kappa);
    const double cs = std::cos(a * s), sn = std::sin(a * s);
    return {cs - lambda * sn / a, -a * sn - lambda * cs};
  }
  if (kappa < 0.0) {
    // Exponential form: cosh - (lambda/a) sinh cancels badly when lambda ~ a.
    const double a = std::sqrt(-kappa);
    const double up = 0.5 * (1.0 - lambda / a) * std::exp(a * s);
    const double down = 0.5 * (1.0 + lambda / a) * std::exp(-a * s);
    return {up + down, a * (up - down)};
  }
  return {1.0 - lambda * s, -lambda};
}

namespace detail {
inline bool near_equal(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y));
}
}  // namespace detail

/// (kappa>0) or (kappa=0, lambda>0) or (kappa<0, lambda>sqrt|kappa|).
inline bool ball_condition(double kappa, double lambda) {
  if (kappa > 0.0) return true;
  if (kappa == 0.0) return lambda > 0.0;
  return lambda > std::sqrt(-kappa);
}

/// First positive zero of sn_{kappa,lambda}; +inf iff the ball-condition fails.
inline ExtendedReal barrier_C(double kappa, double lambda) {
  if (!ball_condition(kappa, lambda)) return ExtendedReal::infinity();
  if (kappa > 0.0) {
    const double a = std::sqrt(kappa);
    return (0.5 * numerics::kPi - std::atan(lambda / a)) / a;
  }
  if (kappa == 0.0) return 1.0 / lambda;
  const double a = std::sqrt(-kappa);
  return std::atanh(a / lambda) / a;
}

/// Root-finder route to C_{kappa,lambda}, independent of the branch formulas
/// above except for the bracket. Used as the oracle for barrier_C.
inline ExtendedReal barrier_C_bisection(double kappa, double lambda, double tol = 1e-13) {
  if (!ball_condition(kappa, lambda)) return ExtendedReal::infinity();
  auto f = [&](double s) { return sn_boundary(kappa, lambda, s).value; };
  double hi;
  if (kappa > 0.0) {
    hi = numerics::kPi / std::sqrt(kappa);
  } else {
    hi = 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
  }
  return numerics::bisect(f, 0.0, hi, tol);
}

/// First positive zero of sn'_{kappa,lambda} before C; +inf when none exists.
/// For kappa = lambda = 0 every point is critical and +inf is reported.
inline ExtendedReal barrier_D(double kappa, double lambda) {
  if (kappa > 0.0 && lambda < 0.0) {
    const double a = std::sqrt(kappa);
    return std::atan(-lambda / a) / a;
  }
  if (kappa < 0.0) {
    const double a = std::sqrt(-kappa);
    if (lambda > 0.0 && lambda < a) return std::atanh(lambda / a) / a;
  }
  return ExtendedReal::infinity();
}

/// Bisection oracle for barrier_D (same bracket policy as barrier_C_bisection).
inline ExtendedReal barrier_D_bisection(double kappa, double lambda, double tol = 1e-13) {
  if (barrier_D(kappa, lambda).is_infinite()) return ExtendedReal::infinity();
  auto f = [&](double s) { return sn_boundary(kappa, lambda, s).derivative; };
  double hi;
  if (kappa > 0.0) {
    hi = 0.5 * numerics::kPi / std::sqrt(kappa);
  } else {
    hi = 1.0;
    while (f(hi) < 0.0) hi *= 2.0;
  }
  return numerics::bisect(f, 0.0, hi, tol);
}

/// (kappa, lambda) with its five condition flags and barrier values.
struct ModelPair {
  double kappa = 0.0;
  double lambda = 0.0;
  bool ball = false;
  bool convex_ball = false;
  bool monotone = false;
  bool weakly_monotone = false;
  bool model = false;
  ExtendedReal C;
  ExtendedReal D;

  [[nodiscard]] std::string flags_string() const {
    std::string s;
    auto add = [&](bool f, const char* name) {
      if (!f) return;
      if (!s.empty()) s += ",";
      s += name;
    };
    add(ball, "ball");
    add(convex_ball, "convex_ball");
    add(monotone, "monotone");
    add(weakly_monotone, "weakly_monotone");
    add(model, "model");
    return s.empty() ? "none" : s;
  }
};

inline ModelPair classify_pair(double kappa, double lambda) {
  ModelPair m;
  m.kappa = kappa;
  m.lambda = lambda;
  const double root = std::sqrt(std::abs(kappa));
  m.ball = ball_condition(kappa, lambda);
  m.convex_ball = m.ball && lambda >= 0.0;
  m.monotone = m.convex_ball || (kappa <= 0.0 && detail::near_equal(lambda, root));
  m.weakly_monotone =
      kappa >= 0.0 || std::abs(lambda) >= root || detail::near_equal(std::abs(lambda), root);
  m.model = (kappa > 0.0 && lambda < 0.0) || (kappa == 0.0 && lambda == 0.0) ||
            (kappa < 0.0 && lambda > 0.0 && lambda < root);
  m.C = barrier_C(kappa, lambda);
  m.D = barrier_D(kappa, lambda);
  return m;
}

/// True for kappa <= 0 and lambda = sqrt|kappa|, where sn_{kappa,lambda} = e^{-lambda s}.
inline bool exponential_pair(double kappa, double lambda) {
  return kappa <= 0.0 && detail::near_equal(lambda, std::sqrt(-kappa));
}

/// Largest s accepted by H_boundary: refuses a relative 1e-9 band below C.
inline double H_boundary_limit(double kappa, double lambda) {
  const auto C = barrier_C(kappa, lambda);
  if (C.is_infinite()) return std::numeric_limits<double>::infinity();
  return C.value() - 1e-9 * std::max(1.0, C.value());
}

/// H_{kappa,lambda}(s) = -c^{-1} sn'/sn, defined on [0, C_{kappa,lambda}[.
inline double H_boundary(double c, double kappa, double lambda, double s) {
  if (!(s >= 0.0)) throw DomainError("H_boundary: s must be >= 0");
  if (s >= H_boundary_limit(kappa, lambda))
    throw DomainError("H_boundary: s at or beyond the barrier C_{kappa,lambda}");
  if (kappa < 0.0) {
    const double k = std::sqrt(-kappa), up = 1.0 - lambda / k;
    if (up > 0.0) {
      const double r = (1.0 + lambda / k) / up * std::exp(-2.0 * k * s);
      return -(k / c) * (1.0 - r) / (1.0 + r);
    }
  }
  const auto v = sn_boundary(kappa, lambda, s);
  return -(v.derivative / v.value) / c;
}

/// log sn_{kappa,lambda}(s) on [0, C[, finite where sn itself overflows.
inline double log_sn_boundary(double kappa, double lambda, double s) {
  if (kappa < 0.0) {
    const double k = std::sqrt(-kappa), up = 1.0 - lambda / k;
    if (up > 0.0) {
      const double r = (1.0 + lambda / k) / up * std::exp(-2.0 * k * s);
      return k * s + std::log(0.5 * up) + std::log1p(r);
    }
  }
  return std::log(sn_boundary(kappa, lambda, s).value);
}

/// d/ds H_{kappa,lambda}, from the quotient rule with sn'' = -kappa sn.
inline double H_boundary_derivative(double c, double kappa, double lambda, double s) {
  if (!(s >= 0.0) || s >= H_boundary_limit(kappa, lambda))
    throw DomainError("H_boundary_derivative: s outside [0, C[");
  const auto v = sn_boundary(kappa, lambda, s);
  const double second = -kappa * v.value;
  return -(second * v.value - v.derivative * v.derivative) / (v.value * v.value) / c;
}

/// First positive zero of sn_kappa (pi/sqrt(kappa) for kappa > 0, else +inf).
inline ExtendedReal point_barrier(double kappa) {
  if (kappa > 0.0) return numerics::kPi / std::sqrt(kappa);
  return ExtendedReal::infinity();
}

/// H_kappa(s) = -c^{-1} sn_kappa'/sn_kappa on ]0, first zero of sn_kappa[.
inline double H_point(double c, double kappa, double s) {
  if (!(s > 0.0)) throw DomainError("H_point: s must be > 0");
  const auto Z = point_barrier(kappa);
  if (Z.is_finite() && s >= Z.value() - 1e-9 * std::max(1.0, Z.value()))
    throw DomainError("H_point: s at or beyond the first zero of sn_kappa");
  const auto v = sn_point(kappa, s);
  return -(v.derivative / v.value) / c;
}

/// sn_{kappa,lambda}^{1/c}, clamped to 0 past the barrier.
inline double sn_power(double c, double kappa, double lambda, double s) {
  const double v = sn_boundary(kappa, lambda, s).value;
  return v > 0.0 ? std::pow(v, 1.0 / c) : 0.0;
}

/// S_{kappa,lambda}(r) = int_0^{min(r, C)} sn^{1/c}.
inline double S_volume(double c, double kappa, double lambda, ExtendedReal r) {
  if (!(r > ExtendedReal(0.0))) throw DomainError("S_volume: r must be > 0");
  const auto upper = min(r, barrier_C(kappa, lambda));
  if (upper.is_infinite()) return std::numeric_limits<double>::infinity();
  return numerics::integrate([&](double x) { return sn_power(c, kappa, lambda, x); }, 0.0,
                             upper.value(), 1e-14);
}

/// log S_{kappa,lambda}(r), finite where S itself overflows.
inline double log_S_volume(double c, double kappa, double lambda, ExtendedReal r) {
  if (!(r > ExtendedReal(0.0))) throw DomainError("log_S_volume: r must be > 0");
  const auto C = barrier_C(kappa, lambda);
  const auto upper = min(r, C);
  if (upper.is_infinite()) return std::numeric_limits<double>::infinity();
  const double U = upper.value();
  auto g = [&](double x) {
    return ExtendedReal(x) < C ? log_sn_boundary(kappa, lambda, x) / c : -std::numeric_limits<double>::infinity();
  };
  double peak = g(0.0), where = 0.0;
  for (int i = 1; i <= 256; ++i) {
    const double x = U * i / 256.0, v = g(x);
    if (v > peak) {
      peak = v;
      where = x;
    }
  }
  // The integrand may concentrate within e^{-|g'|} of an end or of the peak:
  // cells shrink geometrically toward those three anchors.
  std::vector<double> cuts{0.0, U};
  for (double d = U; d > U * 1e-13; d *= 0.5)
    for (double x : {d, U - d, where - d, where + d})
      if (x > 0.0 && x < U) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto integrand = [&](double x) {
    const double v = g(x);
    return std::isfinite(v) ? std::exp(v - peak) : 0.0;
  };
  double I = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) I += numerics::integrate(integrand, cuts[i - 1], cuts[i], 1e-14);
  return peak + std::log(I);
}

/// sup over s in [lo, hi[ of (int_s^hi sn^{1/c}) / sn^{1/c}(s): a 1024-point
/// scan of cumulative tail integrals followed by a local Brent polish.
inline double tail_ratio_sup(double c, double kappa, double lambda, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("tail_ratio_sup: empty interval");
  constexpr int kScan = 1024;
  auto weight = [&](double x) { return sn_power(c, kappa, lambda, x); };
  const double h = (hi - lo) / kScan;
  std::vector<double> tail(kScan + 1, 0.0);
  for (int i = kScan - 1; i >= 0; --i)
    tail[i] = tail[i + 1] + numerics::integrate(weight, lo + h * i, lo + h * (i + 1), 1e-14);
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i < kScan; ++i) {
    const double w = weight(lo + h * i);
    if (w <= 0.0) continue;
    const double r = tail[i] / w;
    if (r > best_val) {
      best_val = r;
      best = i;
    }
  }
  auto objective = [&](double s) {
    const double w = weight(s);
    if (w <= 0.0) return 0.0;
    return -numerics::integrate(weight, s, hi, 1e-14) / w;
  };
  const double a = lo + h * std::max(0, best - 1);
  const double b = lo + h * std::min(kScan - 1, best + 1);
  if (b > a) {
    const auto [x, fx] = numerics::minimize(objective, a, b, 45);
    (void)x;
    best_val = std::max(best_val, -fx);
  }
  return best_val;
}

/// C(kappa, lambda, D) = sup_{s in [0,D[} (int_s^D sn^{1/c}) / sn^{1/c}(s).
/// For kappa < 0 and lambda = sqrt|kappa| the closed form
/// (c^{-1} lambda)^{-1} (1 - e^{-c^{-1} lambda D}) is used, including D = +inf.
inline double spectrum_constant(double c, double kappa, double lambda, ExtendedReal D) {
  if (!(D > ExtendedReal(0.0))) throw DomainError("spectrum_constant: D must be > 0");
  if (kappa < 0.0 && exponential_pair(kappa, lambda)) {
    const double k = lambda / c;
    if (D.is_infinite()) return 1.0 / k;
    return -std::expm1(-k * D.value()) / k;
  }
  if (D.is_infinite())
    throw DomainError("spectrum_constant: D = +inf requires kappa < 0 and lambda = sqrt|kappa|");
  const auto C = barrier_C(kappa, lambda);
  if (C.is_finite() && D.value() > C.value() * (1.0 + 1e-12))
    throw DomainError("spectrum_constant: D beyond C_{kappa,lambda}");
  return tail_ratio_sup(c, kappa, lambda, 0.0, D.value());
}

}  // namespace wbcomp
