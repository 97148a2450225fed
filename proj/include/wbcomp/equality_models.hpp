#pragma once

// Constructors for the warped products that realize equality in the
// boundary Laplacian comparison, and for the model balls B^n_{kappa,lambda}.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "wbcomp/jet.hpp"
#include "wbcomp/manifold.hpp"
#include "wbcomp/model_functions.hpp"
#include "wbcomp/numerics.hpp"
#include "wbcomp/params.hpp"

namespace wbcomp {

/// sn_{kappa,lambda} composed with a jet s(t).
inline Jet sn_jet(double kappa, double lambda, const Jet& s) {
  const auto v = sn_boundary(kappa, lambda, s.v);
  return chain(s, v.value, v.derivative, -kappa * v.value);
}

enum class EqualityCase { DimensionN, Generic, NOne };

inline const char* equality_case_name(EqualityCase c) {
  switch (c) {
    case EqualityCase::DimensionN: return "N=n";
    case EqualityCase::Generic: return "N!=1,n";
    case EqualityCase::NOne: return "N=1";
  }
  return "?";
}

/// The case forced by N.
inline EqualityCase equality_case_for(const CurvatureParams& p) {
  if (p.N_is_n()) return EqualityCase::DimensionN;
  if (p.N_is_one()) return EqualityCase::NOne;
  return EqualityCase::Generic;
}

/// How far the model extends: a radius T, a target value of s_{f,z}, or as
/// far as the model goes (up to the apex for balls).
struct Extent {
  enum class Kind { Radius, STarget, Full };
  Kind kind = Kind::Full;
  double value = 0.0;

  static Extent radius(double T) { return {Kind::Radius, T}; }
  static Extent s_target(double s) { return {Kind::STarget, s}; }
  /// For the N = 1 case `search_limit` bounds the t-range scanned for the apex.
  static Extent full(double search_limit = 0.0) { return {Kind::Full, search_limit}; }
};

using DensityFn = std::function<Jet(double)>;

namespace detail {

/// Monotone map x -> y = int_0^x g, g > 0, stored as a table of exact cell
/// integrals; evaluation adds a 15-point Gauss rule over the partial cell and
/// the inverse runs safeguarded Newton inside one cell. With a finite
/// `singular_at` the grid is graded so each cell is at most 5% of its
/// distance to that point.
class MonotoneTable {
 public:
  MonotoneTable() = default;
  MonotoneTable(std::function<double(double)> g, double x_max, int cells,
                double singular_at = std::numeric_limits<double>::infinity())
      : g_(std::move(g)) {
    const double h = x_max / cells;
    x_.push_back(0.0);
    while (x_.back() < x_max) {
      double step = h;
      if (std::isfinite(singular_at)) step = std::min(step, 0.05 * (singular_at - x_.back()));
      x_.push_back(std::min(x_max, x_.back() + step));
      if (x_max - x_.back() < 1e-3 * step) x_.back() = x_max;
    }
    y_.assign(x_.size(), 0.0);
    g_at_.assign(x_.size(), 0.0);
    g_at_[0] = g_(x_[0]);
    for (std::size_t i = 1; i < x_.size(); ++i) {
      y_[i] = y_[i - 1] + numerics::integrate(g_, x_[i - 1], x_[i], 1e-15);
      g_at_[i] = g_(x_[i]);
    }
  }

  [[nodiscard]] double x_max() const { return x_.back(); }
  [[nodiscard]] double y_max() const { return y_.back(); }

  [[nodiscard]] double forward(double x) const {
    if (x >= x_.back()) return y_.back();
    const std::size_t i = cell(x_, x);
    return y_[i] + partial(i, x);
  }

  [[nodiscard]] double inverse(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= y_.back()) return x_.back();
    const std::size_t i = cell(y_, y);
    double lo = x_[i], hi = x_[i + 1];
    // Cubic Hermite guess for x(y), using dx/dy = 1/g at both cell ends.
    const double dy = y_[i + 1] - y_[i], u = (y - y_[i]) / dy;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    double x = h00 * lo + h10 * dy / g_at_[i] + h01 * hi + h11 * dy / g_at_[i + 1];
    if (!(x > lo && x < hi)) x = lo + (hi - lo) * u;
    for (int it = 0; it < 60; ++it) {
      const double r = y_[i] + partial(i, x) - y;
      if (std::abs(r) <= 4e-16 * y) return x;
      if (r > 0) hi = x;
      else lo = x;
      double next = x - r / g_(x);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 2e-16 * std::max(1e-300, std::abs(x)) || hi - lo <= 0.0) return next;
      x = next;
    }
    return x;
  }

 private:
  /// int_{x_i}^x g, taken from whichever cell end is nearer.
  [[nodiscard]] double partial(std::size_t i, double x) const {
    using Gauss = boost::math::quadrature::gauss<double, 15>;
    if (x - x_[i] <= x_[i + 1] - x) return Gauss::integrate(g_, x_[i], x);
    return (y_[i + 1] - y_[i]) - Gauss::integrate(g_, x, x_[i + 1]);
  }

  static std::size_t cell(const std::vector<double>& v, double q) {
    auto it = std::upper_bound(v.begin(), v.end(), q);
    std::size_t i = std::size_t(std::max<std::ptrdiff_t>(0, it - v.begin() - 1));
    return std::min(i, v.size() - 2);
  }

  std::function<double(double)> g_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> g_at_;
};

inline double barrier_margin(double C) { return 1e-6 * std::max(1.0, C); }

}  // namespace detail

/// B^n_{kappa,lambda}: w = sn_{kappa,lambda}, phi = 0, T = C_{kappa,lambda},
/// fiber the round sphere of radius sn_kappa(C) = 1/|sn'_{kappa,lambda}(C)|.
inline WarpedManifold build_model_ball(int n, double kappa, double lambda) {
  if (!ball_condition(kappa, lambda))
    throw InvalidParams("build_model_ball: (kappa, lambda) fails the ball-condition");
  const double C = barrier_C(kappa, lambda).value();
  const double radius = 1.0 / std::abs(sn_boundary(kappa, lambda, C).derivative);
  RadialProfile profile(
      [kappa, lambda](double t) {
        return ProfilePoint{sn_jet(kappa, lambda, Jet::variable(t)), Jet::constant(0.0)};
      },
      C, "model ball sn_{" + ExtendedReal(kappa).to_string() + "," + ExtendedReal(lambda).to_string() + "}");
  return WarpedManifold(n, Fiber::sphere(n, radius), profile, Topology::BallApex);
}

/// Equality model for the boundary Laplacian comparison.
///  N = n:      phi = f0, w = sn_{kappa e^{-2a f0}, lambda e^{-a f0}}(t)
///  N != 1, n:  phi = f0 - beta log sn(s), w = sn(s)^alpha with
///              beta = eps r c^{-1}, alpha = c^{-1}(1 - eps r)/(n-1), r = (N-n)/(N-1),
///              and s' = e^{-a phi} solved by inverting t(s) = e^{a f0} int_0^s sn^{-a beta}
///  N = 1:      phi given, s = int e^{-a phi}, w = e^{(phi - phi(0))/(n-1)} sn(s)
/// where a = 2(1-eps)/(n-1) and sn = sn_{kappa,lambda}.
inline WarpedManifold build_equality_model(EqualityCase which, const CurvatureParams& params,
                                           Fiber fiber, double f0, Extent extent,
                                           DensityFn density = {}) {
  if (which != equality_case_for(params))
    throw InvalidParams(std::string("build_equality_model: case ") + equality_case_name(which) +
                        " does not match N");
  const int n = params.n;
  const double kappa = params.kappa, lambda = params.lambda;
  const double a = params.conformal_rate();
  const auto C = barrier_C(kappa, lambda);

  if (which == EqualityCase::DimensionN) {
    const double k1 = kappa * std::exp(-2.0 * a * f0), l1 = lambda * std::exp(-a * f0);
    const auto C1 = barrier_C(k1, l1);
    double T;
    bool apex = false;
    switch (extent.kind) {
      case Extent::Kind::Radius: T = extent.value; break;
      case Extent::Kind::STarget: T = extent.value * std::exp(a * f0); break;
      case Extent::Kind::Full:
        if (C1.is_infinite()) throw InvalidParams("build_equality_model: full extent needs a ball pair");
        T = C1.value();
        apex = true;
        break;
    }
    if (!apex && C1.is_finite() && T >= C1.value())
      throw InvalidParams("build_equality_model: T reaches the barrier C_{kappa,lambda}");
    RadialProfile profile(
        [k1, l1, f0](double t) {
          return ProfilePoint{sn_jet(k1, l1, Jet::variable(t)), Jet::constant(f0)};
        },
        T, "equality N=n f0=" + ExtendedReal(f0).to_string());
    if (apex) {
      fiber = Fiber::sphere(n, 1.0 / std::abs(sn_boundary(k1, l1, T).derivative));
      return WarpedManifold(n, fiber, profile, Topology::BallApex);
    }
    return WarpedManifold(n, fiber, profile, Topology::Collar);
  }

  if (which == EqualityCase::Generic) {
    const double r = params.ratio_N();
    const double beta = params.eps * r / params.c;
    const double alpha = (1.0 - params.eps * r) / (params.c * (n - 1));
    const double ab = a * beta;
    const double scale = std::exp(a * f0);
    auto dt_ds = [kappa, lambda, ab, scale](double s) {
      return scale * std::pow(sn_boundary(kappa, lambda, s).value, -ab);
    };
    // Largest s the model may reach.
    double s_cap = C.is_finite() ? C.value() - detail::barrier_margin(C.value())
                                 : std::numeric_limits<double>::infinity();
    double s_end;
    switch (extent.kind) {
      case Extent::Kind::STarget:
        s_end = extent.value;
        if (s_end >= s_cap + 1e-15) throw InvalidParams("build_equality_model: s target beyond the barrier");
        break;
      case Extent::Kind::Full:
        if (C.is_infinite()) throw InvalidParams("build_equality_model: full extent needs a ball pair");
        s_end = s_cap;
        break;
      case Extent::Kind::Radius: {
        const double T = extent.value;
        // Grow an s-bracket until t(s) passes T.
        double hi = C.is_finite() ? s_cap : 1.0;
        auto t_of = [&](double s) { return numerics::integrate(dt_ds, 0.0, s, 1e-14); };
        if (C.is_finite()) {
          if (t_of(hi) <= T) throw InvalidParams("build_equality_model: T reaches the barrier C_{kappa,lambda}");
        } else {
          while (t_of(hi) <= T) hi *= 2.0;
        }
        s_end = numerics::bisect([&](double s) { return t_of(s) - T; }, 0.0, hi, 1e-15);
        break;
      }
    }
    auto table = std::make_shared<detail::MonotoneTable>(dt_ds, s_end, 2048, C.as_double());
    const double T = extent.kind == Extent::Kind::Radius ? extent.value : table->y_max();
    RadialProfile profile(
        [table, kappa, lambda, ab, alpha, beta, f0, scale](double t) {
          const double s = table->inverse(t);
          const auto sv = sn_boundary(kappa, lambda, s);
          const double s1 = std::pow(sv.value, ab) / scale;
          const double s2 = ab * (sv.derivative / sv.value) * s1 * s1;
          const Jet sj{s, s1, s2};
          const Jet sn = sn_jet(kappa, lambda, sj);
          return ProfilePoint{pow(sn, alpha), f0 - beta * log(sn)};
        },
        T, "equality N!=1,n f0=" + ExtendedReal(f0).to_string());
    return WarpedManifold(n, fiber, profile, Topology::Collar);
  }

  // N = 1
  if (params.eps != 0.0) throw InvalidParams("build_equality_model: N = 1 requires eps = 0");
  if (!density) throw InvalidParams("build_equality_model: N = 1 needs a density function");
  const double phi0 = density(0.0).v;
  auto ds_dt = [density, a](double t) { return std::exp(-a * density(t).v); };
  double T;
  bool apex = false;
  switch (extent.kind) {
    case Extent::Kind::Radius: T = extent.value; break;
    case Extent::Kind::STarget:
    case Extent::Kind::Full: {
      double target;
      if (extent.kind == Extent::Kind::STarget) {
        target = extent.value;
      } else {
        if (C.is_infinite()) throw InvalidParams("build_equality_model: full extent needs a ball pair");
        target = C.value();
        apex = true;
      }
      double hi = extent.kind == Extent::Kind::Full && extent.value > 0.0 ? extent.value : 1.0;
      auto s_of = [&](double t) { return numerics::integrate(ds_dt, 0.0, t, 1e-14); };
      int guard = 0;
      while (s_of(hi) < target) {
        hi *= 2.0;
        if (++guard > 60) throw InvalidParams("build_equality_model: s target never reached");
      }
      T = numerics::bisect([&](double t) { return s_of(t) - target; }, 0.0, hi, 1e-15);
      break;
    }
  }
  auto table = std::make_shared<detail::MonotoneTable>(ds_dt, T, 2048);
  if (!apex && C.is_finite() && table->y_max() >= C.value())
    throw InvalidParams("build_equality_model: T reaches the barrier C_{kappa,lambda}");
  const double inv = 1.0 / (n - 1);
  RadialProfile profile(
      [table, density, kappa, lambda, a, phi0, inv](double t) {
        const Jet phi = density(t);
        const double e = std::exp(-a * phi.v);
        const Jet sj{table->forward(t), e, -a * phi.d1 * e};
        return ProfilePoint{exp((phi - phi0) * inv) * sn_jet(kappa, lambda, sj), phi};
      },
      T, "equality N=1");
  if (apex) {
    // Smooth cap at the apex: |w'(T)| R_F = 1, with
    // w'(T) = sn'(C) e^{-(phi(T) + phi(0))/(n-1)}.
    const double phiT = density(T).v;
    const double slope = std::abs(sn_boundary(kappa, lambda, C.value()).derivative);
    fiber = Fiber::sphere(n, std::exp((phiT + phi0) * inv) / slope);
    return WarpedManifold(n, fiber, profile, Topology::BallApex);
  }
  return WarpedManifold(n, fiber, profile, Topology::Collar);
}

}  // namespace wbcomp
