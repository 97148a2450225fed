#pragma once

// Declarative description of a test instance and the randomized families
// used by suites. An instance spec is plain data so it can be echoed into
// reports and rebuilt bit-identically.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "wbcomp/equality_models.hpp"
#include "wbcomp/manifold.hpp"
#include "wbcomp/numerics.hpp"
#include "wbcomp/params.hpp"

namespace wbcomp {

struct FiberSpec {
  Fiber::Kind kind = Fiber::Kind::Torus;
  double radius = 1.0;  // sphere
  double volume = 1.0;  // torus / abstract
  std::optional<double> ricci;  // abstract

  [[nodiscard]] Fiber build(int n) const {
    switch (kind) {
      case Fiber::Kind::Sphere: return Fiber::sphere(n, radius);
      case Fiber::Kind::Torus: return Fiber::torus(volume);
      case Fiber::Kind::Abstract: return Fiber::abstract(volume, ricci);
    }
    return Fiber::torus(volume);
  }
};

struct InstanceSpec {
  enum class Kind { Profile, EqualityModel, ModelBall };

  std::string id;
  Kind kind = Kind::Profile;
  int n = 2;
  ExtendedReal N = ExtendedReal::infinity();
  double eps = 0.0;

  // Profile
  Topology topology = Topology::Collar;
  FiberSpec fiber;
  std::string w = "1";
  std::string phi = "0";
  double T = 1.0;

  // EqualityModel / ModelBall
  double kappa = 0.0;
  double lambda = 0.0;
  double f0 = 0.0;
  Extent extent = Extent::radius(1.0);
  std::string density;  // expression in t, N = 1 equality models only

  [[nodiscard]] CurvatureParams params() const {
    return CurvatureParams::make(n, N, eps, kappa, lambda);
  }

  [[nodiscard]] WarpedManifold build() const {
    const auto P = params();
    switch (kind) {
      case Kind::Profile:
        return WarpedManifold(n, fiber.build(n), RadialProfile::from_expressions(w, phi, T), topology);
      case Kind::ModelBall: return build_model_ball(n, kappa, lambda);
      case Kind::EqualityModel: {
        DensityFn fn;
        if (!density.empty()) {
          auto e = std::make_shared<Expression>(Expression::parse(density));
          fn = [e](double t) { return e->eval(Jet::variable(t)); };
        }
        return build_equality_model(equality_case_for(P), P, fiber.build(n), f0, extent, fn);
      }
    }
    throw InvalidParams("unknown instance kind");
  }
};

inline const char* instance_kind_name(InstanceSpec::Kind k) {
  switch (k) {
    case InstanceSpec::Kind::Profile: return "profile";
    case InstanceSpec::Kind::EqualityModel: return "equality_model";
    case InstanceSpec::Kind::ModelBall: return "model_ball";
  }
  return "?";
}

/// Shortest round-trip decimal form of x.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Seed of instance `index` within a family run.
inline std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) {
  return numerics::splitmix64(seed ^ numerics::splitmix64(index + 1));
}

namespace detail {

/// c0 + c1 x + ... + c4 x^4 in the variable `x`, coefficients uniform in [-0.5, 0.5].
inline std::string random_polynomial(numerics::Rng& rng, int degree, const std::string& x = "t") {
  std::string s;
  for (int k = 0; k <= degree; ++k) {
    const double coef = rng.uniform(-0.5, 0.5);
    if (k > 0) s += " + ";
    s += "(" + format_real(coef) + ")";
    if (k >= 1) s += "*" + x;
    if (k >= 2) s += "^" + std::to_string(k);
  }
  return s;
}

/// (N, eps) drawn from N in {1, n, n+1, n+4, +inf, -1} and eps inside the open
/// range, shrunk by 0.9.
inline void random_dimension(numerics::Rng& rng, InstanceSpec& spec) {
  const int n = spec.n;
  switch (rng.integer(0, 5)) {
    case 0: spec.N = 1.0; spec.eps = 0.0; return;
    case 1: spec.N = double(n); spec.eps = rng.uniform(-0.5, 1.0); return;
    case 2: spec.N = double(n + 1); break;
    case 3: spec.N = double(n + 4); break;
    case 4: spec.N = ExtendedReal::infinity(); break;
    default: spec.N = -1.0; break;
  }
  const double ratio = spec.N.is_infinite() ? 1.0 : (spec.N.value() - n) / (spec.N.value() - 1.0);
  spec.eps = 0.9 * std::sqrt(1.0 / ratio) * rng.uniform(-1.0, 1.0);
}

}  // namespace detail

/// Random warped instance: w = exp(q1), phi = q2 with q_i of degree <= 4 and
/// coefficients in [-0.5, 0.5], T in [0.5, 1.5], n in {2..5}. N = n forces phi
/// to a constant. Balls use w = (T - t) exp(q1(u)), phi = q2(u) with
/// u = (T - t)^2, so the apex is smooth.
inline InstanceSpec random_profile_instance(Topology topology, std::uint64_t seed,
                                            std::string id) {
  numerics::Rng rng(seed);
  InstanceSpec s;
  s.id = std::move(id);
  s.kind = InstanceSpec::Kind::Profile;
  s.topology = topology;
  s.n = rng.integer(2, 5);
  detail::random_dimension(rng, s);
  s.T = rng.uniform(0.5, 1.5);
  const bool ball = topology == Topology::BallApex;
  const std::string depth = "(" + format_real(s.T) + " - t)";
  const std::string x = ball ? "(" + depth + "^2)" : "t";
  const std::string q1 = detail::random_polynomial(rng, 4, x);
  const std::string q2 = detail::random_polynomial(rng, 4, x);
  const double phi_const = rng.uniform(-0.5, 0.5);
  s.phi = s.N == ExtendedReal(double(s.n)) ? format_real(phi_const) : q2;
  s.w = "exp(" + q1 + ")";
  s.fiber.kind = Fiber::Kind::Torus;
  if (ball) {
    s.w = depth + "*" + s.w;
    s.fiber.kind = Fiber::Kind::Sphere;
    s.fiber.radius = std::exp(-Expression::parse(q1).at(s.T).v);
  }
  return s;
}

/// Equality models over the three cases, (kappa, lambda) in
/// {(0,1), (1,-1), (-1,2)} and epsilon inside the valid range.
inline InstanceSpec random_equality_instance(std::uint64_t seed, std::string id) {
  numerics::Rng rng(seed);
  InstanceSpec s;
  s.id = std::move(id);
  s.kind = InstanceSpec::Kind::EqualityModel;
  s.n = rng.integer(2, 5);
  static constexpr double kPairs[3][2] = {{0.0, 1.0}, {1.0, -1.0}, {-1.0, 2.0}};
  const int pick = rng.integer(0, 2);
  s.kappa = kPairs[pick][0];
  s.lambda = kPairs[pick][1];
  switch (rng.integer(0, 2)) {
    case 0:
      s.N = double(s.n);
      s.eps = rng.uniform(-0.5, 1.0);
      break;
    case 1: {
      s.N = double(s.n + rng.integer(1, 4));
      const double ratio = (s.N.value() - s.n) / (s.N.value() - 1.0);
      s.eps = 0.9 * std::sqrt(1.0 / ratio) * rng.uniform(-1.0, 1.0);
      break;
    }
    default:
      s.N = 1.0;
      s.eps = 0.0;
      s.density = "(" + format_real(rng.uniform(-0.3, 0.3)) + ")*t + (" +
                  format_real(rng.uniform(-0.3, 0.3)) + ")*t^2";
      break;
  }
  s.f0 = rng.uniform(-0.3, 0.3);
  const auto C = barrier_C(s.kappa, s.lambda);
  // Reach 80% of the model barrier in s.
  s.extent = Extent::s_target(0.8 * (C.is_finite() ? C.value() : 1.0));
  if (s.N == ExtendedReal(double(s.n))) {
    // s = e^{-a f0} t for constant density.
    const double a = 2.0 * (1.0 - s.eps) / (s.n - 1);
    const auto C1 = barrier_C(s.kappa * std::exp(-2.0 * a * s.f0), s.lambda * std::exp(-a * s.f0));
    s.extent = Extent::radius(0.8 * (C1.is_finite() ? C1.value() : 1.0));
  }
  return s;
}

}  // namespace wbcomp
