#pragma once

// Warped products M = [0,T] x_w F with radial density, and the weighted
// geometric quantities along the normal geodesics from the boundary.
// Sign convention: Delta = -div grad, so Delta_f rho = -(n-1) w'/w + phi'.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wbcomp/extended_real.hpp"
#include "wbcomp/jet.hpp"
#include "wbcomp/numerics.hpp"
#include "wbcomp/params.hpp"
#include "wbcomp/profile.hpp"

namespace wbcomp {

/// Volume of the unit round sphere S^k.
inline double unit_sphere_volume(int k) {
  return 2.0 * std::pow(numerics::kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

/// Homogeneous fiber F^{n-1}: its volume and, when known, the constant rho_F
/// with Ric_F = rho_F g_F.
struct Fiber {
  enum class Kind { Sphere, Torus, Abstract };
  Kind kind = Kind::Torus;
  double radius = 1.0;
  double volume = 1.0;
  std::optional<double> ricci = 0.0;

  static Fiber sphere(int n, double radius = 1.0) {
    Fiber f;
    f.kind = Kind::Sphere;
    f.radius = radius;
    f.volume = unit_sphere_volume(n - 1) * std::pow(radius, n - 1);
    f.ricci = (n - 2) / (radius * radius);
    return f;
  }
  static Fiber torus(double volume = 1.0) {
    Fiber f;
    f.kind = Kind::Torus;
    f.volume = volume;
    f.ricci = 0.0;
    return f;
  }
  static Fiber abstract(double volume, std::optional<double> ricci) {
    Fiber f;
    f.kind = Kind::Abstract;
    f.volume = volume;
    f.ricci = ricci;
    return f;
  }

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::Sphere: return "sphere";
      case Kind::Torus: return "torus";
      case Kind::Abstract: return "abstract";
    }
    return "?";
  }
};

enum class Topology { Collar, TwoEnded, BallApex, PointSymmetric };

inline const char* topology_name(Topology t) {
  switch (t) {
    case Topology::Collar: return "collar";
    case Topology::TwoEnded: return "two_ended";
    case Topology::BallApex: return "ball_apex";
    case Topology::PointSymmetric: return "point_symmetric";
  }
  return "?";
}

/// Which end of [0, T] a boundary component sits at.
enum class End { Inner, Outer };

class WarpedManifold {
 public:
  WarpedManifold(int n, Fiber fiber, RadialProfile profile, Topology topology)
      : n_(n), fiber_(fiber), profile_(std::move(profile)), topology_(topology) {
    if (n_ < 2) throw InvalidParams("dimension n must be an integer >= 2");
    const auto p0 = profile_(0.0);
    const auto pT = profile_(profile_.T());
    switch (topology_) {
      case Topology::Collar:
      case Topology::TwoEnded:
        if (!(p0.w.v > 0.0)) throw InvalidParams("collar/two_ended profile needs w(0) > 0");
        if (topology_ == Topology::TwoEnded && !(pT.w.v > 0.0))
          throw InvalidParams("two_ended profile needs w(T) > 0");
        break;
      case Topology::BallApex:
        if (!(p0.w.v > 0.0)) throw InvalidParams("ball_apex profile needs w(0) > 0");
        if (std::abs(pT.w.v) > 1e-9 * std::max(1.0, p0.w.v))
          throw InvalidParams("ball_apex profile needs w(T) = 0");
        break;
      case Topology::PointSymmetric:
        if (std::abs(p0.w.v) > 1e-12 || std::abs(p0.w.d1 - 1.0) > 1e-9)
          throw InvalidParams("point_symmetric profile needs w(0) = 0 and w'(0) = 1");
        break;
    }
  }

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const Fiber& fiber() const { return fiber_; }
  [[nodiscard]] const RadialProfile& profile() const { return profile_; }
  [[nodiscard]] Topology topology() const { return topology_; }
  [[nodiscard]] double T() const { return profile_.T(); }
  [[nodiscard]] ProfilePoint at(double t) const { return profile_(t); }
  [[nodiscard]] bool has_boundary() const { return topology_ != Topology::PointSymmetric; }

  /// Cut value tau of every boundary point: T, or T/2 for two_ended.
  [[nodiscard]] double tau() const { return topology_ == Topology::TwoEnded ? 0.5 * T() : T(); }

  /// Ric_f^N in the radial direction: -(n-1) w''/w + phi'' - phi'^2/(N-n).
  [[nodiscard]] double radial_ricci(ExtendedReal N, double t) const {
    const auto p = checked_point(t);
    return -(n_ - 1) * p.w.d2 / p.w.v + p.phi.d2 - density_term(N, p);
  }

  /// Ric_f^N on a unit vector tangent to the fiber, when rho_F is known.
  [[nodiscard]] std::optional<double> fiber_ricci(ExtendedReal N, double t) const {
    if (!fiber_.ricci) return std::nullopt;
    const auto p = checked_point(t);
    const double q = p.w.d1 / p.w.v;
    return *fiber_.ricci / (p.w.v * p.w.v) - p.w.d2 / p.w.v - (n_ - 2) * q * q + p.phi.d1 * q;
  }

  /// H_{f,z} of the boundary component at `end` (inner normal convention).
  [[nodiscard]] double weighted_mean_curvature(End end = End::Inner) const {
    if (!has_boundary()) throw DomainError("weighted_mean_curvature: no boundary");
    if (end == End::Inner) {
      const auto p = profile_(0.0);
      return -(n_ - 1) * p.w.d1 / p.w.v + p.phi.d1;
    }
    if (topology_ != Topology::TwoEnded)
      throw DomainError("weighted_mean_curvature: only two_ended instances have an outer boundary");
    const auto p = profile_(T());
    return (n_ - 1) * p.w.d1 / p.w.v - p.phi.d1;
  }

  /// Delta_f rho_{dM} at radius t from the inner boundary, t in [0, tau[.
  [[nodiscard]] double laplacian_distance(double t) const {
    if (!has_boundary()) throw DomainError("laplacian_distance: instance has no boundary");
    if (t < 0.0 || t >= tau() * (1.0 + 1e-15) + 1e-300)
      throw DomainError("laplacian_distance: t outside [0, tau[");
    return raw_laplacian(t);
  }

  /// d/dt of Delta_f rho along the normal geodesic.
  [[nodiscard]] double laplacian_distance_derivative(double t) const {
    const auto p = checked_point(t);
    const double q = p.w.d1 / p.w.v;
    return -(n_ - 1) * (p.w.d2 / p.w.v - q * q) + p.phi.d2;
  }

  /// Delta_f rho_x for the center x of a point_symmetric instance.
  [[nodiscard]] double laplacian_distance_point(double t) const {
    if (topology_ != Topology::PointSymmetric)
      throw DomainError("laplacian_distance_point: instance is not point_symmetric");
    if (!(t > 0.0) || t >= T()) throw DomainError("laplacian_distance_point: t outside ]0, T[");
    return raw_laplacian(t);
  }

  /// Delta_{f,p}(psi o rho) at radius t; psi is given as a jet-valued map of t.
  template <class Psi>
  [[nodiscard]] double p_laplacian_radial(double p, Psi&& psi, double t) const {
    if (!(p > 1.0)) throw DomainError("p_laplacian_radial: p must be > 1");
    const Jet u = psi(Jet::variable(t));
    if (!(u.d1 > 0.0)) throw DomainError("p_laplacian_radial: psi' must be > 0");
    const auto q = checked_point(t);
    const double flux = std::pow(u.d1, p - 1.0);
    const double dflux = (p - 1.0) * std::pow(u.d1, p - 2.0) * u.d2;
    return -(dflux + flux * ((n_ - 1) * q.w.d1 / q.w.v - q.phi.d1));
  }

  /// s_{f,z}(t) = int_0^t e^{-a phi}, a = 2(1-eps)/(n-1).
  [[nodiscard]] double reparam_s(double eps, double t) const {
    const double a = rate(eps);
    return numerics::integrate([&](double x) { return std::exp(-a * profile_(x).phi.v); }, 0.0, t,
                               1e-13);
  }

  /// Inverse of reparam_s on [0, T], by bisection.
  [[nodiscard]] double reparam_t(double eps, double s) const {
    if (s <= 0.0) return 0.0;
    const double total = reparam_s(eps, T());
    if (s >= total) {
      if (s > total * (1.0 + 1e-12)) throw DomainError("reparam_t: s beyond s(T)");
      return T();
    }
    return numerics::bisect([&](double t) { return reparam_s(eps, t) - s; }, 0.0, T(), 1e-13);
  }

  /// theta_f(t) = e^{-phi(t)} (w(t)/w(0))^{n-1}.
  [[nodiscard]] double theta_f(double t) const {
    if (!has_boundary()) throw DomainError("theta_f: instance has no boundary");
    const double w0 = profile_(0.0).w.v;
    const auto p = profile_(t);
    return std::exp(-p.phi.v) * std::pow(std::max(p.w.v, 0.0) / w0, n_ - 1);
  }

  [[nodiscard]] double theta_hat(double eps, double s) const { return theta_f(reparam_t(eps, s)); }

  /// Boundary measure m_{f,dM}(dM): e^{-phi} w^{n-1} |F| at each boundary end.
  [[nodiscard]] double boundary_measure() const {
    if (!has_boundary()) throw DomainError("boundary_measure: no boundary");
    double m = end_area(0.0);
    if (topology_ == Topology::TwoEnded) m += end_area(T());
    return m;
  }

  enum class Ball { Distance, Reparametrized };

  /// m_{b f}(B_r(dM)) (kind Distance) or m_{b f}(B^f_r(dM)) (kind Reparametrized):
  /// the tube of radius r in t, resp. in s_{f,z}, around every boundary end.
  [[nodiscard]] double tube_volume(double weight_exponent, double eps, double r,
                                   Ball kind = Ball::Distance) const {
    if (!(r > 0.0)) throw DomainError("tube_volume: r must be > 0");
    if (!has_boundary()) throw DomainError("tube_volume: no boundary");
    auto density = [&](double t) {
      const auto p = profile_(t);
      return std::exp(-weight_exponent * p.phi.v) * std::pow(std::max(p.w.v, 0.0), n_ - 1);
    };
    const double half = tau();
    double depth_inner, depth_outer = 0.0;
    if (kind == Ball::Distance) {
      depth_inner = std::min(r, half);
      depth_outer = depth_inner;
    } else {
      const double s_mid = reparam_s(eps, half);
      depth_inner = r >= s_mid ? half : reparam_t(eps, r);
      if (topology_ == Topology::TwoEnded) {
        // Outer end: s measured from t = T backwards.
        const double total = reparam_s(eps, T());
        const double s_outer_mid = total - s_mid;
        if (r >= s_outer_mid) {
          depth_outer = half;
        } else {
          depth_outer = T() - reparam_t(eps, total - r);
        }
      }
    }
    double v = numerics::integrate(density, 0.0, depth_inner, 1e-13);
    if (topology_ == Topology::TwoEnded)
      v += numerics::integrate(density, T() - depth_outer, T(), 1e-13);
    return fiber_.volume * v;
  }

  /// InRad M = tau.
  [[nodiscard]] double inradius() const { return tau(); }

  /// tau_f at each boundary end: s_{f,z}(tau) measured from that end.
  [[nodiscard]] std::vector<double> tau_f(double eps) const {
    const double s_mid = reparam_s(eps, tau());
    if (topology_ != Topology::TwoEnded) return {s_mid};
    return {s_mid, reparam_s(eps, T()) - s_mid};
  }

  /// InRad_f M = sup rho_{dM,f} = max over ends of tau_f.
  [[nodiscard]] double inradius_f(double eps) const {
    const auto t = tau_f(eps);
    return *std::max_element(t.begin(), t.end());
  }

  /// Inradius for the conformal metric e^{-2a phi} g: along radial curves the
  /// conformal distance to the boundary is the s-length to the nearer end.
  [[nodiscard]] double inradius_conformal(double eps) const {
    if (topology_ == Topology::TwoEnded) return 0.5 * reparam_s(eps, T());
    return reparam_s(eps, T());
  }

  /// The same two_ended instance seen from its outer end (t -> T - t).
  [[nodiscard]] WarpedManifold reversed() const {
    if (topology_ != Topology::TwoEnded) throw DomainError("reversed: only two_ended instances");
    const RadialProfile src = profile_;
    const double T0 = T();
    RadialProfile flipped(
        [src, T0](double t) {
          auto p = src(T0 - t);
          p.w.d1 = -p.w.d1;
          p.phi.d1 = -p.phi.d1;
          return p;
        },
        T0, profile_.description() + " | reversed");
    return WarpedManifold(n_, fiber_, flipped, topology_);
  }

  [[nodiscard]] double rate(double eps) const { return 2.0 * (1.0 - eps) / (n_ - 1); }

  /// Raw radial formula, no domain check (callers clamp their grids).
  [[nodiscard]] double raw_laplacian(double t) const {
    const auto p = profile_(t);
    return -(n_ - 1) * p.w.d1 / p.w.v + p.phi.d1;
  }

 private:
  [[nodiscard]] ProfilePoint checked_point(double t) const {
    if (t < 0.0 || t > T()) throw DomainError("radius outside [0, T]");
    const auto p = profile_(t);
    if (!(p.w.v > 0.0)) throw DomainError("warping factor vanishes at this radius");
    return p;
  }

  [[nodiscard]] double density_term(ExtendedReal N, const ProfilePoint& p) const {
    if (N.is_infinite()) return 0.0;
    if (N.value() == double(n_)) {
      if (!profile_.density_constant())
        throw DomainError("N = n requires a constant density");
      return 0.0;
    }
    return p.phi.d1 * p.phi.d1 / (N.value() - n_);
  }

  [[nodiscard]] double end_area(double t) const {
    const auto p = profile_(t);
    return std::exp(-p.phi.v) * std::pow(p.w.v, n_ - 1) * fiber_.volume;
  }

  int n_;
  Fiber fiber_;
  RadialProfile profile_;
  Topology topology_;
};

}  // namespace wbcomp
