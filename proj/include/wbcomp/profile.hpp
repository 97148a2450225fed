#pragma once

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wbcomp/expression.hpp"
#include "wbcomp/extended_real.hpp"
#include "wbcomp/jet.hpp"

namespace wbcomp {

/// Warping factor w and density phi at one radius, each with two derivatives.
struct ProfilePoint {
  Jet w;
  Jet phi;
};

using ProfileFn = std::function<ProfilePoint(double)>;

/// Radial description of a warped product g = dt^2 + w(t)^2 g_F with a
/// density f = phi(t), on [0, T].
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(ProfileFn fn, double T, std::string description)
      : fn_(std::move(fn)), T_(T), description_(std::move(description)) {
    if (!(T_ > 0.0) || !std::isfinite(T_)) throw InvalidParams("profile extent T must be finite and > 0");
    constexpr int kProbe = 257;
    density_constant_ = true;
    for (int i = 0; i < kProbe; ++i) {
      const auto p = fn_(T_ * i / (kProbe - 1));
      if (std::abs(p.phi.d1) > 1e-13 || std::abs(p.phi.d2) > 1e-13) {
        density_constant_ = false;
        break;
      }
    }
  }

  /// Closed-form profile from two expressions in t (see expression.hpp).
  static RadialProfile from_expressions(const std::string& w, const std::string& phi, double T) {
    auto we = std::make_shared<Expression>(Expression::parse(w));
    auto pe = std::make_shared<Expression>(Expression::parse(phi));
    return RadialProfile(
        [we, pe](double t) {
          const Jet x = Jet::variable(t);
          return ProfilePoint{we->eval(x), pe->eval(x)};
        },
        T, "w=" + w + "; phi=" + phi);
  }

  /// Profile from samples on a uniform grid over [0, T], interpolated by
  /// quintic B-splines (value and two derivatives).
  static RadialProfile from_samples(const std::vector<double>& w, const std::vector<double>& phi,
                                    double T) {
    if (w.size() != phi.size() || w.size() < 8)
      throw InvalidParams("sampled profile needs matching w/phi arrays with >= 8 samples");
    using Spline = boost::math::interpolators::cardinal_quintic_b_spline<double>;
    const double h = T / double(w.size() - 1);
    auto ws = std::make_shared<Spline>(w, 0.0, h);
    auto ps = std::make_shared<Spline>(phi, 0.0, h);
    return RadialProfile(
        [ws, ps, T](double t) {
          t = std::min(std::max(t, 0.0), T);
          return ProfilePoint{{(*ws)(t), ws->prime(t), ws->double_prime(t)},
                              {(*ps)(t), ps->prime(t), ps->double_prime(t)}};
        },
        T, "sampled(" + std::to_string(w.size()) + ")");
  }

  [[nodiscard]] ProfilePoint operator()(double t) const { return fn_(t); }
  [[nodiscard]] double T() const { return T_; }
  [[nodiscard]] const std::string& description() const { return description_; }
  [[nodiscard]] bool density_constant() const { return density_constant_; }

  /// Same functions on a shorter extent.
  [[nodiscard]] RadialProfile truncated(double T) const {
    return RadialProfile(fn_, T, description_ + " | T=" + ExtendedReal(T).to_string());
  }

  /// phi replaced by phi + shift.
  [[nodiscard]] RadialProfile density_shifted(double shift) const {
    auto fn = fn_;
    return RadialProfile(
        [fn, shift](double t) {
          auto p = fn(t);
          p.phi.v += shift;
          return p;
        },
        T_, description_ + " | phi+" + ExtendedReal(shift).to_string());
  }

 private:
  ProfileFn fn_;
  double T_ = 1.0;
  std::string description_;
  bool density_constant_ = true;
};

/// Largest relative mismatch of w, w', w'', phi, phi', phi'' between two
/// representations of the same profile, over `count` interior points.
inline double profile_mismatch(const RadialProfile& a, const RadialProfile& b, int count = 200) {
  double worst = 0.0;
  const double T = std::min(a.T(), b.T());
  auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
  for (int i = 1; i < count; ++i) {
    const double t = T * i / count;
    const auto p = a(t), q = b(t);
    for (double r : {rel(p.w.v, q.w.v), rel(p.w.d1, q.w.d1), rel(p.w.d2, q.w.d2),
                     rel(p.phi.v, q.phi.v), rel(p.phi.d1, q.phi.d1), rel(p.phi.d2, q.phi.d2)})
      worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace wbcomp
