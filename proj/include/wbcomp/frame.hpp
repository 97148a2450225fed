#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <vector>

#include "wbcomp/manifold.hpp"
#include "wbcomp/numerics.hpp"

namespace wbcomp {

/// A t-grid along the normal geodesic with its image under s_{f,z} and the
/// profile evaluated at every node.
struct GeodesicFrame {
  std::vector<double> t;
  std::vector<double> s;
  std::vector<ProfilePoint> at;

  /// t must be strictly increasing inside [0, T]; s is accumulated from t = 0.
  static GeodesicFrame build(const WarpedManifold& M, double eps, std::vector<double> t_grid) {
    GeodesicFrame f;
    const double a = M.rate(eps);
    auto integrand = [&](double x) { return std::exp(-a * M.at(x).phi.v); };
    f.t = std::move(t_grid);
    f.s.resize(f.t.size());
    f.at.resize(f.t.size());
    double acc = 0.0, prev = 0.0, g_prev = integrand(0.0);
    const double small = M.T() / 64.0;
    for (std::size_t i = 0; i < f.t.size(); ++i) {
      // Short cells with a mild integrand take a fixed 10-point Gauss rule.
      f.at[i] = M.at(f.t[i]);
      const double g = std::exp(-a * f.at[i].phi.v);
      const bool mild = g <= 2.0 * g_prev && g_prev <= 2.0 * g;
      acc += f.t[i] - prev <= small && mild
                 ? boost::math::quadrature::gauss<double, 10>::integrate(integrand, prev, f.t[i])
                 : numerics::integrate(integrand, prev, f.t[i], 1e-14);
      g_prev = g;
      prev = f.t[i];
      f.s[i] = acc;
    }
    return f;
  }

  [[nodiscard]] std::size_t size() const { return t.size(); }
};

/// `count` uniform points on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  return numerics::linspace(lo, hi, count);
}

}  // namespace wbcomp
