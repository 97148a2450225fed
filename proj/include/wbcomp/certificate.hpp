#pragma once

// Hypothesis certification: the sharpest (kappa, lambda, delta) for which
// Ric_f^N >= c^{-1} kappa e^{-2a f} g, H_f >= c^{-1} lambda e^{-a f} and
// (1-eps) f <= (n-1) delta hold on a given warped instance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wbcomp/manifold.hpp"
#include "wbcomp/model_functions.hpp"
#include "wbcomp/numerics.hpp"
#include "wbcomp/params.hpp"

namespace wbcomp {

struct HypothesisCertificate {
  CurvatureParams params;  // kappa/lambda/delta hold the certified values
  double kappa_eff = 0.0;     // min over radial and (known) fiber directions
  double kappa_radial = 0.0;  // radial direction only
  std::optional<double> kappa_fiber;
  std::optional<double> lambda_eff;  // absent without boundary
  double delta_eff = 0.0;
  std::vector<double> grid;
  std::vector<double> kappa_margins;  // c Ric e^{2 a phi} - kappa_eff per grid point
  std::vector<double> delta_margins;  // (n-1) delta_eff - (1-eps) phi per grid point

  [[nodiscard]] double lambda() const { return lambda_eff.value_or(0.0); }

  /// (kappa, lambda) used by statements whose Ricci hypothesis is along the
  /// normal geodesic only.
  [[nodiscard]] ModelPair radial_pair() const { return classify_pair(kappa_radial, lambda()); }
  /// (kappa, lambda) used by statements with a full Ricci hypothesis.
  [[nodiscard]] ModelPair full_pair() const { return classify_pair(kappa_eff, lambda()); }

  /// The same instance certified for weaker constants. Throws when a value
  /// would strengthen the hypotheses.
  [[nodiscard]] HypothesisCertificate weakened(double kappa, std::optional<double> lambda,
                                               double delta) const {
    if (kappa > kappa_eff) throw InvalidParams("weakened: kappa exceeds the certified kappa_eff");
    if (lambda && lambda_eff && *lambda > *lambda_eff)
      throw InvalidParams("weakened: lambda exceeds the certified lambda_eff");
    if (delta < delta_eff) throw InvalidParams("weakened: delta below the certified delta_eff");
    HypothesisCertificate c = *this;
    c.kappa_eff = kappa;
    c.kappa_radial = kappa;
    if (c.kappa_fiber) c.kappa_fiber = kappa;
    if (lambda_eff && lambda) c.lambda_eff = *lambda;
    c.delta_eff = delta;
    c.params = params.with_bounds(kappa, c.lambda(), delta);
    return c;
  }
};

namespace detail {

/// Certificate grid: uniform in [0, T], minus the zone next to a vanishing
/// warping factor (apex or center).
inline std::vector<double> certificate_grid(const WarpedManifold& M, std::size_t count,
                                            double exclusion) {
  double lo = 0.0, hi = M.T();
  if (M.topology() == Topology::BallApex) hi = M.T() * (1.0 - exclusion);
  if (M.topology() == Topology::PointSymmetric) lo = M.T() * exclusion;
  return numerics::linspace(lo, hi, count);
}

/// Minimum of g over the grid, polished by Brent on the two neighbouring cells.
inline double polished_min(const std::function<double(double)>& g, const std::vector<double>& t,
                           std::vector<double>* values) {
  values->resize(t.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    (*values)[i] = g(t[i]);
    if ((*values)[i] < (*values)[best]) best = i;
  }
  double m = (*values)[best];
  const double a = t[best == 0 ? 0 : best - 1];
  const double b = t[std::min(best + 1, t.size() - 1)];
  if (b > a) m = std::min(m, numerics::minimize(g, a, b, 50).second);
  return m;
}

}  // namespace detail

/// Certifies the curvature, mean curvature and density hypotheses of M for
/// (n, N, eps) taken from `params` (its kappa, lambda, delta are ignored).
inline HypothesisCertificate certify_hypotheses(const WarpedManifold& M,
                                                const CurvatureParams& params,
                                                std::size_t grid = 512,
                                                double exclusion = 1e-4) {
  if (params.n != M.n()) throw InvalidParams("certify_hypotheses: params.n differs from dim M");
  if (params.N_is_n() && !M.profile().density_constant())
    throw InvalidParams("N = n requires a constant density");
  HypothesisCertificate cert;
  cert.grid = detail::certificate_grid(M, grid, exclusion);
  const double c = params.c;
  const double a = params.conformal_rate();
  const auto N = params.N;

  auto radial = [&](double t) {
    return c * M.radial_ricci(N, t) * std::exp(2.0 * a * M.at(t).phi.v);
  };
  std::vector<double> radial_values;
  cert.kappa_radial = detail::polished_min(radial, cert.grid, &radial_values);
  cert.kappa_eff = cert.kappa_radial;

  std::vector<double> fiber_values;
  if (M.fiber().ricci) {
    auto fiber = [&](double t) {
      return c * *M.fiber_ricci(N, t) * std::exp(2.0 * a * M.at(t).phi.v);
    };
    cert.kappa_fiber = detail::polished_min(fiber, cert.grid, &fiber_values);
    cert.kappa_eff = std::min(cert.kappa_eff, *cert.kappa_fiber);
  }

  if (M.has_boundary()) {
    double lam = c * M.weighted_mean_curvature(End::Inner) * std::exp(a * M.at(0.0).phi.v);
    if (M.topology() == Topology::TwoEnded)
      lam = std::min(lam, c * M.weighted_mean_curvature(End::Outer) *
                              std::exp(a * M.at(M.T()).phi.v));
    cert.lambda_eff = lam;
  }

  const double scale = (1.0 - params.eps) / (params.n - 1);
  auto neg_density = [&](double t) { return -scale * M.at(t).phi.v; };
  std::vector<double> density_values;
  const auto full = numerics::linspace(0.0, M.T(), cert.grid.size());
  cert.delta_eff = -detail::polished_min(neg_density, full, &density_values);

  cert.kappa_margins.resize(cert.grid.size());
  for (std::size_t i = 0; i < cert.grid.size(); ++i) {
    double v = radial_values[i];
    if (!fiber_values.empty()) v = std::min(v, fiber_values[i]);
    cert.kappa_margins[i] = v - cert.kappa_eff;
  }
  cert.delta_margins.resize(density_values.size());
  for (std::size_t i = 0; i < density_values.size(); ++i)
    cert.delta_margins[i] = (params.n - 1) * cert.delta_eff + (params.n - 1) * density_values[i];

  cert.params = params.with_bounds(cert.kappa_eff, cert.lambda(), cert.delta_eff);
  return cert;
}

}  // namespace wbcomp
