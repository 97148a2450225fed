#pragma once

// Conclusion checks for the comparison and rigidity statements, evaluated
// on warped instances against the constants of a HypothesisCertificate.
// Every Sample encodes an inequality lhs >= rhs; for upper bounds lhs is the
// model bound and rhs the measured quantity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wbcomp/certificate.hpp"
#include "wbcomp/equality_models.hpp"
#include "wbcomp/frame.hpp"
#include "wbcomp/manifold.hpp"
#include "wbcomp/model_functions.hpp"
#include "wbcomp/report.hpp"

namespace wbcomp {

/// A smooth increasing function psi, evaluated on jets so that compositions
/// psi(u(t)) carry their t-derivatives.
using RadialFn = std::function<Jet(const Jet&)>;

/// (kappa e^{-4 delta}, lambda e^{-2 delta}).
inline std::pair<double, double> scaled_pair(double kappa, double lambda, double delta) {
  return {kappa * std::exp(-4.0 * delta), lambda * std::exp(-2.0 * delta)};
}

namespace detail {

struct BoundaryEnd {
  std::string suffix;
  WarpedManifold M;
};

/// The instance seen from each boundary component.
inline std::vector<BoundaryEnd> boundary_ends(const WarpedManifold& M) {
  if (!M.has_boundary()) throw InvalidParams("check requires an instance with boundary");
  std::vector<BoundaryEnd> e{{"", M}};
  if (M.topology() == Topology::TwoEnded) e.push_back({":outer", M.reversed()});
  return e;
}

inline std::string part_id(const std::string& base, const std::string& suffix) {
  return base + suffix;
}

/// Radii in [0, tau[ stopping `exclusion` short of the cut value.
inline std::vector<double> boundary_grid(const WarpedManifold& M, std::size_t count,
                                         double exclusion) {
  return numerics::linspace(0.0, M.tau() * (1.0 - exclusion), count);
}

/// Largest admissible argument of H_{kappa,lambda} on a check grid.
inline double s_cap(double kappa, double lambda, double exclusion) {
  const auto C = barrier_C(kappa, lambda);
  if (C.is_infinite()) return std::numeric_limits<double>::infinity();
  return std::min(C.value() - exclusion * std::max(1.0, C.value()),
                  H_boundary_limit(kappa, lambda));
}

/// Sample with margin -|lhs - rhs|: used for "matches the stated form" parts.
inline Sample match_sample(double x, double measured, double model) {
  return {x, measured, model, -std::abs(measured - model)};
}

inline void require_topology(const char* check, bool ok, const char* what) {
  if (!ok) throw InvalidParams(std::string(check) + ": requires " + what);
}

}  // namespace detail

/// Point Laplacian comparison and its bounded-density variant, on a
/// point_symmetric instance (x = center).
inline ComparisonReport check_point_laplacian(const WarpedManifold& M,
                                              const HypothesisCertificate& cert,
                                              const CheckOptions& opts = {}) {
  detail::require_topology("check_point_laplacian", M.topology() == Topology::PointSymmetric,
                           "a point_symmetric instance");
  const double c = cert.params.c, eps = cert.params.eps, a = M.rate(eps);
  const double kappa = cert.kappa_eff, delta = cert.delta_eff;
  const auto Z = point_barrier(kappa);
  const double cap = Z.is_finite() ? Z.value() * (1.0 - opts.exclusion) : HUGE_VAL;

  auto sampler = [&](bool bounded) {
    return [&, bounded](std::size_t count) {
      const auto frame = GeodesicFrame::build(
          M, eps, numerics::linspace(M.T() * opts.exclusion, M.T() * (1.0 - opts.exclusion), count));
      std::vector<Sample> out;
      for (std::size_t i = 0; i < frame.size(); ++i) {
        const double t = frame.t[i];
        const double arg = bounded ? std::exp(-2.0 * delta) * t : frame.s[i];
        if (arg >= cap) continue;
        const double lhs = M.laplacian_distance_point(t);
        const double rhs = H_point(c, kappa, arg) * std::exp(-a * frame.at[i].phi.v);
        out.push_back({t, lhs, rhs, lhs - rhs});
      }
      return out;
    };
  };
  return assemble_report("point_laplacian",
                         {run_grid_part("reparametrized", sampler(false), opts),
                          run_grid_part("bounded_density", sampler(true), opts)});
}

/// Riccati inequality for F = e^{a phi} Delta_f rho along the normal geodesic:
/// F' >= e^{a phi} Ric_f^N + c e^{-a phi} F^2.
inline ComparisonReport check_riccati(const WarpedManifold& M, const HypothesisCertificate& cert,
                                      const CheckOptions& opts = {}) {
  const double c = cert.params.c, a = M.rate(cert.params.eps);
  const auto N = cert.params.N;
  std::vector<PartReport> parts;
  for (const auto& end : detail::boundary_ends(M)) {
    const auto& E = end.M;
    auto sampler = [&](std::size_t count) {
      std::vector<Sample> out;
      for (double t : detail::boundary_grid(E, count, opts.exclusion)) {
        const auto p = E.at(t);
        const double e = std::exp(a * p.phi.v);
        const double h = E.raw_laplacian(t);
        const double lhs = e * (a * p.phi.d1 * h + E.laplacian_distance_derivative(t));
        const double F = e * h;
        const double rhs = e * E.radial_ricci(N, t) + c * F * F / e;
        out.push_back({t, lhs, rhs, lhs - rhs});
      }
      return out;
    };
    parts.push_back(run_grid_part(detail::part_id("riccati", end.suffix), sampler, opts));
  }
  return assemble_report("riccati", std::move(parts));
}

namespace detail {

/// Margins of Delta_f rho >= H_{kappa,lambda}(s) e^{-a phi} on one end.
inline std::vector<Sample> boundary_laplacian_samples(const WarpedManifold& E, double c,
                                                      double eps, double kappa, double lambda,
                                                      std::size_t count, double exclusion) {
  const double a = E.rate(eps);
  const double cap = s_cap(kappa, lambda, exclusion);
  const auto frame = GeodesicFrame::build(E, eps, boundary_grid(E, count, exclusion));
  std::vector<Sample> out;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.s[i] >= cap) break;
    const double lhs = E.raw_laplacian(frame.t[i]);
    const double rhs = H_boundary(c, kappa, lambda, frame.s[i]) * std::exp(-a * frame.at[i].phi.v);
    out.push_back({frame.t[i], lhs, rhs, lhs - rhs});
  }
  return out;
}

/// G = sn^2 (F_hat - H) sampled on the frame.
struct MonotoneSample {
  double s;
  double log_sn;
  double gap;  // F_hat - H
  [[nodiscard]] double G() const { return gap == 0.0 ? 0.0 : std::exp(2.0 * log_sn) * gap; }
};

inline std::vector<MonotoneSample> monotone_quantity(const WarpedManifold& E, double c, double eps,
                                                     double kappa, double lambda, std::size_t count,
                                                     double exclusion) {
  const double a = E.rate(eps);
  const double cap = s_cap(kappa, lambda, exclusion);
  const auto frame = GeodesicFrame::build(E, eps, boundary_grid(E, count, exclusion));
  std::vector<MonotoneSample> out;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double s = frame.s[i];
    if (s >= cap) break;
    const double F = std::exp(a * frame.at[i].phi.v) * E.raw_laplacian(frame.t[i]);
    out.push_back({s, log_sn_boundary(kappa, lambda, s), F - H_boundary(c, kappa, lambda, s)});
  }
  return out;
}

}  // namespace detail

/// Boundary Laplacian comparison against (kappa_radial, lambda_eff), with the
/// monotone quantity G and the backward propagation of equality.
inline ComparisonReport check_boundary_laplacian(const WarpedManifold& M,
                                                 const HypothesisCertificate& cert,
                                                 const CheckOptions& opts = {}) {
  const double c = cert.params.c, eps = cert.params.eps;
  const double kappa = cert.kappa_radial, lambda = cert.lambda();
  std::vector<PartReport> parts;
  for (const auto& end : detail::boundary_ends(M)) {
    const auto& E = end.M;
    parts.push_back(run_grid_part(
        detail::part_id("laplacian", end.suffix),
        [&](std::size_t count) {
          return detail::boundary_laplacian_samples(E, c, eps, kappa, lambda, count, opts.exclusion);
        },
        opts));

    parts.push_back(run_grid_part(
        detail::part_id("monotone_G", end.suffix),
        [&](std::size_t count) {
          const auto G = detail::monotone_quantity(E, c, eps, kappa, lambda, count, opts.exclusion);
          std::vector<Sample> out;
          // G_i / sn_{i-1}^2 - G_{i-1} / sn_{i-1}^2 keeps the sign and stays finite.
          for (std::size_t i = 1; i < G.size(); ++i) {
            const double lhs = std::exp(2.0 * (G[i].log_sn - G[i - 1].log_sn)) * G[i].gap;
            out.push_back({G[i].s, lhs, G[i - 1].gap, lhs - G[i - 1].gap});
          }
          return out;
        },
        opts));

    // Equality at s0 forces G = 0 on ]0, s0].
    const auto G = detail::monotone_quantity(E, c, eps, kappa, lambda, opts.grid, opts.exclusion);
    PartReport prop;
    prop.id = detail::part_id("equality_propagation", end.suffix);
    prop.tolerance = opts.tol;
    prop.evaluated = G.size();
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < G.size(); ++i)
      if (std::abs(G[i].G()) <= opts.tol) last = i;
    if (!last) {
      prop.verdict = G.empty() ? Verdict::Skipped : Verdict::Holds;
      prop.note = "no equality point on the grid";
    } else {
      double worst = 0.0;
      std::size_t where = 0;
      for (std::size_t j = 0; j <= *last; ++j)
        if (std::abs(G[j].G()) > worst) {
          worst = std::abs(G[j].G());
          where = j;
        }
      prop.worst_margin = opts.tol - worst;
      prop.worst_location = G[where].s;
      prop.worst_lhs = worst;
      prop.worst_rhs = opts.tol;
      prop.max_abs_margin = std::abs(prop.worst_margin);
      prop.verdict = worst > opts.tol ? Verdict::Violated
                     : *last + 1 == G.size() ? Verdict::Equality
                                             : Verdict::Holds;
      prop.note = "equality up to s0 = " + ExtendedReal(G[*last].s).to_string();
    }
    parts.push_back(std::move(prop));
  }
  return assemble_report("boundary_laplacian", std::move(parts));
}

/// tau_f <= C_{kappa,lambda} and tau <= C_{kappa e^{-4 delta}, lambda e^{-2 delta}}.
inline ComparisonReport check_cut_bounds(const WarpedManifold& M, const HypothesisCertificate& cert,
                                         const CheckOptions& opts = {}) {
  const auto pair = cert.radial_pair();
  if (!pair.ball)
    return assemble_report("cut_bounds", {skipped_part("tau_f", "ball-condition fails"),
                                          skipped_part("tau", "ball-condition fails")});
  const double C = pair.C.value();
  const auto [k2, l2] = scaled_pair(pair.kappa, pair.lambda, cert.delta_eff);
  const double C2 = barrier_C(k2, l2).value();
  const auto tf = M.tau_f(cert.params.eps);
  std::vector<Sample> s1;
  for (double v : tf) s1.push_back({v, C, v, C - v});
  std::vector<Sample> s2{{M.tau(), C2, M.tau(), C2 - M.tau()}};
  return assemble_report("cut_bounds", {summarize_part("tau_f", s1, opts.tol, opts.keep_samples),
                                        summarize_part("tau", s2, opts.tol, opts.keep_samples)});
}

/// Bounded-density Laplacian comparisons: H(e^{-2 delta} t) e^{-a phi}
/// (weakly-monotone pairs) and H(e^{-2 delta} t) e^{-2 delta} (monotone pairs).
inline ComparisonReport check_bounded_density(const WarpedManifold& M,
                                              const HypothesisCertificate& cert,
                                              const CheckOptions& opts = {}) {
  const auto pair = cert.radial_pair();
  const double c = cert.params.c, eps = cert.params.eps, delta = cert.delta_eff;
  const double a = M.rate(eps);
  const double cap = detail::s_cap(pair.kappa, pair.lambda, opts.exclusion);
  std::vector<PartReport> parts;
  for (const auto& end : detail::boundary_ends(M)) {
    const auto& E = end.M;
    auto sampler = [&](bool second) {
      return [&, second](std::size_t count) {
        std::vector<Sample> out;
        for (double t : detail::boundary_grid(E, count, opts.exclusion)) {
          const double sigma = std::exp(-2.0 * delta) * t;
          if (sigma >= cap) break;
          const double H = H_boundary(c, pair.kappa, pair.lambda, sigma);
          const double factor = second ? std::exp(-2.0 * delta) : std::exp(-a * E.at(t).phi.v);
          const double lhs = E.raw_laplacian(t);
          out.push_back({t, lhs, H * factor, lhs - H * factor});
        }
        return out;
      };
    };
    parts.push_back(pair.weakly_monotone
                        ? run_grid_part(detail::part_id("weighted_factor", end.suffix), sampler(false), opts)
                        : skipped_part(detail::part_id("weighted_factor", end.suffix),
                                       "weakly-monotone-condition fails"));
    parts.push_back(pair.monotone
                        ? run_grid_part(detail::part_id("constant_factor", end.suffix), sampler(true), opts)
                        : skipped_part(detail::part_id("constant_factor", end.suffix),
                                       "monotone-condition fails"));
  }
  return assemble_report("bounded_density", std::move(parts));
}

/// Weighted p-Laplacian comparisons at smooth points: the bounded-density
/// form for psi(rho e^{-2 delta}) and the radial-density form for psi(rho_f)
/// with weight (1 - (p-1) a) f.
inline ComparisonReport check_p_laplacian(const WarpedManifold& M,
                                          const HypothesisCertificate& cert, double p,
                                          const RadialFn& psi, const CheckOptions& opts = {}) {
  if (!(p > 1.0)) throw InvalidParams("check_p_laplacian: p must be > 1");
  const double c = cert.params.c, eps = cert.params.eps, delta = cert.delta_eff;
  const double a = M.rate(eps);
  const int n = M.n();
  const auto pair = cert.radial_pair();
  const double cap = detail::s_cap(pair.kappa, pair.lambda, opts.exclusion);

  // -[((psi')^{p-1})' - H (psi')^{p-1}] at x.
  auto model_term = [&](double x) {
    const Jet d = psi(Jet::variable(x));
    if (!(d.d1 > 0.0)) throw InvalidParams("check_p_laplacian: psi' must be > 0");
    const double flux = std::pow(d.d1, p - 1.0);
    const double dflux = (p - 1.0) * std::pow(d.d1, p - 2.0) * d.d2;
    return -(dflux - H_boundary(c, pair.kappa, pair.lambda, x) * flux);
  };

  if (!(psi(Jet::variable(0.0)).d1 > 0.0)) throw InvalidParams("check_p_laplacian: psi' must be > 0");
  std::vector<PartReport> parts;
  for (const auto& end : detail::boundary_ends(M)) {
    const auto& E = end.M;
    auto bounded = [&](std::size_t count) {
      const double scale = std::exp(-2.0 * delta);
      std::vector<Sample> out;
      for (double t : detail::boundary_grid(E, count, opts.exclusion)) {
        const double sigma = scale * t;
        if (sigma >= cap) break;
        if (t == 0.0) continue;
        const double lhs =
            E.p_laplacian_radial(p, [&](const Jet& x) { return psi(scale * x); }, t);
        const double rhs = std::exp(-2.0 * p * delta) * model_term(sigma);
        out.push_back({t, lhs, rhs, lhs - rhs});
      }
      return out;
    };
    auto radial = [&](std::size_t count) {
      const double b = 1.0 - (p - 1.0) * a;
      const auto frame = GeodesicFrame::build(E, eps, detail::boundary_grid(E, count, opts.exclusion));
      std::vector<Sample> out;
      for (std::size_t i = 1; i < frame.size(); ++i) {
        const double s = frame.s[i];
        if (s >= cap) break;
        const auto& q = frame.at[i];
        const double e = std::exp(-a * q.phi.v);
        const Jet u = psi(Jet{s, e, -a * q.phi.d1 * e});
        if (!(u.d1 > 0.0)) throw InvalidParams("check_p_laplacian: psi' must be > 0");
        const double flux = std::pow(u.d1, p - 1.0);
        const double dflux = (p - 1.0) * std::pow(u.d1, p - 2.0) * u.d2;
        const double drift = -(n - 1) * q.w.d1 / q.w.v + b * q.phi.d1;
        const double lhs = -dflux + flux * drift;
        const double rhs = std::exp(-p * a * q.phi.v) * model_term(s);
        out.push_back({frame.t[i], lhs, rhs, lhs - rhs});
      }
      return out;
    };
    parts.push_back(pair.monotone ? run_grid_part(detail::part_id("bounded", end.suffix), bounded, opts)
                                  : skipped_part(detail::part_id("bounded", end.suffix),
                                                 "monotone-condition fails"));
    parts.push_back(run_grid_part(detail::part_id("radial", end.suffix), radial, opts));
  }
  return assemble_report("p_laplacian", std::move(parts));
}

namespace detail {

/// Radius function of the geodesic sphere of radius r about the apex, for a
/// ball_apex instance whose fiber is a round sphere.
inline double apex_radius(const WarpedManifold& M, double r) {
  return M.at(M.T() - r).w.v * M.fiber().radius;
}

inline std::vector<double> apex_grid(const WarpedManifold& M, std::size_t count, double exclusion) {
  return numerics::linspace(M.T() * exclusion, M.T() * (1.0 - exclusion), count);
}

}  // namespace detail

/// InRad_{g_f} <= C_{kappa,lambda} and InRad <= C_{kappa e^{-4 delta}, lambda e^{-2 delta}},
/// with the rigidity forms checked at equality.
inline ComparisonReport check_inradius(const WarpedManifold& M, const HypothesisCertificate& cert,
                                       const CheckOptions& opts = {}) {
  const auto pair = cert.full_pair();
  if (!pair.ball)
    return assemble_report("inradius", {skipped_part("conformal", "ball-condition fails"),
                                        skipped_part("distance", "ball-condition fails")});
  const auto& P = cert.params;
  const double eps = P.eps, delta = cert.delta_eff, a = M.rate(eps);
  const int n = M.n();
  const double C = pair.C.value();
  const auto [k2, l2] = scaled_pair(pair.kappa, pair.lambda, delta);
  const double C2 = barrier_C(k2, l2).value();
  constexpr double kFormTol = 1e-6;

  std::vector<PartReport> parts;
  const double rf = M.inradius_conformal(eps);
  parts.push_back(summarize_part("conformal", {{rf, C, rf, C - rf}}, opts.tol, opts.keep_samples));
  const double r0 = M.inradius();
  parts.push_back(summarize_part("distance", {{r0, C2, r0, C2 - r0}}, opts.tol, opts.keep_samples));

  const bool is_ball = M.topology() == Topology::BallApex && M.fiber().kind == Fiber::Kind::Sphere;
  if (parts[0].verdict == Verdict::Equality) {
    std::vector<Sample> form;
    std::string note;
    if (!is_ball) {
      form.push_back({0.0, 0.0, 1.0, -1.0});
      note = "equality instance is not a round ball";
    } else if (!P.N_is_one() && (!M.profile().density_constant() || (!P.N_is_n() && eps != 0.0))) {
      form.push_back({0.0, eps, 0.0, -1.0});
      note = "equality requires constant f (and eps = 0 when N != n)";
    } else {
      const double phiT = M.at(M.T()).phi.v;
      for (double r : detail::apex_grid(M, opts.grid, opts.exclusion)) {
        double model;
        if (P.N_is_one()) {
          const double sv = M.reparam_s(eps, M.T()) - M.reparam_s(eps, M.T() - r);
          model = std::exp((M.at(M.T() - r).phi.v + phiT) / (n - 1)) * sn_point(pair.kappa, sv).value;
        } else {
          model = sn_point(pair.kappa * std::exp(-2.0 * a * phiT), r).value;
        }
        form.push_back(detail::match_sample(r, detail::apex_radius(M, r), model));
      }
    }
    auto part = summarize_part("conformal_rigidity", form, kFormTol, opts.keep_samples);
    part.note = note;
    parts.push_back(std::move(part));
  }
  if (parts[1].verdict == Verdict::Equality) {
    std::vector<Sample> form;
    std::string note;
    if (!is_ball || (!P.N_is_n() && eps != 0.0)) {
      form.push_back({0.0, 0.0, 1.0, -1.0});
      note = is_ball ? "equality requires eps = 0 when N != n" : "equality instance is not a round ball";
    } else {
      for (double t : numerics::linspace(0.0, M.T(), opts.grid))
        form.push_back(detail::match_sample(t, (1.0 - eps) * M.at(t).phi.v, (n - 1) * delta));
      for (double r : detail::apex_grid(M, opts.grid, opts.exclusion))
        form.push_back(detail::match_sample(r, detail::apex_radius(M, r), sn_point(k2, r).value));
    }
    auto part = summarize_part("distance_rigidity", form, kFormTol, opts.keep_samples);
    part.note = note;
    parts.push_back(std::move(part));
  }
  return assemble_report("inradius", std::move(parts));
}

/// Volume element comparisons: theta_hat / sn^{1/c}(s) non-increasing with
/// theta_hat <= e^{-f(z)} sn^{1/c}(s), and the t-form with the scaled pair.
inline ComparisonReport check_volume_elements(const WarpedManifold& M,
                                              const HypothesisCertificate& cert,
                                              const CheckOptions& opts = {}) {
  const auto pair = cert.radial_pair();
  const double c = cert.params.c, eps = cert.params.eps;
  const auto [k2, l2] = scaled_pair(pair.kappa, pair.lambda, cert.delta_eff);
  const double cap1 = detail::s_cap(pair.kappa, pair.lambda, opts.exclusion);
  const double cap2 = detail::s_cap(k2, l2, opts.exclusion);

  // Ratio samples over consecutive pairs and pairs anchored at the first node.
  // Model values are stored as logs.
  auto ratio_samples = [](const std::vector<double>& x, const std::vector<double>& theta,
                          const std::vector<double>& model) {
    std::vector<Sample> out;
    for (std::size_t j = 1; j < x.size(); ++j) {
      for (std::size_t i : {std::size_t{0}, j - 1}) {
        const double lhs = std::exp(model[j] - model[i]);
        const double rhs = theta[j] / theta[i];
        out.push_back({x[j], lhs, rhs, lhs - rhs});
        if (j == 1) break;
      }
    }
    return out;
  };

  std::vector<PartReport> parts;
  for (const auto& end : detail::boundary_ends(M)) {
    const auto& E = end.M;
    const double f0 = E.at(0.0).phi.v;
    auto collect = [&](bool reparam, std::size_t count, std::vector<double>& x,
                       std::vector<double>& theta, std::vector<double>& model) {
      const auto frame = GeodesicFrame::build(E, eps, detail::boundary_grid(E, count, opts.exclusion));
      for (std::size_t i = 0; i < frame.size(); ++i) {
        const double arg = reparam ? frame.s[i] : frame.t[i];
        if (arg >= (reparam ? cap1 : cap2)) break;
        x.push_back(arg);
        theta.push_back(E.theta_f(frame.t[i]));
        model.push_back(reparam ? log_sn_boundary(pair.kappa, pair.lambda, arg) / c
                                : log_sn_boundary(k2, l2, arg) / c);
      }
    };
    auto ratio = [&](bool reparam) {
      return [&, reparam](std::size_t count) {
        std::vector<double> x, th, mo;
        collect(reparam, count, x, th, mo);
        return ratio_samples(x, th, mo);
      };
    };
    auto absolute = [&](bool reparam) {
      return [&, reparam](std::size_t count) {
        std::vector<double> x, th, mo;
        collect(reparam, count, x, th, mo);
        std::vector<Sample> out;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double lhs = std::exp(mo[i] - f0);
          out.push_back({x[i], lhs, th[i], lhs - th[i]});
        }
        return out;
      };
    };
    parts.push_back(run_grid_part(detail::part_id("ratio_s", end.suffix), ratio(true), opts));
    parts.push_back(run_grid_part(detail::part_id("absolute_s", end.suffix), absolute(true), opts));
    if (pair.monotone) {
      parts.push_back(run_grid_part(detail::part_id("ratio_t", end.suffix), ratio(false), opts));
      parts.push_back(run_grid_part(detail::part_id("absolute_t", end.suffix), absolute(false), opts));
    } else {
      parts.push_back(skipped_part(detail::part_id("ratio_t", end.suffix), "monotone-condition fails"));
      parts.push_back(skipped_part(detail::part_id("absolute_t", end.suffix), "monotone-condition fails"));
    }
  }
  return assemble_report("volume_elements", std::move(parts));
}

/// Heintze-Karcher absolute bounds and relative ratio bounds for tubes of
/// radius r <= R around the boundary.
inline ComparisonReport check_volume_comparisons(const WarpedManifold& M,
                                                 const HypothesisCertificate& cert, double r,
                                                 double R, const CheckOptions& opts = {}) {
  if (!(r > 0.0) || !(R >= r)) throw InvalidParams("check_volume_comparisons: need 0 < r <= R");
  if (!M.has_boundary()) throw InvalidParams("check_volume_comparisons: needs a boundary");
  const auto pair = cert.full_pair();
  const double c = cert.params.c, eps = cert.params.eps;
  const double a = M.rate(eps);
  const double boundary = M.boundary_measure();
  auto logS = [&](double k, double l, double x) { return log_S_volume(c, k, l, x); };
  using Ball = WarpedManifold::Ball;

  // Model sides in log form: S overflows for very negative kappa.
  std::vector<PartReport> parts;
  const double vr = M.tube_volume(1.0 + a, eps, r, Ball::Reparametrized);
  const double vR = M.tube_volume(1.0 + a, eps, R, Ball::Reparametrized);
  const double Sr = logS(pair.kappa, pair.lambda, r), SR = logS(pair.kappa, pair.lambda, R);
  const double abs_model = std::exp(Sr) * boundary, rel_model = std::exp(SR - Sr);
  parts.push_back(summarize_part("absolute_reparametrized", {{r, abs_model, vr, abs_model - vr}}, opts.tol,
                                 opts.keep_samples));
  parts.push_back(summarize_part("relative_reparametrized", {{R, rel_model, vR / vr, rel_model - vR / vr}},
                                 opts.tol, opts.keep_samples));
  if (pair.monotone) {
    const auto [k2, l2] = scaled_pair(pair.kappa, pair.lambda, cert.delta_eff);
    const double ur = M.tube_volume(1.0, eps, r, Ball::Distance);
    const double uR = M.tube_volume(1.0, eps, R, Ball::Distance);
    const double Tr = logS(k2, l2, r), TR = logS(k2, l2, R);
    const double abs_dist = std::exp(Tr) * boundary, rel_dist = std::exp(TR - Tr);
    parts.push_back(summarize_part("absolute_distance", {{r, abs_dist, ur, abs_dist - ur}}, opts.tol,
                                   opts.keep_samples));
    parts.push_back(summarize_part("relative_distance", {{R, rel_dist, uR / ur, rel_dist - uR / ur}}, opts.tol,
                                   opts.keep_samples));
  } else {
    parts.push_back(skipped_part("absolute_distance", "monotone-condition fails"));
    parts.push_back(skipped_part("relative_distance", "monotone-condition fails"));
  }
  return assemble_report("volume_comparisons", std::move(parts));
}

/// d(dM_1, dM_2) <= 2 D_{kappa e^{-4 delta}, lambda e^{-2 delta}} for a
/// two_ended instance with kappa_eff > 0; at equality, f is constant and the
/// warping factor is the model one.
inline ComparisonReport check_two_boundary_distance(const WarpedManifold& M,
                                                    const HypothesisCertificate& cert,
                                                    const CheckOptions& opts = {}) {
  detail::require_topology("check_two_boundary_distance", M.topology() == Topology::TwoEnded,
                           "a two_ended instance");
  const auto pair = cert.full_pair();
  if (!(pair.kappa > 0.0))
    return assemble_report("two_boundary_distance", {skipped_part("distance", "kappa_eff <= 0")});
  std::vector<PartReport> parts;
  if (pair.lambda > -opts.tol) {
    auto part = summarize_part("lambda_negative", {{0.0, 0.0, pair.lambda, -pair.lambda}}, opts.tol,
                               opts.keep_samples);
    part.note = "the statement forces lambda < 0";
    parts.push_back(std::move(part));
    if (pair.lambda >= 0.0) return assemble_report("two_boundary_distance", std::move(parts));
  }
  const double eps = cert.params.eps, delta = cert.delta_eff;
  const auto [k2, l2] = scaled_pair(pair.kappa, pair.lambda, delta);
  const double bound = 2.0 * barrier_D(k2, l2).value();
  const double L = M.T();
  parts.push_back(summarize_part("distance", {{L, bound, L, bound - L}}, opts.tol, opts.keep_samples));
  if (parts.back().verdict == Verdict::Equality) {
    std::vector<Sample> form;
    const double w0 = M.at(0.0).w.v;
    for (double t : numerics::linspace(0.0, L, opts.grid)) {
      const auto q = M.at(t);
      form.push_back(detail::match_sample(t, (1.0 - eps) * q.phi.v, (M.n() - 1) * delta));
      form.push_back(detail::match_sample(t, q.w.v / w0, sn_boundary(k2, l2, t).value));
    }
    parts.push_back(summarize_part("rigidity", form, 1e-6, opts.keep_samples));
  }
  return assemble_report("two_boundary_distance", std::move(parts));
}

/// Certifies the half-infinite splitting models (kappa <= 0, lambda = sqrt|kappa|)
/// on truncations [0, T]: equality pattern of the hypotheses, equality in the
/// boundary Laplacian comparison and, for N != 1, n, the logarithmic density law.
inline ComparisonReport check_splitting_model(const CurvatureParams& params, EqualityCase which,
                                              const CheckOptions& opts = {},
                                              DensityFn density = {}, double f0 = 0.0) {
  if (!(params.kappa <= 0.0) || !exponential_pair(params.kappa, params.lambda))
    throw InvalidParams("check_splitting_model: needs kappa <= 0 and lambda = sqrt|kappa|");
  if (which != equality_case_for(params))
    throw InvalidParams(std::string("check_splitting_model: case ") + equality_case_name(which) +
                        " does not match (N, eps)");
  if (which == EqualityCase::NOne && !density)
    density = [](double t) { return 0.2 * sin(Jet::variable(t)); };
  const double kappa = params.kappa, lambda = params.lambda;
  std::vector<PartReport> parts;
  for (double T : {1.0, 2.0, 4.0}) {
    const std::string tag = "@T=" + ExtendedReal(T).to_string();
    const auto M = build_equality_model(which, params, Fiber::torus(), f0, Extent::radius(T), density);
    const auto cert = certify_hypotheses(M, params, opts.grid, opts.exclusion);
    parts.push_back(summarize_part(
        "hypotheses" + tag,
        {{0.0, cert.kappa_radial, kappa, cert.kappa_radial - kappa},
         {0.0, cert.lambda(), lambda, cert.lambda() - lambda}},
        opts.tol, opts.keep_samples));
    auto lap = check_boundary_laplacian(M, cert, opts);
    auto part = *lap.part("laplacian");
    part.id = "laplacian" + tag;
    parts.push_back(std::move(part));
    if (which == EqualityCase::Generic) {
      const double coeff = params.eps * params.ratio_N() / params.c;
      std::vector<Sample> form;
      for (double t : numerics::linspace(0.0, T, 65)) {
        const double s = M.reparam_s(params.eps, t);
        form.push_back(detail::match_sample(
            t, M.at(t).phi.v, f0 - coeff * std::log(sn_boundary(kappa, lambda, s).value)));
      }
      parts.push_back(summarize_part("density_law" + tag, form, 1e-8, opts.keep_samples));
    }
  }
  return assemble_report("splitting_model", std::move(parts));
}

}  // namespace wbcomp
