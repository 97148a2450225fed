#pragma once

// First Dirichlet eigenvalue of the weighted p-Laplacian: the model problem
// on [0, D] solved by shooting, an independent finite-difference solver,
// radial estimates on compact warped instances, and the lower-bound ladder.

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wbcomp/certificate.hpp"
#include "wbcomp/manifold.hpp"
#include "wbcomp/model_functions.hpp"
#include "wbcomp/numerics.hpp"
#include "wbcomp/params.hpp"
#include "wbcomp/report.hpp"

namespace wbcomp {

enum class EigenMethod { Shooting, FiniteDifference, RayleighGrid };

inline const char* eigen_method_name(EigenMethod m) {
  switch (m) {
    case EigenMethod::Shooting: return "shooting";
    case EigenMethod::FiniteDifference: return "finite_difference";
    case EigenMethod::RayleighGrid: return "rayleigh_grid";
  }
  return "?";
}

/// Coefficient m of the drift term m sn'/sn in the model equation.
enum class OdeCoefficient {
  DimensionMinusOne,  // n - 1 (default)
  InverseC            // c^{-1}, matching the sn^{1/c} volume weight
};

inline double ode_coefficient(const CurvatureParams& P, OdeCoefficient mode) {
  return mode == OdeCoefficient::InverseC ? P.c_inv() : double(P.n - 1);
}

struct EigenResult {
  double value = 0.0;
  EigenMethod method = EigenMethod::Shooting;
  /// Shooting: |v(D)| with v = |phi'|^{p-2} phi'. Grid solvers: difference
  /// between the two meshes before extrapolation.
  double residual = 0.0;
  std::optional<double> error_estimate;
  bool exact = true;  // false for radial estimates with p != 2
  bool converged = true;
  std::vector<double> s;
  std::vector<double> profile;  // eigenfunction samples, max-normalized
  std::string note;
};

/// (p - 1) (pi_p / (2 D))^p with pi_p = 2 pi / (p sin(pi / p)): first
/// eigenvalue of the 1-D p-Laplacian on [0, D], Dirichlet at 0, natural at D.
inline double flat_model_eigenvalue(double p, double D) {
  const double pi_p = 2.0 * numerics::kPi / (p * std::sin(numerics::kPi / p));
  return (p - 1.0) * std::pow(pi_p / (2.0 * D), p);
}

namespace detail {

using ShootState = std::array<double, 2>;  // (phi, v = |phi'|^{p-2} phi')

struct ShootOutcome {
  bool turned = false;  // v reached 0 before the end
  double v_end = 0.0;
};

inline double signed_pow(double x, double e) { return std::copysign(std::pow(std::abs(x), e), x); }

/// Integrates the model IVP on [0, end]; stops early once v <= 0.
inline ShootOutcome shoot(double p, double m, double kappa, double lambda, double nu, double end,
                          std::vector<double>* s_out = nullptr, std::vector<double>* phi_out = nullptr) {
  namespace ode = boost::numeric::odeint;
  const double q = 1.0 / (p - 1.0);
  auto rhs = [&](const ShootState& x, ShootState& dx, double s) {
    const auto sn = sn_boundary(kappa, lambda, s);
    dx[0] = signed_pow(x[1], q);
    dx[1] = -m * (sn.derivative / sn.value) * x[1] - nu * signed_pow(x[0], p - 1.0);
  };
  auto stepper = ode::make_dense_output(1e-12, 1e-12, ode::runge_kutta_dopri5<ShootState>());
  ShootState x{0.0, 1.0};
  stepper.initialize(x, 0.0, std::min(1e-4, end * 1e-3));
  ShootOutcome out;
  while (stepper.current_time() < end) {
    stepper.do_step(rhs);
    const bool past = stepper.current_time() >= end;
    ShootState cur = stepper.current_state();
    if (past) stepper.calc_state(end, cur);
    if (cur[1] <= 0.0 && !past) {
      out.turned = true;
      out.v_end = cur[1];
      return out;
    }
    if (past) {
      out.v_end = cur[1];
      out.turned = cur[1] <= 0.0;
    }
  }
  if (s_out) {
    constexpr int kSamples = 65;
    stepper.initialize(ShootState{0.0, 1.0}, 0.0, std::min(1e-4, end * 1e-3));
    s_out->clear();
    phi_out->clear();
    int next = 0;
    while (next < kSamples) {
      const double target = end * next / (kSamples - 1);
      while (stepper.current_time() < target) stepper.do_step(rhs);
      ShootState cur{0.0, 1.0};
      if (next > 0) stepper.calc_state(target, cur);
      s_out->push_back(target);
      phi_out->push_back(cur[0]);
      ++next;
    }
  }
  return out;
}

/// Ground-state eigenvalue with the natural condition at `end`.
inline double shoot_eigenvalue(double p, double m, double kappa, double lambda, double end,
                               double* residual) {
  double lo = 0.0, hi = p * std::pow(numerics::kPi / end, p);
  int guard = 0;
  while (!shoot(p, m, kappa, lambda, hi, end).turned) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw DomainError("model_eigenvalue: no eigenvalue bracket");
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (shoot(p, m, kappa, lambda, mid, end).turned ? hi : lo) = mid;
  }
  // Secant polish on the continuous map nu -> v(end).
  double a = lo, b = hi;
  double fa = shoot(p, m, kappa, lambda, a, end).v_end;
  double fb = shoot(p, m, kappa, lambda, b, end).v_end;
  double best = std::abs(fa) < std::abs(fb) ? a : b, fbest = std::min(std::abs(fa), std::abs(fb));
  for (int i = 0; i < 4 && fa != fb; ++i) {
    const double c = b - fb * (b - a) / (fb - fa);
    if (!(c >= lo && c <= hi)) break;
    const double fc = shoot(p, m, kappa, lambda, c, end).v_end;
    if (std::abs(fc) < fbest) {
      best = c;
      fbest = std::abs(fc);
    }
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    if (fc == 0.0) break;
  }
  *residual = fbest;
  return best;
}

}  // namespace detail

/// nu_{p,kappa,lambda,D}: first eigenvalue of
/// (|phi'|^{p-2} phi')' + m (sn'/sn) |phi'|^{p-2} phi' + nu |phi|^{p-2} phi = 0,
/// phi(0) = 0, phi'(D) = 0, with sn = sn_{kappa,lambda} and m = `coefficient`
/// (n - 1 when absent). D near C_{kappa,lambda} is reached by extrapolating
/// in the gap C - D.
inline EigenResult model_eigenvalue(double p, int n, double kappa, double lambda, double D,
                                    std::optional<double> coefficient = std::nullopt) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("model_eigenvalue: p must be in ]1, inf[");
  if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("model_eigenvalue: D must be finite and > 0");
  if (n < 2) throw DomainError("model_eigenvalue: n must be >= 2");
  const double m = coefficient.value_or(double(n - 1));
  const auto C = barrier_C(kappa, lambda);
  EigenResult r;
  r.method = EigenMethod::Shooting;
  bool singular = false;
  double gap = 0.0;
  if (C.is_finite()) {
    const double Cv = C.value();
    if (D > Cv * (1.0 + 1e-12)) throw DomainError("model_eigenvalue: D beyond C_{kappa,lambda}");
    gap = 1e-6 * Cv;
    D = std::min(D, Cv);
    singular = D > Cv - gap;
  }
  double end = D;
  if (kappa == 0.0 && lambda == 0.0) {
    r.value = flat_model_eigenvalue(p, D);
    r.note = "closed form";
  } else if (singular) {
    const double a = C.value() - gap;
    double res1 = 0.0, res2 = 0.0;
    const double v1 = detail::shoot_eigenvalue(p, m, kappa, lambda, a, &res1);
    const double v2 = detail::shoot_eigenvalue(p, m, kappa, lambda, a - gap, &res2);
    r.value = v1 + (D - a) / gap * (v1 - v2);
    r.residual = std::max(res1, res2);
    r.error_estimate = std::abs(v1 - v2);
    r.note = "D within 1e-6 C of the singular end; extrapolated from two shorter intervals";
    end = a;
  } else {
    r.value = detail::shoot_eigenvalue(p, m, kappa, lambda, D, &r.residual);
  }
  detail::shoot(p, m, kappa, lambda, r.value, end, &r.s, &r.profile);
  const double top = *std::max_element(r.profile.begin(), r.profile.end());
  if (top > 0.0)
    for (double& v : r.profile) v /= top;
  return r;
}

// ------------------------------------------------------------------ grid solver

/// Condition imposed at the right end of a 1-D eigenproblem (left is Dirichlet).
enum class RightEnd { Natural, Dirichlet };

namespace detail {

struct GridProblem {
  double p;
  double length;
  RightEnd right;
  std::vector<double> w_mid;   // weight at cell midpoints, size N
  std::vector<double> w_node;  // weight at nodes 0..N
};

inline GridProblem sample_problem(double p, const std::function<double(double)>& weight, double L,
                                  RightEnd right, std::size_t cells) {
  GridProblem g{p, L, right, std::vector<double>(cells), std::vector<double>(cells + 1)};
  const double h = L / double(cells);
  for (std::size_t i = 0; i < cells; ++i) g.w_mid[i] = weight((double(i) + 0.5) * h);
  for (std::size_t i = 0; i <= cells; ++i) g.w_node[i] = weight(i == cells ? L : double(i) * h);
  return g;
}

/// Mass weight of node i: the weight, halved at a natural right end.
inline double node_mass(const GridProblem& g, std::size_t i) {
  const std::size_t N = g.w_mid.size();
  return (i == N && g.right == RightEnd::Natural) ? 0.5 * g.w_node[i] : g.w_node[i];
}

/// p = 2: inverse iteration on K x = nu M x, K tridiagonal SPD, M diagonal.
inline double grid_eigenvalue_quadratic(const GridProblem& g, std::vector<double>* phi, bool* converged) {
  const std::size_t N = g.w_mid.size();
  const double h = g.length / double(N);
  const std::size_t last = g.right == RightEnd::Natural ? N : N - 1;  // unknowns 1..last
  const std::size_t k = last;
  std::vector<double> diag(k), off(k > 0 ? k - 1 : 0), mass(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t i = j + 1;
    const double right = i < N ? g.w_mid[i] : 0.0;
    diag[j] = (g.w_mid[i - 1] + right) / h;
    if (j + 1 < k) off[j] = -g.w_mid[i] / h;
    mass[j] = h * node_mass(g, i);
  }
  // Thomas factorization of K, reused for every solve.
  std::vector<double> cprime(k), dinv(k);
  dinv[0] = 1.0 / diag[0];
  for (std::size_t j = 1; j < k; ++j) {
    cprime[j - 1] = off[j - 1] * dinv[j - 1];
    dinv[j] = 1.0 / (diag[j] - off[j - 1] * cprime[j - 1]);
  }
  auto solve = [&](std::vector<double> b) {
    for (std::size_t j = 1; j < k; ++j) b[j] -= cprime[j - 1] * b[j - 1];
    b[k - 1] *= dinv[k - 1];
    for (std::size_t j = k - 1; j-- > 0;) b[j] = (b[j] - off[j] * b[j + 1]) * dinv[j];
    return b;
  };
  auto quotient = [&](const std::vector<double>& x) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      num += diag[j] * x[j] * x[j];
      if (j + 1 < k) num += 2.0 * off[j] * x[j] * x[j + 1];
      den += mass[j] * x[j] * x[j];
    }
    return num / den;
  };
  std::vector<double> x(k, 1.0), b(k);
  double nu = quotient(x);
  *converged = false;
  for (int it = 0; it < 500; ++it) {
    for (std::size_t j = 0; j < k; ++j) b[j] = mass[j] * x[j];
    x = solve(b);
    const double top = *std::max_element(x.begin(), x.end(), [](double a, double c) { return std::abs(a) < std::abs(c); });
    for (double& v : x) v /= top;
    const double next = quotient(x);
    const bool done = std::abs(next - nu) <= 1e-12 * std::abs(next);
    nu = next;
    if (done) {
      *converged = true;
      break;
    }
  }
  if (phi) {
    phi->assign(N + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j) (*phi)[j + 1] = x[j];
  }
  return nu;
}

/// p != 2: the discrete Euler-Lagrange equations of the grid Rayleigh
/// quotient, marched from phi_0 = 0, phi_1 = h; the ground state is the nu at
/// which the right-end condition is first met.
inline bool grid_march_turns(const GridProblem& g, double nu, std::vector<double>* phi) {
  const std::size_t N = g.w_mid.size();
  const double h = g.length / double(N);
  const double p = g.p, q = 1.0 / (p - 1.0);
  if (phi) phi->assign(N + 1, 0.0);
  double x = 0.0;
  double flux = g.w_mid[0];  // W_{1/2} |phi'|^{p-2} phi' with phi' = 1
  for (std::size_t i = 1; i <= N; ++i) {
    x += h * signed_pow(flux / g.w_mid[i - 1], q);
    if (phi) (*phi)[i] = x;
    if (g.right == RightEnd::Dirichlet && x <= 0.0) return i < N || x < 0.0;
    if (x <= 0.0) return true;
    flux -= h * nu * node_mass(g, i) * std::pow(x, p - 1.0);
    if (i < N && flux <= 0.0) return true;
  }
  return g.right == RightEnd::Natural ? flux < 0.0 : false;
}

inline double grid_eigenvalue_march(const GridProblem& g, std::vector<double>* phi, bool* converged) {
  double lo = 0.0, hi = g.p * std::pow(numerics::kPi / g.length, g.p);
  int guard = 0;
  while (!grid_march_turns(g, hi, nullptr)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) {
      *converged = false;
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (grid_march_turns(g, mid, nullptr) ? hi : lo) = mid;
  }
  *converged = true;
  if (phi) grid_march_turns(g, lo, phi);
  return 0.5 * (lo + hi);
}

inline double grid_eigenvalue(const GridProblem& g, std::vector<double>* phi, bool* converged) {
  return g.p == 2.0 ? grid_eigenvalue_quadratic(g, phi, converged)
                    : grid_eigenvalue_march(g, phi, converged);
}

/// Solves on `cells` and 2 `cells` and reports the Richardson value.
inline EigenResult grid_solve(double p, const std::function<double(double)>& weight, double L,
                              RightEnd right, std::size_t cells, EigenMethod method) {
  bool ok1 = false, ok2 = false;
  std::vector<double> phi;
  const double coarse = grid_eigenvalue(sample_problem(p, weight, L, right, cells), nullptr, &ok1);
  const double fine = grid_eigenvalue(sample_problem(p, weight, L, right, 2 * cells), &phi, &ok2);
  EigenResult r;
  r.method = method;
  r.value = (4.0 * fine - coarse) / 3.0;
  r.residual = std::abs(fine - coarse);
  r.error_estimate = std::abs(r.value - fine);
  r.converged = ok1 && ok2;
  if (!r.converged) r.note = "iteration cap reached";
  const std::size_t stride = std::max<std::size_t>(1, phi.size() / 64);
  for (std::size_t i = 0; i < phi.size(); i += stride) {
    r.s.push_back(L * double(i) / double(phi.size() - 1));
    r.profile.push_back(phi[i]);
  }
  const double top = r.profile.empty() ? 0.0 : *std::max_element(r.profile.begin(), r.profile.end());
  if (top > 0.0)
    for (double& v : r.profile) v /= top;
  return r;
}

}  // namespace detail

/// Finite-difference eigenvalue of min int W |phi'|^p / int W |phi|^p over
/// phi(0) = 0 on [0, D] (natural condition at D), Richardson-extrapolated from
/// meshes D/cells and D/(2 cells).
inline EigenResult fd_eigenvalue_oracle(double p, const std::function<double(double)>& weight, double D,
                                        std::size_t cells = 2000) {
  if (!(p > 1.0)) throw DomainError("fd_eigenvalue_oracle: p must be > 1");
  if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("fd_eigenvalue_oracle: D must be finite and > 0");
  return detail::grid_solve(p, weight, D, RightEnd::Natural, cells, EigenMethod::FiniteDifference);
}

/// Model problem weight sn_{kappa,lambda}^m.
inline std::function<double(double)> model_weight(double kappa, double lambda, double m) {
  return [=](double s) { return std::pow(std::max(sn_boundary(kappa, lambda, s).value, 0.0), m); };
}

/// Radial estimate of nu_{b f, p}(M) on a compact instance: the grid Rayleigh
/// quotient over functions of t vanishing on the boundary, weight
/// e^{-b phi} w^{n-1}. Exact for p = 2.
inline EigenResult radial_eigen_estimate(const WarpedManifold& M, double p, double weight_exponent = 1.0,
                                         std::size_t cells = 2000) {
  if (!(p > 1.0)) throw DomainError("radial_eigen_estimate: p must be > 1");
  RightEnd right;
  switch (M.topology()) {
    case Topology::BallApex: right = RightEnd::Natural; break;
    case Topology::TwoEnded: right = RightEnd::Dirichlet; break;
    default: throw DomainError("radial_eigen_estimate: needs a compact instance (ball_apex or two_ended)");
  }
  const double w0 = M.at(0.0).w.v, f0 = M.at(0.0).phi.v;
  const int n = M.n();
  auto weight = [&](double t) {
    const auto q = M.at(t);
    return std::exp(-weight_exponent * (q.phi.v - f0)) * std::pow(std::max(q.w.v / w0, 0.0), n - 1);
  };
  auto r = detail::grid_solve(p, weight, M.T(), right, cells, EigenMethod::RayleighGrid);
  r.exact = p == 2.0;
  if (!r.exact) r.note = "radial functions only: an upper estimate for p != 2";
  return r;
}

// ------------------------------------------------------------------ bound ladder

struct LadderEntry {
  bool applicable = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

/// Lower bounds for the first Dirichlet eigenvalue under the curvature,
/// mean-curvature and density hypotheses of `params`.
struct BoundLadder {
  LadderEntry inradius_model;     // nu_{p, kappa e^{-4d}, lambda e^{-2d}, D e^{2d}}, weight (1 + a) f
  LadderEntry ball_model;         // nu_{0,p}(B^n_{kappa e^{-4d}, lambda e^{-2d}})
  LadderEntry spectrum_constant;  // (p e^{2d} C(kappa, lambda, D))^{-p}
  LadderEntry exponential;        // e^{-2 p d} (c^{-1} lambda / p)^p
};

/// `D_conformal` bounds InRad_f and feeds the inradius entry; `D_volume`
/// satisfies InRad <= e^{2 delta} D_volume and feeds the spectrum-constant entry.
inline BoundLadder bound_ladder(const CurvatureParams& P, double p, ExtendedReal D_conformal,
                                ExtendedReal D_volume,
                                OdeCoefficient mode = OdeCoefficient::DimensionMinusOne) {
  if (!(p > 1.0)) throw DomainError("bound_ladder: p must be > 1");
  const double kappa = P.kappa, lambda = P.lambda, delta = P.delta.value_or(0.0);
  const auto pair = classify_pair(kappa, lambda);
  const double k2 = kappa * std::exp(-4.0 * delta), l2 = lambda * std::exp(-2.0 * delta);
  BoundLadder L;

  if (D_conformal.is_finite() && D_conformal.value() > 0.0) {
    double D = D_conformal.value();
    const bool within = pair.C.is_infinite() || D <= pair.C.value() * (1.0 + 1e-9);
    if (within) {
      if (pair.C.is_finite()) D = std::min(D, pair.C.value());
      const double De = std::min(D * std::exp(2.0 * delta),
                                 barrier_C(k2, l2).is_finite() ? barrier_C(k2, l2).value() : HUGE_VAL);
      L.inradius_model = {true, model_eigenvalue(p, P.n, k2, l2, De, ode_coefficient(P, mode)).value, ""};
    } else {
      L.inradius_model.note = "D exceeds C_{kappa,lambda}";
    }
  } else {
    L.inradius_model.note = "needs a finite D";
  }

  if (pair.convex_ball) {
    const double C2 = barrier_C(k2, l2).value();
    L.ball_model = {true, model_eigenvalue(p, P.n, k2, l2, C2).value, ""};
  } else {
    L.ball_model.note = "convex-ball-condition fails";
  }

  if (pair.monotone) {
    const bool within = D_volume.is_finite() ? (pair.C.is_infinite() || D_volume.value() <= pair.C.value() * (1.0 + 1e-9))
                                             : pair.C.is_infinite();
    const bool finite_constant = D_volume.is_finite() || (kappa < 0.0 && exponential_pair(kappa, lambda));
    if (within && finite_constant && D_volume > ExtendedReal(0.0)) {
      const auto D = D_volume.is_finite() && pair.C.is_finite() ? ExtendedReal(std::min(D_volume.value(), pair.C.value()))
                                                                : D_volume;
      const double Cs = wbcomp::spectrum_constant(P.c, kappa, lambda, D);
      L.spectrum_constant = {true, std::pow(p * std::exp(2.0 * delta) * Cs, -p), ""};
    } else {
      L.spectrum_constant.note = within ? "C(kappa, lambda, D) is infinite" : "D exceeds C_{kappa,lambda}";
    }
  } else {
    L.spectrum_constant.note = "monotone-condition fails";
  }

  if (kappa < 0.0 && exponential_pair(kappa, lambda)) {
    L.exponential = {true, std::exp(-2.0 * p * delta) * std::pow(P.c_inv() * lambda / p, p), ""};
  } else {
    L.exponential.note = "needs kappa < 0 and lambda = sqrt|kappa|";
  }
  return L;
}

// ------------------------------------------------------------------ instance checks

enum class EquationalModel { None, Ball, Cylinder };

inline const char* equational_model_name(EquationalModel m) {
  switch (m) {
    case EquationalModel::None: return "none";
    case EquationalModel::Ball: return "ball";
    case EquationalModel::Cylinder: return "cylinder";
  }
  return "?";
}

/// Whether M is the (kappa, lambda) model ball or the doubled model cylinder
/// [0, 2 D] x dM_1 with warping factor sn_{kappa,lambda}, up to `tol`.
/// Involutive quotients of cylinders are not representable as instances.
inline EquationalModel classify_equational_model(const WarpedManifold& M, double kappa, double lambda,
                                                 double tol = 1e-6) {
  const auto pair = classify_pair(kappa, lambda);
  const double w0 = M.at(0.0).w.v, f0 = M.at(0.0).phi.v;
  auto profile_matches = [&](double upto) {
    for (double t : numerics::linspace(0.0, upto, 257)) {
      const auto q = M.at(t);
      if (std::abs(q.phi.v - f0) > tol) return false;
      if (std::abs(q.w.v / w0 - sn_boundary(kappa, lambda, t).value) > tol) return false;
    }
    return true;
  };
  if (M.topology() == Topology::BallApex && pair.ball && M.fiber().kind == Fiber::Kind::Sphere) {
    const double C = pair.C.value();
    if (std::abs(M.T() - C) <= tol * std::max(1.0, C) && profile_matches(M.T() * (1.0 - 1e-9)))
      return EquationalModel::Ball;
  }
  if (M.topology() == Topology::TwoEnded && pair.model) {
    const double D = (kappa == 0.0 && lambda == 0.0) ? M.inradius() : pair.D.value();
    if (std::abs(M.T() - 2.0 * D) <= tol * std::max(1.0, D) && profile_matches(0.5 * M.T())) {
      const auto mirror = M.reversed();
      bool symmetric = true;
      for (double t : numerics::linspace(0.0, 0.5 * M.T(), 65))
        symmetric = symmetric && std::abs(mirror.at(t).w.v / mirror.at(0.0).w.v - M.at(t).w.v / w0) <= tol &&
                    std::abs(mirror.at(t).phi.v - M.at(t).phi.v) <= tol;
      if (symmetric) return EquationalModel::Cylinder;
    }
  }
  return EquationalModel::None;
}

/// The strongest exponential pair (-l^2, l) weaker than (kappa, lambda), if any.
inline std::optional<std::pair<double, double>> exponential_weakening(double kappa, double lambda) {
  if (!(lambda > 0.0)) return std::nullopt;
  if (kappa < 0.0 && lambda * lambda < -kappa) return std::nullopt;
  return std::make_pair(-lambda * lambda, lambda);
}

/// Kasue-type volume estimate on Omega = {a < rho < b} of a single-boundary instance:
/// m_f(Omega) <= e^{2 delta} sup_s (int_s^{D2} sn^{1/c}) / sn^{1/c}(s) m_f(dOmega),
/// D_i = e^{-2 delta} (a, b).
inline ComparisonReport kasue_estimate(const WarpedManifold& M, const HypothesisCertificate& cert,
                                       double a, double b, const CheckOptions& opts = {}) {
  if (M.topology() != Topology::Collar && M.topology() != Topology::BallApex)
    throw InvalidParams("kasue_estimate: needs a collar or ball_apex instance");
  if (!(a > 0.0) || !(b > a)) throw InvalidParams("kasue_estimate: needs 0 < a < b");
  if (b >= M.tau() * (1.0 - 1e-12)) throw InvalidParams("kasue_estimate: interval touches the cut value");
  auto pair = cert.full_pair();
  if (!pair.monotone) return assemble_report("kasue_estimate", {skipped_part("volume", "monotone-condition fails")});
  const double c = cert.params.c, delta = cert.delta_eff;
  const int n = M.n();
  const double fiber = M.fiber().volume;
  auto density = [&](double t) {
    const auto q = M.at(t);
    return std::exp(-q.phi.v) * std::pow(q.w.v, n - 1);
  };
  const double inside = fiber * numerics::integrate(density, a, b, 1e-13);
  const double boundary = fiber * (density(a) + density(b));
  const double D1 = std::exp(-2.0 * delta) * a, D2 = std::exp(-2.0 * delta) * b;
  const double ratio = tail_ratio_sup(c, pair.kappa, pair.lambda, D1, D2);
  const double bound = std::exp(2.0 * delta) * ratio * boundary;
  return assemble_report("kasue_estimate",
                         {summarize_part("volume", {{b, bound, inside, bound - inside}}, opts.tol, opts.keep_samples)});
}

struct EigenCheckOptions {
  double slack = 1e-6;        // ladder ordering tolerance
  double equality_tol = 1e-4;  // relative, on equational models
  OdeCoefficient mode = OdeCoefficient::DimensionMinusOne;
  std::size_t cells = 2000;
  bool keep_samples = false;
};

/// Radial eigenvalue estimates against every applicable ladder entry, plus
/// the equality on equational models.
inline ComparisonReport check_eigen_theorems(const WarpedManifold& M, const HypothesisCertificate& cert,
                                             double p, const EigenCheckOptions& opts = {}) {
  const auto& P = cert.params;
  const double eps = P.eps, a = M.rate(eps), delta = cert.delta_eff;
  const double kappa = cert.kappa_eff, lambda = cert.lambda();
  const auto base = P.with_bounds(kappa, lambda, delta);
  const double inrad_f = M.inradius_f(eps);
  const double inrad = M.inradius();
  const auto ladder = bound_ladder(base, p, inrad_f, inrad * std::exp(-2.0 * delta), opts.mode);

  const auto plain = radial_eigen_estimate(M, p, 1.0, opts.cells);
  const auto shifted = radial_eigen_estimate(M, p, 1.0 + a, opts.cells);
  const std::string one_sided = p == 2.0 ? "" : "one-sided evidence: radial estimate for p != 2";

  std::vector<PartReport> parts;
  auto entry_part = [&](const std::string& id, const LadderEntry& e, const EigenResult& est) {
    if (!e.applicable) return skipped_part(id, e.note);
    auto part = summarize_part(id, {{p, est.value, e.value, est.value - e.value}}, opts.slack, opts.keep_samples);
    part.note = one_sided;
    return part;
  };
  parts.push_back(entry_part("inradius_model", ladder.inradius_model, shifted));
  parts.push_back(entry_part("ball_model", ladder.ball_model, plain));
  parts.push_back(entry_part("spectrum_constant", ladder.spectrum_constant, plain));

  // The exponential bound also applies to the strongest weaker exponential pair.
  LadderEntry expo = ladder.exponential;
  if (!expo.applicable) {
    if (const auto w = exponential_weakening(kappa, lambda)) {
      const auto weak = bound_ladder(P.with_bounds(w->first, w->second, delta), p, ExtendedReal::infinity(),
                                     ExtendedReal::infinity(), opts.mode);
      expo = weak.exponential;
    }
  }
  parts.push_back(entry_part("exponential", expo, plain));
  if (!ladder.spectrum_constant.applicable) {
    if (const auto w = exponential_weakening(kappa, lambda)) {
      const auto weak = bound_ladder(P.with_bounds(w->first, w->second, delta), p, ExtendedReal::infinity(),
                                     inrad * std::exp(-2.0 * delta), opts.mode);
      parts[2] = entry_part("spectrum_constant", weak.spectrum_constant, plain);
      if (parts[2].verdict != Verdict::Skipped) parts[2].note = "exponential weakening of (kappa, lambda)";
    }
  }

  const double k2 = kappa * std::exp(-4.0 * delta), l2 = lambda * std::exp(-2.0 * delta);
  const auto model = classify_equational_model(M, k2, l2);
  if (model != EquationalModel::None && ladder.inradius_model.applicable) {
    const double rel = std::abs(shifted.value - ladder.inradius_model.value) / ladder.inradius_model.value;
    auto part = summarize_part("model_equality", {{p, shifted.value, ladder.inradius_model.value, -rel}},
                               opts.equality_tol, opts.keep_samples);
    part.note = std::string("equational model: ") + equational_model_name(model);
    parts.push_back(std::move(part));
  }
  return assemble_report("eigen_theorems", std::move(parts));
}

}  // namespace wbcomp
