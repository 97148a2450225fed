#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "wbcomp/extended_real.hpp"

namespace wbcomp {

/// Outcome of checking (n, N, epsilon) against the admissible epsilon-range.
struct ParamVerdict {
  bool accepted = false;
  std::string reason;
  ExtendedReal eps0;  // (N-1)/(N-n); +inf when N = n (any epsilon allowed)
  double c = 0.0;
};

/// Accepts N in ]-inf,1] u [n,+inf] and epsilon in the open range:
/// epsilon = 0 for N = 1, |epsilon| < sqrt(eps0) for N != 1,n, any epsilon for N = n.
/// For N = +inf, eps0 is taken as 1 and the range is ]-1,1[.
inline ParamVerdict validate_params(int n, ExtendedReal N, double eps) {
  ParamVerdict v;
  if (n < 2) {
    v.reason = "dimension n must be an integer >= 2";
    return v;
  }
  if (!std::isfinite(eps)) {
    v.reason = "epsilon must be finite";
    return v;
  }
  const double nd = n;
  if (N.is_finite() && std::isnan(N.value())) {
    v.reason = "N must be a number";
    return v;
  }
  if (N.is_finite() && N.value() > 1.0 && N.value() < nd) {
    v.reason = "N in ]1,n[ forbidden";
    return v;
  }
  if (N.is_finite() && N.value() == 1.0) {
    if (eps != 0.0) {
      v.reason = "epsilon must be 0 when N = 1";
      return v;
    }
    v.accepted = true;
    v.eps0 = 0.0;
    v.c = 1.0 / (nd - 1.0);
    return v;
  }
  if (N.is_finite() && N.value() == nd) {
    v.accepted = true;
    v.eps0 = ExtendedReal::infinity();
    v.c = 1.0 / (nd - 1.0);
    return v;
  }
  // N != 1, n.  ratio = (N-n)/(N-1), which tends to 1 as N -> inf.
  const double ratio = N.is_infinite() ? 1.0 : (N.value() - nd) / (N.value() - 1.0);
  const double eps0 = 1.0 / ratio;
  if (!(eps * eps < eps0)) {
    v.reason = "epsilon outside the open range ]-sqrt(eps0), sqrt(eps0)[ with eps0 = " +
               ExtendedReal(eps0).to_string();
    return v;
  }
  v.accepted = true;
  v.eps0 = eps0;
  v.c = (1.0 - eps * eps * ratio) / (nd - 1.0);
  return v;
}

/// The tuple (n, N, epsilon, kappa, lambda, delta) with derived constants.
struct CurvatureParams {
  int n = 2;
  ExtendedReal N = 1.0;
  double eps = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  std::optional<double> delta;

  ExtendedReal eps0;
  double c = 1.0;

  /// Throws InvalidParams with the validate_params reason on rejection.
  static CurvatureParams make(int n, ExtendedReal N, double eps, double kappa = 0.0,
                              double lambda = 0.0, std::optional<double> delta = std::nullopt) {
    const auto verdict = validate_params(n, N, eps);
    if (!verdict.accepted) throw InvalidParams(verdict.reason);
    CurvatureParams p;
    p.n = n;
    p.N = N;
    p.eps = eps;
    p.kappa = kappa;
    p.lambda = lambda;
    p.delta = delta;
    p.eps0 = verdict.eps0;
    p.c = verdict.c;
    return p;
  }

  [[nodiscard]] CurvatureParams with_bounds(double k, double l,
                                            std::optional<double> d = std::nullopt) const {
    CurvatureParams p = *this;
    p.kappa = k;
    p.lambda = l;
    p.delta = d;
    return p;
  }

  [[nodiscard]] double c_inv() const { return 1.0 / c; }
  [[nodiscard]] bool N_is_n() const { return N.is_finite() && N.value() == double(n); }
  [[nodiscard]] bool N_is_one() const { return N.is_finite() && N.value() == 1.0; }

  /// 2(1-epsilon)/(n-1): the exponent rate of the conformal factor e^{-a f}.
  [[nodiscard]] double conformal_rate() const { return 2.0 * (1.0 - eps) / (n - 1.0); }

  /// 1/(N-n), zero for N = +inf. Undefined (throws) for N = n.
  [[nodiscard]] double inv_N_minus_n() const {
    if (N.is_infinite()) return 0.0;
    if (N_is_n()) throw DomainError("1/(N-n) requested with N = n");
    return 1.0 / (N.value() - n);
  }

  /// (N-n)/(N-1), which is 1 for N = +inf.
  [[nodiscard]] double ratio_N() const {
    if (N.is_infinite()) return 1.0;
    return (N.value() - n) / (N.value() - 1.0);
  }
};

}  // namespace wbcomp
