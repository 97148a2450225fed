#pragma once

// Small numerical toolbox shared by every module: adaptive quadrature,
// bracketed root finding, 1-D minimization and a platform-stable RNG.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "wbcomp/extended_real.hpp"

namespace wbcomp::numerics {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

namespace detail {
template <class F>
double gk_panel(F& f, double a, double b, double* error, double* l1) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, error, l1);
}

template <class F>
double gk_refine(F& f, double a, double b, double value, double error, double target_per_length,
                 unsigned depth) {
  if (error <= target_per_length * (b - a) || depth == 0) return value;
  if (!std::isfinite(value) || !std::isfinite(error)) return value;  // overflow: no refinement helps
  const double m = 0.5 * (a + b);
  double el, er, l1;
  const double vl = gk_panel(f, a, m, &el, &l1);
  const double vr = gk_panel(f, m, b, &er, &l1);
  // Splitting did not shrink the estimate: it is roundoff in f, not truncation.
  if (el + er > 0.9 * error) return vl + vr;
  return gk_refine(f, a, m, vl, el, target_per_length, depth - 1) +
         gk_refine(f, m, b, vr, er, target_per_length, depth - 1);
}
}  // namespace detail

/// Adaptive Gauss-Kronrod (15/31 points) on [a, b]. The error budget is
/// rel_tol times the L1 norm of f, spread over [a, b] by length. Refinement of
/// a panel stops early once halving no longer reduces its error estimate.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 30) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, rel_tol, max_depth);
  double error = 0.0, l1 = 0.0;
  const double value = detail::gk_panel(f, a, b, &error, &l1);
  const double budget = rel_tol * std::abs(l1);
  return detail::gk_refine(f, a, b, value, error, budget / (b - a), max_depth);
}

/// Cumulative integral of f over a strictly increasing grid, F[0] = 0.
template <class F>
std::vector<double> cumulative_integral(F&& f, const std::vector<double>& grid,
                                        double rel_tol = 1e-14) {
  std::vector<double> out(grid.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc += integrate(f, grid[i - 1], grid[i], rel_tol);
    out[i] = acc;
  }
  return out;
}

/// Plain bisection for a sign change of f on [lo, hi]. f(lo) and f(hi) must
/// differ in sign. Returns the midpoint of the final bracket.
template <class F>
double bisect(F&& f, double lo, double hi, double abs_tol = 1e-12, int max_iter = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw DomainError("bisect: no sign change on bracket");
  for (int i = 0; i < max_iter && (hi - lo) > abs_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Local minimum of f on [lo, hi] (Brent: golden-section with parabolic steps).
template <class F>
std::pair<double, double> minimize(F&& f, double lo, double hi, int bits = 40) {
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(std::forward<F>(f), lo, hi, bits, iters);
  return {r.first, r.second};
}

/// Uniform grid of `count` points on [lo, hi] inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double h = (hi - lo) / double(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + h * double(i);
  g.back() = hi;
  return g;
}

/// splitmix64: used to derive independent per-instance seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic generator. std:: distributions are implementation-defined,
/// so uniforms are drawn from raw 64-bit output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {}

  std::uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }
  /// Uniform in [0, 1).
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) { return lo + int(next() % std::uint64_t(hi - lo + 1)); }

 private:
  std::uint64_t state_;
};

}  // namespace wbcomp::numerics
