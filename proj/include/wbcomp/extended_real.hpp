#pragma once

#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wbcomp {

/// Error raised when an evaluator is called outside the domain where the
/// quantity is defined (past a barrier, past the cut value, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Error raised when curvature parameters or builder inputs are rejected.
class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A real number or +infinity. Barriers C and D and the parameter N use this
/// tag instead of a sentinel float.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT(implicit)

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  [[nodiscard]] constexpr bool is_finite() const { return !infinite_; }
  [[nodiscard]] constexpr bool is_infinite() const { return infinite_; }

  [[nodiscard]] double value() const {
    if (infinite_) throw DomainError("ExtendedReal::value() called on +inf");
    return value_;
  }

  /// Finite value, or +HUGE_VAL for the infinite tag. Only for arithmetic
  /// where an IEEE infinity is the intended meaning (min/max, comparisons).
  [[nodiscard]] constexpr double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a,
                                                     const ExtendedReal& b) {
    return a.as_double() <=> b.as_double();
  }

  [[nodiscard]] std::string to_string() const {
    if (infinite_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

inline std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
  return os << x.to_string();
}

inline ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? a : b; }

}  // namespace wbcomp
