#pragma once

// Verdict records produced by the comparison checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace wbcomp {

enum class Verdict { Holds, Violated, Equality, Skipped };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Violated: return "violated";
    case Verdict::Equality: return "equality";
    case Verdict::Skipped: return "skipped";
  }
  return "?";
}

/// One evaluation of an inequality lhs >= rhs (margin = lhs - rhs) at a
/// radius t or a reparametrized radius s.
struct Sample {
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct CheckOptions {
  double tol = 1e-7;
  std::size_t grid = 512;
  bool keep_samples = false;
  /// Width of the excluded zones next to a singular origin or barrier.
  double exclusion = 1e-4;
};

/// Verdict of one displayed inequality of a statement.
struct PartReport {
  std::string id;
  Verdict verdict = Verdict::Skipped;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_location = 0.0;
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  double max_abs_margin = 0.0;
  double tolerance = 0.0;
  std::size_t evaluated = 0;
  std::string note;
  std::vector<Sample> samples;
};

struct ComparisonReport {
  std::string check;
  Verdict verdict = Verdict::Skipped;
  std::vector<PartReport> parts;

  [[nodiscard]] const PartReport* part(const std::string& id) const {
    for (const auto& p : parts)
      if (p.id == id) return &p;
    return nullptr;
  }

  [[nodiscard]] double worst_margin() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& p : parts)
      if (p.verdict != Verdict::Skipped) w = std::min(w, p.worst_margin);
    return w;
  }
};

/// Violated iff some margin < -tol; Equality iff every |margin| <= tol.
inline PartReport summarize_part(std::string id, const std::vector<Sample>& samples, double tol,
                                 bool keep) {
  PartReport r;
  r.id = std::move(id);
  r.tolerance = tol;
  r.evaluated = samples.size();
  if (samples.empty()) {
    r.verdict = Verdict::Skipped;
    r.note = "no admissible evaluation points";
    return r;
  }
  bool all_equal = true;
  for (const auto& s : samples) {
    // A NaN margin is the worst possible outcome and stays put once recorded.
    if (!std::isnan(r.worst_margin) && !(s.margin >= r.worst_margin)) {
      r.worst_margin = s.margin;
      r.worst_location = s.x;
      r.worst_lhs = s.lhs;
      r.worst_rhs = s.rhs;
    }
    if (!(std::abs(s.margin) <= r.max_abs_margin)) r.max_abs_margin = std::abs(s.margin);
    if (!(std::abs(s.margin) <= tol)) all_equal = false;
  }
  if (!(r.worst_margin >= -tol))
    r.verdict = Verdict::Violated;
  else
    r.verdict = all_equal ? Verdict::Equality : Verdict::Holds;
  if (keep) r.samples = samples;
  return r;
}

inline PartReport skipped_part(std::string id, std::string reason) {
  PartReport r;
  r.id = std::move(id);
  r.verdict = Verdict::Skipped;
  r.note = std::move(reason);
  return r;
}

/// Evaluates a grid-based part with `opts.grid` points and re-runs it on a
/// 10x finer grid when some margin lands in [-tol, 10 tol].
inline PartReport run_grid_part(std::string id,
                                const std::function<std::vector<Sample>(std::size_t)>& sampler,
                                const CheckOptions& opts) {
  auto samples = sampler(opts.grid);
  const bool borderline = std::any_of(samples.begin(), samples.end(), [&](const Sample& s) {
    return s.margin >= -opts.tol && s.margin <= 10.0 * opts.tol;
  });
  if (borderline) samples = sampler(opts.grid * 10);
  return summarize_part(std::move(id), samples, opts.tol, opts.keep_samples);
}

/// Violated if any part is; Skipped if all are; Equality if every evaluated
/// part is; otherwise Holds.
inline ComparisonReport assemble_report(std::string check, std::vector<PartReport> parts) {
  ComparisonReport rep;
  rep.check = std::move(check);
  rep.parts = std::move(parts);
  bool any = false, violated = false, all_eq = true;
  for (const auto& p : rep.parts) {
    if (p.verdict == Verdict::Skipped) continue;
    any = true;
    if (p.verdict == Verdict::Violated) violated = true;
    if (p.verdict != Verdict::Equality) all_eq = false;
  }
  if (!any)
    rep.verdict = Verdict::Skipped;
  else if (violated)
    rep.verdict = Verdict::Violated;
  else
    rep.verdict = all_eq ? Verdict::Equality : Verdict::Holds;
  return rep;
}

}  // namespace wbcomp
