#pragma once

// Scenario files, randomized suites and report emission.
//
// Scenario schema "wbcomp-scenario/1" (JSON):
//
//   {
//     "schema": "wbcomp-scenario/1",
//     "name": "cylinder-all-checks",
//     "seed": 1,                                   optional, default 0
//     "params": {"n": 3, "N": "inf", "eps": 0,     N is a number or "inf"
//                "kappa": 0, "lambda": 0,          model pair, or claimed bounds
//                "delta": "certify"},              "certify" or a number
//     "instance": {...} or "instances": [{...}, ...],
//     "checks": ["riccati", {"id": "p_laplacian", "p": 3, "psi": "t + t^3"}],
//     "options": {"tol": 1e-7, "grid": 512, "exclusion": 1e-4, "ode_coeff": "paper"}
//   }
//
// Instance kinds:
//   profile         topology, fiber, w, phi, T (expressions in t)
//   equality_model  f0, extent ({"radius": r} | {"s_target": s} | "full"), density (N = 1)
//   model_ball      the ball of the pair (kappa, lambda)
//   random          family (random-collar | random-ball | random-two-ended |
//                   equality-models) and index, drawn from the scenario seed;
//                   carries its own params
//
// For profile instances, params.kappa / params.lambda / params.delta weaken the
// certified constants when present; stronger claims are rejected.

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "wbcomp/comparison.hpp"
#include "wbcomp/instance.hpp"
#include "wbcomp/spectrum.hpp"

#ifndef WBCOMP_VERSION
#define WBCOMP_VERSION "0.0.0"
#endif

namespace wbcomp::scenario {

using Json = nlohmann::ordered_json;

inline constexpr const char* kScenarioSchema = "wbcomp-scenario/1";
inline constexpr const char* kReportSchema = "wbcomp-report/1";
inline constexpr const char* kCsvHeader = "check_id,instance_id,t_or_s,lhs,rhs,margin";

inline std::string version() { return WBCOMP_VERSION; }

/// Bad scenario, unknown check, rejected parameters: exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kAllPass = 0, kViolation = 1, kConfigError = 2 };

/// Command-line overrides; unset fields keep the scenario values.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::size_t> grid;
  std::optional<OdeCoefficient> mode;
};

inline OdeCoefficient parse_ode_coeff(const std::string& s) {
  if (s == "paper") return OdeCoefficient::DimensionMinusOne;
  if (s == "cinv") return OdeCoefficient::InverseC;
  throw ConfigError("ode_coeff must be \"paper\" or \"cinv\", got \"" + s + "\"");
}

inline const char* ode_coeff_name(OdeCoefficient m) {
  return m == OdeCoefficient::InverseC ? "cinv" : "paper";
}

// ----------------------------------------------------------------- helpers

/// SHA-256 of `bytes` as lowercase hex.
inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

/// Finite doubles stay numbers; infinities and NaN become strings.
inline Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline Json number(const ExtendedReal& x) { return x.is_finite() ? number(x.value()) : Json("inf"); }

/// 1-based line and column of byte `offset` in `text`.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get_number(j.at(key), where + "." + key);
}

inline std::string string_or(const Json& j, const char* key, const std::string& fallback,
                             const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

inline ExtendedReal parse_N(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return ExtendedReal::infinity();
  }
  throw ConfigError(where + ": N must be a number or \"inf\"");
}

inline void check_expression(const std::string& text, const std::string& where) {
  try {
    (void)Expression::parse(text);
  } catch (const ExpressionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline Topology parse_topology(const std::string& s, const std::string& where) {
  for (auto t : {Topology::Collar, Topology::TwoEnded, Topology::BallApex, Topology::PointSymmetric})
    if (s == topology_name(t)) return t;
  throw ConfigError(where + ": unknown topology \"" + s + "\"");
}

inline FiberSpec parse_fiber(const Json& j, const std::string& where) {
  FiberSpec f;
  if (j.is_null()) return f;
  const auto kind = string_or(j, "kind", "torus", where);
  if (kind == "torus") {
    f.kind = Fiber::Kind::Torus;
    f.volume = number_or(j, "volume", 1.0, where);
  } else if (kind == "sphere") {
    f.kind = Fiber::Kind::Sphere;
    f.radius = number_or(j, "radius", 1.0, where);
  } else if (kind == "abstract") {
    f.kind = Fiber::Kind::Abstract;
    f.volume = number_or(j, "volume", 1.0, where);
    if (j.contains("ricci")) f.ricci = get_number(j.at("ricci"), where + ".ricci");
  } else {
    throw ConfigError(where + ": unknown fiber kind \"" + kind + "\"");
  }
  return f;
}

inline Extent parse_extent(const Json& j, const std::string& where) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "full")) return Extent::full();
  if (j.is_object() && j.contains("radius")) return Extent::radius(get_number(j.at("radius"), where + ".radius"));
  if (j.is_object() && j.contains("s_target"))
    return Extent::s_target(get_number(j.at("s_target"), where + ".s_target"));
  throw ConfigError(where + ": extent must be \"full\", {\"radius\": r} or {\"s_target\": s}");
}

}  // namespace detail

// ------------------------------------------------------------------ model

/// Constants a profile instance is checked against, when weaker than certified.
struct ClaimedBounds {
  std::optional<double> kappa;
  std::optional<double> lambda;
  std::optional<double> delta;
};

struct ScenarioInstance {
  InstanceSpec spec;
  ClaimedBounds claims;
};

struct CheckRequest {
  std::string id;  // registry key
  Json args = Json::object();

  /// Entry label: the id plus its arguments, e.g. "p_laplacian:p=3".
  [[nodiscard]] std::string label() const {
    std::string s = id;
    bool first = true;
    for (const auto& [k, v] : args.items()) {
      s += first ? ":" : ",";
      first = false;
      s += k + "=" + (v.is_string() ? v.get<std::string>() : v.is_number() ? format_real(v.get<double>()) : v.dump());
    }
    return s;
  }
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<ScenarioInstance> instances;
  std::vector<CheckRequest> checks;
  CheckOptions options;
  OdeCoefficient mode = OdeCoefficient::DimensionMinusOne;
  Json echo;
};

/// One check on one instance.
struct Entry {
  std::string check_id;
  std::string instance_id;
  ComparisonReport report;
  Json instance;      // spec echo
  Json certificate;   // certified constants, null when not applicable
  std::string error;  // non-empty when the check could not run
};

struct RunReport {
  std::string kind;  // "scenario" or "suite"
  std::string name;
  std::string input_digest;
  std::uint64_t seed = 0;
  Json echo;
  CheckOptions options;
  OdeCoefficient mode = OdeCoefficient::DimensionMinusOne;
  std::vector<Entry> entries;
  bool errors_are_fatal = true;

  [[nodiscard]] bool any_violation() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const Entry& e) { return e.report.verdict == Verdict::Violated; });
  }
  [[nodiscard]] bool any_error() const {
    return std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return !e.error.empty(); });
  }
  [[nodiscard]] int exit_code() const {
    if (errors_are_fatal && any_error()) return kConfigError;
    return any_violation() ? kViolation : kAllPass;
  }
};

// --------------------------------------------------------------- registry

struct CheckContext {
  const WarpedManifold& M;
  const HypothesisCertificate& cert;
  const InstanceSpec& spec;
  const CheckOptions& opts;
  OdeCoefficient mode;
};

struct CheckDefinition {
  std::vector<std::string> arguments;
  std::function<ComparisonReport(const CheckContext&, const Json&)> run;
  std::vector<Topology> topologies;  // empty: every topology

  [[nodiscard]] bool applies_to(Topology t) const {
    return topologies.empty() || std::find(topologies.begin(), topologies.end(), t) != topologies.end();
  }
};

namespace detail {

inline double cut_scale(const WarpedManifold& M) { return std::min(M.tau(), M.T()); }

inline RadialFn psi_from(const std::string& text) {
  auto e = std::make_shared<Expression>(Expression::parse(text));
  return [e](const Jet& u) { return e->eval(u); };
}

}  // namespace detail

/// Every check a scenario may name, with its accepted arguments.
inline const std::map<std::string, CheckDefinition>& check_registry() {
  static const std::map<std::string, CheckDefinition> registry = [] {
    std::map<std::string, CheckDefinition> r;
    auto plain = [&](const char* id, ComparisonReport (*fn)(const WarpedManifold&, const HypothesisCertificate&,
                                                             const CheckOptions&)) {
      r[id] = {{}, [fn](const CheckContext& c, const Json&) { return fn(c.M, c.cert, c.opts); }};
    };
    plain("point_laplacian", check_point_laplacian);
    plain("riccati", check_riccati);
    plain("boundary_laplacian", check_boundary_laplacian);
    plain("cut_bounds", check_cut_bounds);
    plain("bounded_density", check_bounded_density);
    plain("inradius", check_inradius);
    plain("volume_elements", check_volume_elements);
    plain("two_boundary_distance", check_two_boundary_distance);
    r["point_laplacian"].topologies = {Topology::PointSymmetric};
    r["two_boundary_distance"].topologies = {Topology::TwoEnded};
    r["p_laplacian"] = {{"p", "psi"}, [](const CheckContext& c, const Json& a) {
                          const double p = detail::number_or(a, "p", 2.0, "p_laplacian");
                          const auto psi = detail::string_or(a, "psi", "t", "p_laplacian");
                          return check_p_laplacian(c.M, c.cert, p, detail::psi_from(psi), c.opts);
                        }};
    r["volume_comparisons"] = {{"r", "R"}, [](const CheckContext& c, const Json& a) {
                                 const double scale = detail::cut_scale(c.M);
                                 const double lo = detail::number_or(a, "r", 0.3 * scale, "volume_comparisons");
                                 const double hi = detail::number_or(a, "R", 0.8 * scale, "volume_comparisons");
                                 return check_volume_comparisons(c.M, c.cert, lo, hi, c.opts);
                               }};
    r["kasue_estimate"] = {{"a", "b"}, [](const CheckContext& c, const Json& a) {
                             const double scale = detail::cut_scale(c.M);
                             const double lo = detail::number_or(a, "a", 0.25 * scale, "kasue_estimate");
                             const double hi = detail::number_or(a, "b", 0.75 * scale, "kasue_estimate");
                             return kasue_estimate(c.M, c.cert, lo, hi, c.opts);
                           },
                           {Topology::Collar, Topology::BallApex}};
    r["eigen"] = {{"p"}, [](const CheckContext& c, const Json& a) {
                    EigenCheckOptions eo;
                    eo.mode = c.mode;
                    eo.keep_samples = c.opts.keep_samples;
                    return check_eigen_theorems(c.M, c.cert, detail::number_or(a, "p", 2.0, "eigen"), eo);
                  },
                  {Topology::BallApex, Topology::TwoEnded}};
    r["splitting_model"] = {{}, [](const CheckContext& c, const Json&) {
                              const auto P = c.spec.params();
                              DensityFn fn;
                              if (!c.spec.density.empty()) {
                                auto e = std::make_shared<Expression>(Expression::parse(c.spec.density));
                                fn = [e](double t) { return e->at(t); };
                              }
                              return check_splitting_model(P, equality_case_for(P), c.opts, fn, c.spec.f0);
                            }};
    return r;
  }();
  return registry;
}

// ---------------------------------------------------------------- parsing

namespace detail {

inline std::string family_of(Topology t) {
  switch (t) {
    case Topology::Collar: return "random-collar";
    case Topology::BallApex: return "random-ball";
    case Topology::TwoEnded: return "random-two-ended";
    default: return "?";
  }
}

inline InstanceSpec random_instance(const std::string& family, std::uint64_t seed, std::uint64_t index,
                                    const std::string& id) {
  const auto s = instance_seed(seed, index);
  if (family == "random-collar") return random_profile_instance(Topology::Collar, s, id);
  if (family == "random-ball") return random_profile_instance(Topology::BallApex, s, id);
  if (family == "random-two-ended") return random_profile_instance(Topology::TwoEnded, s, id);
  if (family == "equality-models") return random_equality_instance(s, id);
  throw ConfigError("unknown instance family \"" + family + "\"");
}

inline ScenarioInstance parse_instance(const Json& j, const Json& params, std::uint64_t seed,
                                       const std::string& where, std::size_t position) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  ScenarioInstance out;
  auto& s = out.spec;
  s.id = string_or(j, "id", "instance-" + std::to_string(position), where);
  const auto kind = string_or(j, "kind", "profile", where);

  if (kind == "random") {
    const auto family = string_or(j, "family", "random-collar", where);
    const double index = number_or(j, "index", 0.0, where);
    if (index < 0.0 || index != std::floor(index)) throw ConfigError(where + ".index: expected a non-negative integer");
    s = random_instance(family, seed, std::uint64_t(index), s.id);
    return out;
  }

  const std::string pw = "params";
  if (!params.is_object()) throw ConfigError("params: missing object");
  const double n = get_number(require(params, "n", pw), pw + ".n");
  if (n != std::floor(n)) throw ConfigError("params.n: expected an integer");
  s.n = int(n);
  s.N = parse_N(require(params, "N", pw), pw + ".N");
  s.eps = number_or(params, "eps", 0.0, pw);
  try {
    (void)CurvatureParams::make(s.n, s.N, s.eps);
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("params rejected: ") + e.what());
  }

  if (kind == "profile") {
    s.kind = InstanceSpec::Kind::Profile;
    s.topology = parse_topology(string_or(j, "topology", "collar", where), where + ".topology");
    s.fiber = parse_fiber(j.contains("fiber") ? j.at("fiber") : Json(), where + ".fiber");
    s.w = string_or(j, "w", "1", where);
    s.phi = string_or(j, "phi", "0", where);
    check_expression(s.w, where + ".w");
    check_expression(s.phi, where + ".phi");
    s.T = get_number(require(j, "T", where), where + ".T");
    if (params.contains("kappa")) out.claims.kappa = get_number(params.at("kappa"), "params.kappa");
    if (params.contains("lambda")) out.claims.lambda = get_number(params.at("lambda"), "params.lambda");
  } else if (kind == "equality_model" || kind == "model_ball") {
    s.kind = kind == "model_ball" ? InstanceSpec::Kind::ModelBall : InstanceSpec::Kind::EqualityModel;
    s.kappa = get_number(require(params, "kappa", pw), pw + ".kappa");
    s.lambda = get_number(require(params, "lambda", pw), pw + ".lambda");
    s.f0 = number_or(j, "f0", 0.0, where);
    s.extent = parse_extent(j.contains("extent") ? j.at("extent") : Json(), where + ".extent");
    s.fiber = parse_fiber(j.contains("fiber") ? j.at("fiber") : Json(), where + ".fiber");
    s.density = string_or(j, "density", "", where);
    if (!s.density.empty()) check_expression(s.density, where + ".density");
  } else {
    throw ConfigError(where + ".kind: unknown instance kind \"" + kind + "\"");
  }
  if (params.contains("delta")) {
    const auto& d = params.at("delta");
    if (d.is_number()) {
      out.claims.delta = d.get<double>();
    } else if (!(d.is_string() && d.get<std::string>() == "certify")) {
      throw ConfigError("params.delta: expected \"certify\" or a number");
    }
  }
  return out;
}

inline CheckRequest parse_check(const Json& j, const std::string& where) {
  CheckRequest c;
  if (j.is_string()) {
    c.id = j.get<std::string>();
  } else if (j.is_object()) {
    c.id = string_or(j, "id", "", where);
    for (const auto& [k, v] : j.items())
      if (k != "id") c.args[k] = v;
  } else {
    throw ConfigError(where + ": expected a check id or an object with \"id\"");
  }
  const auto& reg = check_registry();
  const auto it = reg.find(c.id);
  if (it == reg.end()) throw ConfigError(where + ": unknown check id \"" + c.id + "\"");
  for (const auto& [k, v] : c.args.items())
    if (std::find(it->second.arguments.begin(), it->second.arguments.end(), k) == it->second.arguments.end())
      throw ConfigError(where + ": check \"" + c.id + "\" takes no argument \"" + k + "\"");
  if (c.args.contains("psi")) check_expression(c.args["psi"].get<std::string>(), where + ".psi");
  return c;
}

}  // namespace detail

/// Parses scenario text. Syntax errors carry the line and column.
inline Scenario parse_scenario(const std::string& text, const Overrides& ov = {}) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto cut = msg.find("parse error");
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      (cut == std::string::npos ? msg : msg.substr(cut)));
  }
  if (!j.is_object()) throw ConfigError("scenario: top level must be an object");
  const auto schema = detail::string_or(j, "schema", "", "scenario");
  if (schema != kScenarioSchema)
    throw ConfigError("scenario.schema: expected \"" + std::string(kScenarioSchema) + "\", got \"" + schema + "\"");
  for (const auto& [k, v] : j.items())
    if (k != "schema" && k != "name" && k != "seed" && k != "params" && k != "instance" && k != "instances" &&
        k != "checks" && k != "options")
      throw ConfigError("scenario: unknown field \"" + k + "\"");

  Scenario s;
  s.echo = j;
  s.name = detail::string_or(j, "name", "scenario", "scenario");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("scenario.seed: expected an unsigned integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (ov.seed) s.seed = *ov.seed;

  const Json params = j.contains("params") ? j.at("params") : Json();
  if (j.contains("instance") == j.contains("instances"))
    throw ConfigError("scenario: exactly one of \"instance\" and \"instances\" is required");
  if (j.contains("instance")) {
    s.instances.push_back(detail::parse_instance(j.at("instance"), params, s.seed, "instance", 0));
  } else {
    const auto& list = j.at("instances");
    if (!list.is_array() || list.empty()) throw ConfigError("instances: expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i)
      s.instances.push_back(
          detail::parse_instance(list[i], params, s.seed, "instances[" + std::to_string(i) + "]", i));
  }
  for (std::size_t i = 0; i < s.instances.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (s.instances[i].spec.id == s.instances[k].spec.id)
        throw ConfigError("instances: duplicate id \"" + s.instances[i].spec.id + "\"");

  const auto& checks = detail::require(j, "checks", "scenario");
  if (!checks.is_array()) throw ConfigError("scenario.checks: expected an array");
  for (std::size_t i = 0; i < checks.size(); ++i)
    s.checks.push_back(detail::parse_check(checks[i], "checks[" + std::to_string(i) + "]"));

  const Json opts = j.contains("options") ? j.at("options") : Json::object();
  s.options.tol = detail::number_or(opts, "tol", s.options.tol, "options");
  const double grid = detail::number_or(opts, "grid", double(s.options.grid), "options");
  if (grid < 8 || grid != std::floor(grid)) throw ConfigError("options.grid: expected an integer >= 8");
  s.options.grid = std::size_t(grid);
  s.options.exclusion = detail::number_or(opts, "exclusion", s.options.exclusion, "options");
  s.mode = parse_ode_coeff(detail::string_or(opts, "ode_coeff", "paper", "options"));
  if (ov.tol) s.options.tol = *ov.tol;
  if (ov.grid) s.options.grid = *ov.grid;
  if (ov.mode) s.mode = *ov.mode;
  if (!(s.options.tol > 0.0)) throw ConfigError("options.tol: must be > 0");
  return s;
}

// ---------------------------------------------------------------- running

inline Json spec_json(const InstanceSpec& s) {
  Json j;
  j["id"] = s.id;
  j["kind"] = instance_kind_name(s.kind);
  j["n"] = s.n;
  j["N"] = number(s.N);
  j["eps"] = s.eps;
  if (s.kind == InstanceSpec::Kind::Profile) {
    j["topology"] = topology_name(s.topology);
    Json f;
    f["kind"] = s.fiber.build(s.n).name();
    if (s.fiber.kind == Fiber::Kind::Sphere) f["radius"] = s.fiber.radius;
    else f["volume"] = s.fiber.volume;
    if (s.fiber.ricci) f["ricci"] = *s.fiber.ricci;
    j["fiber"] = f;
    j["w"] = s.w;
    j["phi"] = s.phi;
    j["T"] = s.T;
  } else {
    j["kappa"] = s.kappa;
    j["lambda"] = s.lambda;
    if (s.kind == InstanceSpec::Kind::EqualityModel) {
      j["f0"] = s.f0;
      if (!s.density.empty()) j["density"] = s.density;
    }
  }
  return j;
}

inline Json certificate_json(const HypothesisCertificate& c) {
  Json j;
  j["kappa"] = number(c.kappa_eff);
  j["kappa_radial"] = number(c.kappa_radial);
  j["kappa_fiber"] = c.kappa_fiber ? number(*c.kappa_fiber) : Json();
  j["lambda"] = c.lambda_eff ? number(*c.lambda_eff) : Json();
  j["delta"] = number(c.delta_eff);
  j["c"] = number(c.params.c);
  j["pair_flags"] = c.full_pair().flags_string();
  return j;
}

namespace detail {

/// Applies claimed (weaker) bounds to a certificate.
inline HypothesisCertificate apply_claims(const HypothesisCertificate& cert, const ClaimedBounds& b) {
  if (!b.kappa && !b.lambda && !b.delta) return cert;
  const double kappa = b.kappa.value_or(cert.kappa_eff);
  const double delta = b.delta.value_or(cert.delta_eff);
  std::optional<double> lambda = cert.lambda_eff;
  if (b.lambda) lambda = *b.lambda;
  if (kappa > cert.kappa_eff + 1e-12 * std::max(1.0, std::abs(cert.kappa_eff)))
    throw ConfigError("claimed kappa " + format_real(kappa) + " exceeds the certified " + format_real(cert.kappa_eff));
  if (lambda && cert.lambda_eff && *lambda > *cert.lambda_eff + 1e-12 * std::max(1.0, std::abs(*cert.lambda_eff)))
    throw ConfigError("claimed lambda " + format_real(*lambda) + " exceeds the certified " +
                      format_real(*cert.lambda_eff));
  if (delta < cert.delta_eff - 1e-12 * std::max(1.0, std::abs(cert.delta_eff)))
    throw ConfigError("claimed delta " + format_real(delta) + " is below the certified " + format_real(cert.delta_eff));
  return cert.weakened(std::min(kappa, cert.kappa_eff),
                       lambda && cert.lambda_eff ? std::optional(std::min(*lambda, *cert.lambda_eff)) : lambda,
                       std::max(delta, cert.delta_eff));
}

/// Number of workers: VERIFY_THREADS when set, else the hardware count.
inline unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VERIFY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = unsigned(v);
  }
  return unsigned(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

/// Runs job(i) for i < count on a bounded worker pool. Results land in
/// per-index slots, so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
  const unsigned workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

inline void sort_entries(std::vector<Entry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.check_id, a.instance_id) < std::tie(b.check_id, b.instance_id);
  });
}

/// Builds and certifies one instance, then runs each requested check.
inline std::vector<Entry> run_instance(const InstanceSpec& spec, const ClaimedBounds& claims,
                                       const std::vector<CheckRequest>& checks, const CheckOptions& opts,
                                       OdeCoefficient mode) {
  std::vector<Entry> out;
  const Json echo = spec_json(spec);
  auto fail_all = [&](const std::string& why) {
    for (const auto& c : checks) {
      Entry e;
      e.check_id = c.label();
      e.instance_id = spec.id;
      e.instance = echo;
      e.report.check = c.id;
      e.error = why;
      out.push_back(std::move(e));
    }
    return out;
  };
  std::optional<WarpedManifold> M;
  std::optional<HypothesisCertificate> cert;
  try {
    M.emplace(spec.build());
    cert.emplace(apply_claims(certify_hypotheses(*M, spec.params(), opts.grid, opts.exclusion), claims));
  } catch (const ConfigError& e) {
    return fail_all(e.what());
  } catch (const std::exception& e) {
    return fail_all(std::string("instance rejected: ") + e.what());
  }
  const Json cj = certificate_json(*cert);
  for (const auto& c : checks) {
    Entry e;
    e.check_id = c.label();
    e.instance_id = spec.id;
    e.instance = echo;
    e.certificate = cj;
    const auto& def = check_registry().at(c.id);
    if (!def.applies_to(M->topology())) {
      e.report = assemble_report(
          c.id, {skipped_part(c.id, std::string("not applicable to ") + topology_name(M->topology()) + " instances")});
      out.push_back(std::move(e));
      continue;
    }
    try {
      e.report = def.run(CheckContext{*M, *cert, spec, opts, mode}, c.args);
    } catch (const std::exception& ex) {
      e.report.check = c.id;
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

/// Runs every check on every instance of a parsed scenario.
inline RunReport run_scenario(const Scenario& s, const std::string& digest, bool keep_samples = false) {
  RunReport r;
  r.kind = "scenario";
  r.name = s.name;
  r.input_digest = digest;
  r.seed = s.seed;
  r.echo = s.echo;
  r.options = s.options;
  r.options.keep_samples = keep_samples;
  r.mode = s.mode;
  std::vector<std::vector<Entry>> slots(s.instances.size());
  detail::parallel_for(s.instances.size(), [&](std::size_t i) {
    slots[i] = detail::run_instance(s.instances[i].spec, s.instances[i].claims, s.checks, r.options, s.mode);
  });
  for (auto& v : slots) std::move(v.begin(), v.end(), std::back_inserter(r.entries));
  detail::sort_entries(r.entries);
  return r;
}

inline std::string scenario_digest(const std::string& bytes, const Overrides& ov) {
  std::string material = bytes;
  material += "\nversion=" + version();
  if (ov.seed) material += "\nseed=" + std::to_string(*ov.seed);
  if (ov.tol) material += "\ntol=" + format_real(*ov.tol);
  if (ov.grid) material += "\ngrid=" + std::to_string(*ov.grid);
  if (ov.mode) material += std::string("\node_coeff=") + ode_coeff_name(*ov.mode);
  return sha256_hex(material);
}

/// Reads, parses and runs a scenario file. Throws ConfigError on bad input.
inline RunReport run_scenario_file(const std::string& path, const Overrides& ov = {}, bool keep_samples = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file \"" + path + "\"");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Scenario s;
  try {
    s = parse_scenario(bytes, ov);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return run_scenario(s, scenario_digest(bytes, ov), keep_samples);
}

// ------------------------------------------------------------------ suites

inline const std::vector<std::string>& suite_families() {
  static const std::vector<std::string> f{"random-collar", "random-ball", "random-two-ended", "equality-models",
                                          "eigen-suite"};
  return f;
}

/// Checks run by each randomized family.
inline std::vector<CheckRequest> suite_checks(const std::string& family) {
  auto c = [](std::string id, Json args = Json::object()) { return CheckRequest{std::move(id), std::move(args)}; };
  auto pl = [&](double p) { return c("p_laplacian", Json{{"p", p}}); };
  if (family == "random-collar")
    return {c("riccati"), c("boundary_laplacian"), c("cut_bounds"), c("bounded_density"), c("volume_elements"),
            c("volume_comparisons"), pl(1.5), pl(2.0), pl(3.0)};
  if (family == "random-ball")
    return {c("riccati"),         c("boundary_laplacian"), c("cut_bounds"),
            c("bounded_density"), c("inradius"),           c("volume_elements"),
            c("volume_comparisons"), pl(2.0),             c("eigen", Json{{"p", 2.0}})};
  if (family == "random-two-ended")
    return {c("riccati"), c("boundary_laplacian"), c("two_boundary_distance"), c("inradius"),
            c("eigen", Json{{"p", 2.0}})};
  if (family == "equality-models") return {c("riccati"), c("boundary_laplacian")};
  throw ConfigError("unknown suite family \"" + family + "\"");
}

namespace detail {

/// Shooting against finite differences on a random monotone (kappa, lambda, D).
inline Entry eigen_agreement(std::uint64_t seed, std::size_t index, double p) {
  numerics::Rng rng(instance_seed(seed, index));
  double kappa = 0.0, lambda = 0.0;
  for (;;) {
    kappa = rng.uniform(-2.0, 2.0);
    lambda = rng.uniform(0.0, 2.0);
    if (kappa < 0.0 && rng.uniform() < 0.3) lambda = std::sqrt(-kappa);
    if (classify_pair(kappa, lambda).monotone) break;
  }
  const int n = rng.integer(2, 5);
  const auto C = barrier_C(kappa, lambda);
  const double D = rng.uniform(0.1, 1.0) * (C.is_finite() ? C.value() : 3.0);
  char id[32];
  std::snprintf(id, sizeof id, "eigen-%04zu", index);
  Entry e;
  e.check_id = "eigen_agreement:p=" + format_real(p);
  e.instance_id = id;
  e.instance = Json{{"id", id}, {"kind", "model_problem"}, {"n", n}, {"kappa", kappa}, {"lambda", lambda},
                    {"D", D},   {"p", p}};
  const auto sh = model_eigenvalue(p, n, kappa, lambda, D);
  const auto fd = fd_eigenvalue_oracle(p, model_weight(kappa, lambda, n - 1), D);
  const double rel = std::abs(sh.value - fd.value) / std::abs(fd.value);
  auto part = summarize_part("shooting_vs_fd", {{D, sh.value, fd.value, -rel}}, 1e-4, false);
  part.note = "margin = -|shooting - fd| / fd";
  e.report = assemble_report("eigen_agreement", {part});
  return e;
}

}  // namespace detail

/// `count` instances of `family` drawn deterministically from `seed`.
inline RunReport run_suite(const std::string& family, std::size_t count, std::uint64_t seed,
                           const Overrides& ov = {}, bool keep_samples = false) {
  if (std::find(suite_families().begin(), suite_families().end(), family) == suite_families().end())
    throw ConfigError("unknown suite family \"" + family + "\"");
  RunReport r;
  r.kind = "suite";
  r.name = family;
  r.seed = seed;
  r.errors_are_fatal = false;
  if (ov.tol) r.options.tol = *ov.tol;
  if (ov.grid) r.options.grid = *ov.grid;
  if (ov.mode) r.mode = *ov.mode;
  r.options.keep_samples = keep_samples;
  r.echo = Json{{"family", family}, {"count", count}, {"seed", seed}};
  std::string material = "suite\nfamily=" + family + "\ncount=" + std::to_string(count) +
                         "\nseed=" + std::to_string(seed) + "\nversion=" + version();
  if (ov.tol) material += "\ntol=" + format_real(*ov.tol);
  if (ov.grid) material += "\ngrid=" + std::to_string(*ov.grid);
  if (ov.mode) material += std::string("\node_coeff=") + ode_coeff_name(*ov.mode);
  r.input_digest = sha256_hex(material);

  std::vector<std::vector<Entry>> slots(count);
  if (family == "eigen-suite") {
    detail::parallel_for(count, [&](std::size_t i) { slots[i].push_back(detail::eigen_agreement(seed, i, 2.0)); });
  } else {
    const auto checks = suite_checks(family);
    detail::parallel_for(count, [&](std::size_t i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s-%04zu", family.c_str(), i);
      const auto spec = detail::random_instance(family, seed, i, id);
      slots[i] = detail::run_instance(spec, {}, checks, r.options, r.mode);
    });
  }
  for (auto& v : slots) std::move(v.begin(), v.end(), std::back_inserter(r.entries));
  detail::sort_entries(r.entries);
  return r;
}

// ---------------------------------------------------------------- emission

struct PartSummary {
  std::size_t instances = 0;
  std::size_t violated = 0;
  std::size_t skipped = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double max_abs_margin = 0.0;
  std::string worst_instance;
};

/// Worst margins per "check/part" over all entries.
inline std::map<std::string, PartSummary> summarize(const RunReport& r) {
  std::map<std::string, PartSummary> out;
  for (const auto& e : r.entries) {
    for (const auto& p : e.report.parts) {
      auto& s = out[e.check_id + "/" + p.id];
      ++s.instances;
      if (p.verdict == Verdict::Skipped) {
        ++s.skipped;
        continue;
      }
      if (p.verdict == Verdict::Violated) ++s.violated;
      if (!std::isnan(s.worst_margin) && !(p.worst_margin >= s.worst_margin)) {
        s.worst_margin = p.worst_margin;
        s.worst_instance = e.instance_id;
      }
      if (!(p.max_abs_margin <= s.max_abs_margin)) s.max_abs_margin = p.max_abs_margin;
    }
  }
  return out;
}

inline Json part_json(const PartReport& p) {
  Json j;
  j["id"] = p.id;
  j["verdict"] = verdict_name(p.verdict);
  j["worst_margin"] = number(p.worst_margin);
  j["worst_location"] = number(p.worst_location);
  j["worst_lhs"] = number(p.worst_lhs);
  j["worst_rhs"] = number(p.worst_rhs);
  j["max_abs_margin"] = number(p.max_abs_margin);
  j["tolerance"] = number(p.tolerance);
  j["evaluated"] = p.evaluated;
  j["note"] = p.note;
  return j;
}

/// The versioned JSON layout of a report.
inline Json report_json(const RunReport& r) {
  Json j;
  j["schema"] = kReportSchema;
  j["version"] = version();
  j["kind"] = r.kind;
  j["name"] = r.name;
  j["input_digest"] = r.input_digest;
  j["seed"] = r.seed;
  j["options"] = Json{{"tol", r.options.tol},
                      {"grid", r.options.grid},
                      {"exclusion", r.options.exclusion},
                      {"ode_coeff", ode_coeff_name(r.mode)}};
  j["input"] = r.echo;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json ej;
    ej["check_id"] = e.check_id;
    ej["instance_id"] = e.instance_id;
    ej["verdict"] = e.error.empty() ? verdict_name(e.report.verdict) : "error";
    ej["worst_margin"] = number(e.report.worst_margin());
    if (!e.error.empty()) ej["error"] = e.error;
    ej["instance"] = e.instance;
    ej["certificate"] = e.certificate;
    Json parts = Json::array();
    for (const auto& p : e.report.parts) parts.push_back(part_json(p));
    ej["parts"] = parts;
    entries.push_back(ej);
  }
  j["entries"] = entries;
  Json summary = Json::object();
  for (const auto& [key, s] : summarize(r))
    summary[key] = Json{{"instances", s.instances},
                        {"violated", s.violated},
                        {"skipped", s.skipped},
                        {"worst_margin", number(s.worst_margin)},
                        {"max_abs_margin", number(s.max_abs_margin)},
                        {"worst_instance", s.worst_instance}};
  j["summary"] = summary;
  j["exit_code"] = r.exit_code();
  return j;
}

/// Structural validation of a report document; returns the first problem.
inline std::optional<std::string> validate_report_json(const Json& j) {
  auto need = [&](const Json& o, const char* k, bool (Json::*is)() const noexcept,
                  const std::string& where) -> std::optional<std::string> {
    if (!o.is_object() || !o.contains(k)) return where + ": missing \"" + k + "\"";
    if (!(o.at(k).*is)()) return where + ": \"" + k + "\" has the wrong type";
    return std::nullopt;
  };
  auto numeric = [](const Json& v) {
    return v.is_number() || (v.is_string() && (v == "inf" || v == "-inf" || v == "nan"));
  };
  for (auto [k, is] : std::initializer_list<std::pair<const char*, bool (Json::*)() const noexcept>>{
           {"schema", &Json::is_string}, {"version", &Json::is_string},   {"kind", &Json::is_string},
           {"name", &Json::is_string},   {"input_digest", &Json::is_string}, {"seed", &Json::is_number_unsigned},
           {"options", &Json::is_object}, {"entries", &Json::is_array},    {"summary", &Json::is_object},
           {"exit_code", &Json::is_number_integer}})
    if (auto e = need(j, k, is, "report")) return e;
  if (j.at("schema") != kReportSchema) return "report: unknown schema " + j.at("schema").dump();
  if (j.at("input_digest").get<std::string>().size() != 64) return "report: input_digest is not SHA-256 hex";
  const int code = j.at("exit_code").get<int>();
  if (code < 0 || code > 2) return "report: exit_code outside {0, 1, 2}";
  std::string prev_check, prev_instance;
  for (std::size_t i = 0; i < j.at("entries").size(); ++i) {
    const auto& e = j.at("entries")[i];
    const std::string where = "entries[" + std::to_string(i) + "]";
    for (auto k : {"check_id", "instance_id", "verdict"})
      if (auto err = need(e, k, &Json::is_string, where)) return err;
    if (auto err = need(e, "parts", &Json::is_array, where)) return err;
    if (!e.contains("worst_margin") || !numeric(e.at("worst_margin"))) return where + ": bad worst_margin";
    const auto key = std::make_pair(e.at("check_id").get<std::string>(), e.at("instance_id").get<std::string>());
    if (i > 0 && key < std::make_pair(prev_check, prev_instance)) return where + ": entries are not sorted";
    std::tie(prev_check, prev_instance) = key;
    for (std::size_t k = 0; k < e.at("parts").size(); ++k) {
      const auto& p = e.at("parts")[k];
      const std::string pw = where + ".parts[" + std::to_string(k) + "]";
      for (auto f : {"id", "verdict", "note"})
        if (auto err = need(p, f, &Json::is_string, pw)) return err;
      for (auto f : {"worst_margin", "worst_location", "worst_lhs", "worst_rhs", "max_abs_margin", "tolerance"})
        if (!p.contains(f) || !numeric(p.at(f))) return pw + ": bad \"" + f + "\"";
      const auto v = p.at("verdict").get<std::string>();
      if (v != "holds" && v != "violated" && v != "equality" && v != "skipped") return pw + ": bad verdict";
    }
  }
  return std::nullopt;
}

/// CSV of margins. Kept samples give one row each; otherwise each evaluated
/// part contributes its worst sample.
inline std::string report_csv(const RunReport& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  auto row = [&](const std::string& check, const std::string& inst, double x, double lhs, double rhs,
                 double margin) {
    out += check + "," + inst + "," + format_real(x) + "," + format_real(lhs) + "," + format_real(rhs) + "," +
           format_real(margin) + "\n";
  };
  for (const auto& e : r.entries) {
    for (const auto& p : e.report.parts) {
      if (p.verdict == Verdict::Skipped) continue;
      const std::string id = e.check_id + "/" + p.id;
      if (!p.samples.empty()) {
        for (const auto& s : p.samples) row(id, e.instance_id, s.x, s.lhs, s.rhs, s.margin);
      } else {
        row(id, e.instance_id, p.worst_location, p.worst_lhs, p.worst_rhs, p.worst_margin);
      }
    }
  }
  return out;
}

/// Writes report.json, and report.csv for the csv format, into `dir`.
inline std::vector<std::string> emit_tables(const RunReport& r, const std::string& dir, const std::string& format) {
  if (format != "json" && format != "csv") throw ConfigError("format must be json or csv, got \"" + format + "\"");
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path);
    written.push_back(path);
  };
  write("report.json", report_json(r).dump(2) + "\n");
  if (format == "csv") write("report.csv", report_csv(r));
  return written;
}

}  // namespace wbcomp::scenario
