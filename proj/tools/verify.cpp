// verify: batch runner for scenario files and randomized suites.
//
//   verify run <file> [--seed U64] [--out DIR] [--format json|csv] [--tol FLOAT]
//                     [--grid N] [--ode-coeff paper|cinv]
//   verify suite <family> --count N --seed U64 [--out DIR] [--format json|csv] ...
//
// Exit status: 0 all pass, 1 some check violated, 2 configuration error.
// Without --out the report goes to stdout. Wall time is printed on stderr
// only, so reports stay byte-identical across runs.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "wbcomp/scenario.hpp"

namespace sc = wbcomp::scenario;

namespace {

struct Common {
  std::string out;
  std::string format = "json";
  std::optional<double> tol;
  std::optional<std::size_t> grid;
  std::string ode_coeff;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Directory for report.json / report.csv");
  cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--tol", c.tol, "Verdict tolerance");
  cmd->add_option("--grid", c.grid, "Evaluation grid size")->check(CLI::Range(8, 1 << 24));
  cmd->add_option("--ode-coeff", c.ode_coeff, "Model ODE drift coefficient")
      ->check(CLI::IsMember({"paper", "cinv"}));
}

sc::Overrides overrides(const Common& c, std::optional<std::uint64_t> seed) {
  sc::Overrides ov;
  ov.seed = seed;
  ov.tol = c.tol;
  ov.grid = c.grid;
  if (!c.ode_coeff.empty()) ov.mode = sc::parse_ode_coeff(c.ode_coeff);
  return ov;
}

int finish(const sc::RunReport& r, const Common& c, double seconds) {
  if (c.out.empty()) {
    std::cout << (c.format == "csv" ? sc::report_csv(r) : sc::report_json(r).dump(2) + "\n");
  } else {
    std::filesystem::create_directories(c.out);
    for (const auto& path : sc::emit_tables(r, c.out, c.format)) std::cerr << "wrote " << path << "\n";
  }
  std::size_t violated = 0, errors = 0;
  for (const auto& e : r.entries) {
    if (!e.error.empty()) {
      ++errors;
      std::cerr << "error: " << e.check_id << " on " << e.instance_id << ": " << e.error << "\n";
    } else if (e.report.verdict == wbcomp::Verdict::Violated) {
      ++violated;
    }
  }
  std::fprintf(stderr, "%s: %zu entries, %zu violated, %zu errors, wall time %.3f s\n", r.name.c_str(),
               r.entries.size(), violated, errors, seconds);
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Comparison-geometry verification runner"};
  app.require_subcommand(1);

  Common run_opts, suite_opts;
  std::string file, family;
  std::optional<std::uint64_t> run_seed;
  std::uint64_t suite_seed = 0;
  std::size_t count = 0;

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("file", file, "Scenario JSON file")->required();
  run->add_option("--seed", run_seed, "Override the scenario seed");
  add_common(run, run_opts);

  auto* suite = app.add_subcommand("suite", "Run a randomized family");
  suite->add_option("family", family, "Family name")
      ->required()
      ->check(CLI::IsMember(sc::suite_families()));
  suite->add_option("--count", count, "Number of instances")->required();
  suite->add_option("--seed", suite_seed, "Family seed")->required();
  add_common(suite, suite_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::kConfigError;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  try {
    if (*run) {
      const auto r = sc::run_scenario_file(file, overrides(run_opts, run_seed), run_opts.format == "csv");
      return finish(r, run_opts, elapsed());
    }
    const auto r = sc::run_suite(family, count, suite_seed, overrides(suite_opts, std::nullopt));
    return finish(r, suite_opts, elapsed());
  } catch (const sc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return sc::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sc::kConfigError;
  }
}
