#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wbcomp/scenario.hpp"

using namespace wbcomp;
using namespace wbcomp::scenario;

namespace {

const std::string kScenarios = WBCOMP_SCENARIO_DIR;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WBCOMP_VERIFY_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wbcomp-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const char* kMinimal = R"({
  "schema": "wbcomp-scenario/1",
  "params": {"n": 3, "N": "inf", "eps": 0},
  "instance": {"kind": "profile", "topology": "collar", "w": "1", "phi": "0", "T": 1},
  "checks": ["riccati"]
})";

std::string minimal_with(const std::string& from, const std::string& to) {
  std::string s = kMinimal;
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST(ScenarioParse, MinimalScenario) {
  const auto s = parse_scenario(kMinimal);
  ASSERT_EQ(s.instances.size(), 1u);
  EXPECT_EQ(s.instances[0].spec.id, "instance-0");
  ASSERT_EQ(s.checks.size(), 1u);
  EXPECT_EQ(s.checks[0].id, "riccati");
  EXPECT_EQ(s.options.tol, 1e-7);
  EXPECT_EQ(s.options.grid, 512u);
}

TEST(ScenarioParse, SyntaxErrorsCarryLineAndColumn) {
  const auto msg = config_error("{\n  \"schema\": ,\n}");
  EXPECT_EQ(msg.rfind("line 2, column 13", 0), 0u) << msg;
}

TEST(ScenarioParse, UnknownCheckId) {
  const auto msg = config_error(minimal_with("\"riccati\"", "\"ricatti\""));
  EXPECT_NE(msg.find("unknown check id \"ricatti\""), std::string::npos) << msg;
}

TEST(ScenarioParse, UnknownCheckArgument) {
  const auto msg = config_error(minimal_with("\"riccati\"", R"({"id": "p_laplacian", "q": 2})"));
  EXPECT_NE(msg.find("takes no argument \"q\""), std::string::npos) << msg;
}

TEST(ScenarioParse, ForbiddenDimensionRange) {
  const auto msg = config_error(minimal_with("\"N\": \"inf\"", "\"N\": 2"));
  EXPECT_NE(msg.find("N in ]1,n[ forbidden"), std::string::npos) << msg;
}

TEST(ScenarioParse, BadExpressionsAndFields) {
  EXPECT_NE(config_error(minimal_with("\"w\": \"1\"", "\"w\": \"1 +\"")).find("instance.w"), std::string::npos);
  EXPECT_NE(config_error(minimal_with("\"checks\"", "\"extra\": 1, \"checks\"")).find("unknown field \"extra\""),
            std::string::npos);
  EXPECT_NE(config_error(minimal_with("wbcomp-scenario/1", "wbcomp-scenario/9")).find("schema"), std::string::npos);
  EXPECT_FALSE(config_error(minimal_with("\"checks\"", "\"options\": {\"grid\": 4}, \"checks\"")).empty());
  EXPECT_FALSE(config_error(minimal_with("\"T\": 1}", "\"T\": 1, \"topology\": \"annulus\"}")).empty());
}

TEST(ScenarioParse, OverridesWin) {
  Overrides ov;
  ov.seed = 99;
  ov.tol = 1e-5;
  ov.grid = 64;
  ov.mode = OdeCoefficient::InverseC;
  const auto s = parse_scenario(kMinimal, ov);
  EXPECT_EQ(s.seed, 99u);
  EXPECT_EQ(s.options.tol, 1e-5);
  EXPECT_EQ(s.options.grid, 64u);
  EXPECT_EQ(s.mode, OdeCoefficient::InverseC);
  EXPECT_NE(scenario_digest(kMinimal, {}), scenario_digest(kMinimal, ov));
  EXPECT_EQ(scenario_digest(kMinimal, ov), scenario_digest(kMinimal, ov));
}

TEST(ScenarioParse, CheckLabelsFormatArguments) {
  const auto s = parse_scenario(minimal_with("\"riccati\"", R"({"id": "p_laplacian", "p": 2, "psi": "t"})"));
  EXPECT_EQ(s.checks[0].label(), "p_laplacian:p=2,psi=t");
}

TEST(ScenarioRun, CylinderAllChecks) {
  const auto r = run_scenario_file(kScenarios + "/cylinder-all-checks.json");
  EXPECT_EQ(r.exit_code(), kAllPass);
  EXPECT_EQ(r.entries.size(), 26u);
  std::size_t equality = 0;
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.error.empty()) << e.check_id << ": " << e.error;
    EXPECT_NE(e.report.verdict, Verdict::Violated) << e.check_id << " " << e.instance_id;
    equality += e.report.verdict == Verdict::Equality;
  }
  EXPECT_GT(equality, 10u);
}

TEST(ScenarioRun, EqualityModelGivesEquality) {
  const auto r = run_scenario_file(kScenarios + "/equality-model-N5-eps05.json");
  EXPECT_EQ(r.exit_code(), kAllPass);
  ASSERT_EQ(r.entries.size(), 3u);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.error.empty()) << e.error;
    EXPECT_EQ(e.report.verdict, Verdict::Equality) << e.check_id;
  }
}

TEST(ScenarioRun, RejectedParamsFile) {
  try {
    (void)run_scenario_file(kScenarios + "/rejected-N2-n3.json");
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("N in ]1,n[ forbidden"), std::string::npos) << e.what();
  }
}

TEST(ScenarioRun, StrongerClaimsAreConfigurationErrors) {
  const auto s = parse_scenario(minimal_with("\"eps\": 0", "\"eps\": 0, \"kappa\": 1"));
  const auto r = run_scenario(s, "digest");
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_NE(r.entries[0].error.find("exceeds the certified"), std::string::npos) << r.entries[0].error;
  EXPECT_EQ(r.exit_code(), kConfigError);
}

TEST(ScenarioRun, WeakerClaimsAreAccepted) {
  const auto s = parse_scenario(minimal_with("\"eps\": 0", "\"eps\": 0, \"kappa\": -1, \"delta\": 0.5"));
  const auto r = run_scenario(s, "digest");
  EXPECT_EQ(r.exit_code(), kAllPass);
  EXPECT_EQ(r.entries[0].certificate.at("kappa").get<double>(), -1.0);
}

TEST(ScenarioRun, InapplicableChecksAreSkipped) {
  const auto s = parse_scenario(minimal_with("\"riccati\"", "\"two_boundary_distance\""));
  const auto r = run_scenario(s, "digest");
  EXPECT_EQ(r.entries[0].report.verdict, Verdict::Skipped);
  EXPECT_EQ(r.exit_code(), kAllPass);
}

TEST(ScenarioRun, EntriesAreSortedAndThreadCountInvariant) {
  const std::string text = slurp(kScenarios + "/cylinder-all-checks.json");
  const auto s = parse_scenario(text);
  ::setenv("VERIFY_THREADS", "1", 1);
  const auto one = report_json(run_scenario(s, "d")).dump();
  ::setenv("VERIFY_THREADS", "4", 1);
  const auto four = report_json(run_scenario(s, "d")).dump();
  ::unsetenv("VERIFY_THREADS");
  EXPECT_EQ(one, four);
}

TEST(Emission, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Emission, CsvHeaderIsExact) {
  const auto r = run_scenario(parse_scenario(kMinimal), "d");
  const auto csv = report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "check_id,instance_id,t_or_s,lhs,rhs,margin");
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Emission, EmptyReportHasHeadersOnly) {
  RunReport r;
  r.kind = "suite";
  r.name = "empty";
  r.input_digest = sha256_hex("");
  const auto dir = scratch_dir("empty");
  const auto files = emit_tables(r, dir.string(), "csv");
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(slurp((dir / "report.csv").string()), std::string(kCsvHeader) + "\n");
  const auto j = Json::parse(slurp((dir / "report.json").string()));
  EXPECT_FALSE(validate_report_json(j).has_value());
  EXPECT_TRUE(j.at("entries").empty());
  std::filesystem::remove_all(dir);
}

TEST(Emission, JsonRoundTripsThroughTheValidator) {
  const auto r = run_scenario_file(kScenarios + "/cylinder-all-checks.json");
  const auto text = report_json(r).dump(2);
  const auto j = Json::parse(text);
  const auto problem = validate_report_json(j);
  EXPECT_FALSE(problem.has_value()) << *problem;
  EXPECT_EQ(j.at("schema"), kReportSchema);
  EXPECT_EQ(j.at("version"), version());
  EXPECT_EQ(j.dump(2), text);
}

TEST(Emission, ValidatorRejectsBrokenReports) {
  auto j = report_json(run_scenario_file(kScenarios + "/cylinder-all-checks.json"));
  auto unsorted = j;
  std::swap(unsorted["entries"][0], unsorted["entries"][5]);
  EXPECT_TRUE(validate_report_json(unsorted).has_value());
  auto noschema = j;
  noschema.erase("schema");
  EXPECT_TRUE(validate_report_json(noschema).has_value());
}

TEST(Emission, RejectsUnknownFormatAndUnwritableDirectory) {
  RunReport r;
  EXPECT_THROW(emit_tables(r, "/tmp", "xml"), ConfigError);
  try {
    emit_tables(r, "/nonexistent/dir", "json");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/report.json"), std::string::npos);
  }
}

TEST(Suite, SameSeedIsByteIdentical) {
  const auto a = run_suite("random-collar", 8, 42);
  const auto b = run_suite("random-collar", 8, 42);
  EXPECT_EQ(report_json(a).dump(2), report_json(b).dump(2));
  EXPECT_EQ(report_csv(a), report_csv(b));
  const auto c = run_suite("random-collar", 8, 43);
  EXPECT_NE(report_json(a).dump(), report_json(c).dump());
}

TEST(Suite, UnknownFamilyIsRejected) { EXPECT_THROW(run_suite("random-torus", 1, 1), ConfigError); }

TEST(Suite, EqualityModelsStayWithinOneMillionth) {
  const auto r = run_suite("equality-models", 50, 7);
  EXPECT_EQ(r.exit_code(), kAllPass);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.error.empty()) << e.instance_id << ": " << e.error;
    for (const auto& p : e.report.parts) {
      if (p.verdict == Verdict::Skipped) continue;
      // This part reports tol - |G|; the deviation itself is worst_lhs.
      const double deviation = p.id.rfind("equality_propagation", 0) == 0 ? p.worst_lhs : p.max_abs_margin;
      EXPECT_LE(deviation, 1e-6) << e.check_id << "/" << p.id << " " << e.instance_id;
    }
  }
}

TEST(Suite, EigenSuiteAgreesWithinOneTenThousandth) {
  const auto r = run_suite("eigen-suite", 20, 1);
  ASSERT_EQ(r.entries.size(), 20u);
  for (const auto& e : r.entries) {
    ASSERT_EQ(e.report.parts.size(), 1u);
    const auto& p = e.report.parts[0];
    EXPECT_LE(std::abs(p.worst_lhs - p.worst_rhs), 1e-4 * std::abs(p.worst_rhs)) << e.instance_id;
  }
  EXPECT_EQ(r.exit_code(), kAllPass);
}

TEST(Suite, SummaryTracksWorstInstance) {
  const auto r = run_suite("random-two-ended", 6, 4);
  const auto sum = summarize(r);
  ASSERT_TRUE(sum.count("riccati/riccati"));
  const auto& s = sum.at("riccati/riccati");
  EXPECT_EQ(s.instances, 6u);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& e : r.entries)
    if (e.check_id == "riccati")
      for (const auto& p : e.report.parts)
        if (p.id == "riccati") worst = std::min(worst, p.worst_margin);
  EXPECT_EQ(s.worst_margin, worst);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("run " + kScenarios + "/cylinder-all-checks.json"), 0);
  EXPECT_EQ(run_cli("run " + kScenarios + "/rejected-N2-n3.json"), 2);
  EXPECT_EQ(run_cli("run /nonexistent.json"), 2);
  EXPECT_EQ(run_cli("run " + kScenarios + "/cylinder-all-checks.json --format xml"), 2);
  EXPECT_EQ(run_cli("suite random-torus --count 1 --seed 1"), 2);
}

TEST(Cli, ExitCodeContract) {
  RunReport r;
  EXPECT_EQ(r.exit_code(), kAllPass);
  Entry bad;
  bad.check_id = "riccati";
  bad.report.verdict = Verdict::Violated;
  r.entries.push_back(bad);
  EXPECT_EQ(r.exit_code(), kViolation);
  Entry broken;
  broken.check_id = "riccati";
  broken.error = "instance rejected";
  r.entries.push_back(broken);
  EXPECT_EQ(r.exit_code(), kConfigError);
  r.errors_are_fatal = false;
  EXPECT_EQ(r.exit_code(), kViolation);
}

TEST(Cli, WritesReportsToTheOutputDirectory) {
  const auto dir = scratch_dir("out");
  EXPECT_EQ(run_cli("run " + kScenarios + "/equality-model-N5-eps05.json --out " + dir.string() + " --format csv"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));
  const auto j = Json::parse(slurp((dir / "report.json").string()));
  EXPECT_FALSE(validate_report_json(j).has_value());
  EXPECT_EQ(j.at("exit_code"), 0);
  std::filesystem::remove_all(dir);
}
