#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qklab/expression.hpp"
#include "qklab/scenario.hpp"

using namespace qklab;
using json = nlohmann::json;

namespace {

const std::filesystem::path kScenarios = QKLAB_SCENARIO_DIR;
const std::filesystem::path kData = QKLAB_TEST_DATA;

std::vector<std::string> xy{"x", "y"};

Jet2 eval(const std::string& text, double x, double y) { return parse_expression(text, xy)(ChartPoint{x, y}); }

int run_cli(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = std::string(QKLAB_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qklab_cli_" + std::to_string(::getpid()) + "_" + name);
}

json minimal_n8(double lambda) {
  return json::parse(R"({
    "name": "tmp", "base": {"type": "flat", "n": 1},
    "model": {"type": "bundle", "which": "N"},
    "sampling": {"count": 5, "seed": 3},
    "checks": [{"type": "closed_4form"}, {"type": "einstein"}]
  })")
      .patch(json::array({{{"op", "add"}, {"path", "/checks/1/lambda"}, {"value", lambda}}}));
}

const CheckRow& row(const Report& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  throw std::runtime_error("no row " + name);
}

}  // namespace

// -- expressions ----------------------------------------------------------------------------------

TEST(Expression, ArithmeticAndPrecedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2*3", 0, 0).value(), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2)*3", 0, 0).value(), 9.0);
  EXPECT_DOUBLE_EQ(eval("2^3^2", 0, 0).value(), 512.0);
  EXPECT_DOUBLE_EQ(eval("-x^2", 3, 0).value(), -9.0);
  EXPECT_DOUBLE_EQ(eval("2^-1", 0, 0).value(), 0.5);
  EXPECT_DOUBLE_EQ(eval("8/4/2", 0, 0).value(), 1.0);
  EXPECT_DOUBLE_EQ(eval("1.5e1 - x", 5, 0).value(), 10.0);
  EXPECT_DOUBLE_EQ(eval("pi", 0, 0).value(), M_PI);
  EXPECT_DOUBLE_EQ(eval("e", 0, 0).value(), M_E);
}

TEST(Expression, DerivativesMatchAnalyticForms) {
  const double x = 0.7, y = -0.3;
  const Jet2 f = eval("sin(x)*exp(y) + pow(x, 3) - ln(x)*tanh(y)", x, y);
  EXPECT_NEAR(f.value(), std::sin(x) * std::exp(y) + x * x * x - std::log(x) * std::tanh(y), 1e-15);
  EXPECT_NEAR(f.grad(0), std::cos(x) * std::exp(y) + 3 * x * x - std::tanh(y) / x, 1e-14);
  const double sech2 = 1.0 / (std::cosh(y) * std::cosh(y));
  EXPECT_NEAR(f.grad(1), std::sin(x) * std::exp(y) - std::log(x) * sech2, 1e-14);
  EXPECT_NEAR(f.hess(0, 0), -std::sin(x) * std::exp(y) + 6 * x + std::tanh(y) / (x * x), 1e-13);
  EXPECT_NEAR(f.hess(0, 1), std::cos(x) * std::exp(y) - sech2 / x, 1e-13);
}

TEST(Expression, AllFunctionsEvaluate) {
  const double x = 0.4;
  EXPECT_NEAR(eval("sqrt(x)", x, 0).value(), std::sqrt(x), 1e-15);
  EXPECT_NEAR(eval("cos(x) + tan(x)", x, 0).value(), std::cos(x) + std::tan(x), 1e-15);
  EXPECT_NEAR(eval("sinh(x) + cosh(x)", x, 0).value(), std::exp(x), 1e-15);
  EXPECT_NEAR(eval("atan(x)", x, 0).value(), std::atan(x), 1e-15);
  EXPECT_NEAR(eval("log(x)", x, 0).value(), std::log(x), 1e-15);
  EXPECT_NEAR(eval("x^y", x, 1.5).value(), std::pow(x, 1.5), 1e-15);
}

TEST(Expression, ErrorsCarryOffsets) {
  try {
    parse_expression("x + * y", xy);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  EXPECT_THROW(parse_expression("z", xy), ParseError);
  EXPECT_THROW(parse_expression("foo(x)", xy), ParseError);
  EXPECT_THROW(parse_expression("(x", xy), ParseError);
  EXPECT_THROW(parse_expression("x y", xy), ParseError);
  EXPECT_THROW(parse_expression("", xy), ParseError);
  EXPECT_THROW(parse_expression("pow(x)", xy), ParseError);
}

TEST(Expression, DomainErrorsSurfaceAtEvaluation) {
  const ScalarField f = parse_expression("log(x)", xy);
  EXPECT_THROW(f(ChartPoint{-1.0, 0.0}), EvaluationError);
}

// -- scenario runner ------------------------------------------------------------------------------

TEST(Scenario, BundledN8Passes) {
  const Report r = run_scenario_file(kScenarios / "n8_flat_qk.json");
  EXPECT_TRUE(r.all_passed);
  EXPECT_EQ(r.seed, 1u);
  EXPECT_EQ(r.samples, 100);
  for (const auto& c : r.checks) EXPECT_EQ(c.status, "pass") << c.name;
}

TEST(Scenario, WrongLambdaFailsOnlyEinstein) {
  const Report r = run_scenario(minimal_n8(-15.0));
  EXPECT_FALSE(r.all_passed);
  EXPECT_EQ(row(r, "closed_4form").status, "pass");
  EXPECT_EQ(row(r, "einstein").status, "fail");
  EXPECT_GT(row(r, "einstein").max_residual, 0.5);
  EXPECT_EQ(row(r, "einstein").worst_point.size(), 8u);
}

TEST(Scenario, StatusMatchesTolerance) {
  for (const auto& c : run_scenario(minimal_n8(-16.0)).checks)
    EXPECT_EQ(c.status == "pass", c.max_residual <= c.tolerance) << c.name;
}

TEST(Scenario, DefaultTolerances) {
  const Report r = run_scenario(minimal_n8(-16.0));
  EXPECT_EQ(row(r, "closed_4form").tolerance, 1e-8);
  EXPECT_EQ(row(r, "einstein").tolerance, 1e-7);
  EXPECT_EQ(default_tolerance("einstein"), 1e-7);
  EXPECT_EQ(default_tolerance("moment_map"), 1e-8);
}

TEST(Scenario, ToleranceOverridesOrder) {
  json doc = minimal_n8(-16.0);
  doc["tolerances"] = {{"einstein", 1e-3}};
  EXPECT_EQ(row(run_scenario(doc), "einstein").tolerance, 1e-3);
  doc["checks"][1]["tolerance"] = 1e-4;
  EXPECT_EQ(row(run_scenario(doc), "einstein").tolerance, 1e-4);
  RunOptions opt;
  opt.tolerances["einstein"] = 1e-30;
  const Report r = run_scenario(doc, opt);
  EXPECT_EQ(row(r, "einstein").tolerance, 1e-30);
  EXPECT_EQ(row(r, "einstein").status, "fail");
}

TEST(Scenario, SeedAndSamplesOverride) {
  RunOptions opt;
  opt.seed = 99;
  opt.samples = 2;
  const Report r = run_scenario(minimal_n8(-16.0), opt);
  EXPECT_EQ(r.seed, 99u);
  EXPECT_EQ(r.samples, 2);
}

TEST(Scenario, DeterministicBody) {
  const json a = report_to_json(run_scenario(minimal_n8(-16.0)));
  const json b = report_to_json(run_scenario(minimal_n8(-16.0)));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_FALSE(a.contains("timing"));
  for (const char* key : {"scenario", "seed", "checks", "all_passed"}) EXPECT_TRUE(a.contains(key)) << key;
  for (const auto& c : a.at("checks"))
    for (const char* key : {"name", "status", "max_residual", "tolerance"}) EXPECT_TRUE(c.contains(key)) << key;
  RunOptions opt;
  opt.seed = 4;
  EXPECT_NE(report_to_json(run_scenario(minimal_n8(-16.0), opt)).at("checks").dump(), a.at("checks").dump());
}

TEST(Scenario, EvaluationErrorMarksRowAndContinues) {
  const json doc = json::parse(R"({
    "name": "neg_t", "base": {"type": "flat", "n": 1, "torus": true},
    "model": {"type": "special", "which": "as_G2_L7"},
    "sampling": {"count": 3, "seed": 1},
    "checks": [
      {"type": "einstein", "name": "bad", "lambda": 0, "box": {"t": [-1.0, -0.5]}},
      {"type": "einstein", "name": "good", "lambda": 0}
    ]
  })");
  const Report r = run_scenario(doc);
  EXPECT_EQ(row(r, "bad").status, "error");
  EXPECT_FALSE(row(r, "bad").detail.empty());
  EXPECT_EQ(row(r, "good").status, "pass");
  EXPECT_FALSE(r.all_passed);
}

TEST(Scenario, ConfigErrorsNameTheirLocation) {
  const auto where = [](const json& doc) {
    try {
      run_scenario(doc);
    } catch (const ScenarioError& e) {
      return e.where();
    }
    return std::string("none");
  };
  json doc = minimal_n8(-16.0);
  doc["checks"][0]["form"] = "omega9";
  EXPECT_EQ(where(doc), "checks[0].form");
  doc = minimal_n8(-16.0);
  doc["checks"][1]["type"] = "einsteen";
  EXPECT_EQ(where(doc), "checks[1].type");
  doc = minimal_n8(-16.0);
  doc["base"]["colour"] = 1;
  EXPECT_EQ(where(doc), "base.colour");
  doc = minimal_n8(-16.0);
  doc["model"]["profiles"] = {{"p", "exp(t"}};
  EXPECT_EQ(where(doc), "model.profiles.p");
  doc = minimal_n8(-16.0);
  doc.erase("checks");
  EXPECT_EQ(where(doc), "checks");
  doc = minimal_n8(-16.0);
  doc["checks"].push_back({{"type", "einstein"}, {"lambda", -16}});
  EXPECT_EQ(where(doc), "checks[2]");
  doc = minimal_n8(-16.0);
  doc["checks"].push_back({{"type", "moment_map"}});
  EXPECT_EQ(where(doc), "checks[2]");
}

TEST(Scenario, GibbonsHawkingFromExpressions) {
  const json doc = json::parse(R"({
    "name": "gh", "base": {"type": "gibbons_hawking", "V": "2 + u1", "theta": {"y": "1", "u2": "u3"}},
    "model": {"type": "none"},
    "sampling": {"count": 5, "seed": 1},
    "checks": [{"type": "hk_invariants"}]
  })");
  EXPECT_TRUE(run_scenario(doc).all_passed);
  json bad = doc;
  bad["base"]["V"] = "u1*u1 + 1";
  EXPECT_THROW(run_scenario(bad), ScenarioError);
}

TEST(Scenario, ListAndResolve) {
  const auto names = list_scenarios(kScenarios);
  for (const char* n : {"n8_flat_qk", "g2_as_ricci_flat", "hkqk_roundtrip_example1"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  EXPECT_EQ(resolve_scenario("n8_flat_qk", kScenarios), kScenarios / "n8_flat_qk.json");
  EXPECT_THROW(resolve_scenario("no_such_thing", kScenarios), ScenarioError);
}

TEST(Scenario, MalformedFileReportsLineAndColumn) {
  try {
    run_scenario_file(kData / "malformed.json");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(e.where().find("malformed.json:5:"), std::string::npos) << e.where();
  }
}

// -- the executable -------------------------------------------------------------------------------

TEST(Cli, BundledScenarioExitsZero) { EXPECT_EQ(run_cli("run n8_flat_qk --quiet"), 0); }

TEST(Cli, WrongLambdaExitsOne) { EXPECT_EQ(run_cli("run " + (kData / "n8_wrong_lambda.json").string()), 1); }

TEST(Cli, MalformedConfigExitsTwo) {
  const auto log = temp("malformed.log");
  EXPECT_EQ(run_cli("run " + (kData / "malformed.json").string(), log.string()), 2);
  EXPECT_NE(slurp(log).find("malformed.json:5:"), std::string::npos);
  std::filesystem::remove(log);
}

TEST(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(run_cli("run n8_flat_qk --tolerance einstein"), 2);
  EXPECT_EQ(run_cli("run no_such_scenario"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
}

TEST(Cli, ToleranceOverrideFlipsStatus) { EXPECT_EQ(run_cli("run n8_flat_qk --quiet --samples 2 --tolerance einstein=1e-30"), 1); }

TEST(Cli, ListPrintsCatalogue) {
  const auto log = temp("list.log");
  EXPECT_EQ(run_cli("list", log.string()), 0);
  const std::string out = slurp(log);
  for (const char* n : {"n8_flat_qk", "g2_as_ricci_flat", "hkqk_roundtrip_example1"})
    EXPECT_NE(out.find(n), std::string::npos) << n;
  std::filesystem::remove(log);
}

TEST(Cli, ReportFileIsDeterministic) {
  const auto a = temp("a.json"), b = temp("b.json");
  EXPECT_EQ(run_cli("run n8_flat_qk --quiet --samples 5 --out " + a.string()), 0);
  EXPECT_EQ(run_cli("run n8_flat_qk --quiet --samples 5 --out " + b.string()), 0);
  json ja = json::parse(slurp(a)), jb = json::parse(slurp(b));
  EXPECT_TRUE(ja.contains("timing"));
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(ja.at("scenario"), "n8_flat_qk");
  EXPECT_EQ(ja.at("all_passed"), true);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}
