#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "flk/cli.hpp"

using namespace flk;
using nlohmann::ordered_json;

TEST_CASE("scenario parsing and validation") {
  ordered_json doc = {{"name", "demo"},
                      {"verifier", "counterexamples"},
                      {"seed", 9},
                      {"parameters", {{"foo", 1}}}};
  Scenario s = parse_scenario(doc);
  CHECK(s.name == "demo");
  CHECK(s.verifier == "counterexamples");
  CHECK(s.seed == 9);
  CHECK(s.parameters.at("foo") == 1);
  ordered_json missing = {{"name", "x"}};
  CHECK_THROWS(parse_scenario(missing));
  CHECK_THROWS(load_scenario("/nonexistent/scenario.json"));
}

TEST_CASE("unknown verifier yields invalid, exit code 3") {
  Scenario s;
  s.name = "bogus";
  s.verifier = "no-such-verifier";
  Report r = run_scenario(s);
  CHECK(r.verdict == "invalid");
  CHECK(report_exit_code(r) == 3);
  CHECK(r.diagnostic.find("unknown verifier") != std::string::npos);
}

TEST_CASE("builtin verifier registry") {
  const auto& v = builtin_verifiers();
  for (const char* name :
       {"barrier", "mollifier", "maxprinciple", "bocher", "poisson",
        "compose", "counterexamples", "fraclap-eval"}) {
    CHECK(std::find(v.begin(), v.end(), name) != v.end());
  }
}

TEST_CASE("counterexamples scenario passes and serializes deterministically") {
  Scenario s;
  s.name = "ce";
  s.verifier = "counterexamples";
  s.seed = 1;
  Report r1 = run_scenario(s);
  Report r2 = run_scenario(s);
  CHECK(r1.verdict == "pass");
  CHECK(report_exit_code(r1) == 0);
  std::string j1 = report_json(r1);
  std::string j2 = report_json(r2);
  CHECK(j1 == j2);  // timings excluded by default -> byte identical
  CHECK(j1.find("\r") == std::string::npos);  // LF-only JSON
  // timings only appear when requested
  CHECK(j1.find("timings") == std::string::npos);
  CHECK(report_json(r1, true).find("timings") != std::string::npos);
}

TEST_CASE("CSV output is RFC 4180 shaped") {
  Scenario s;
  s.name = "needs,quoting";
  s.verifier = "counterexamples";
  Report r = run_scenario(s);
  std::string csv = report_csv(r);
  CHECK(csv.rfind("scenario,label,value,tolerance,pass\r\n", 0) == 0);
  // every record ends with CRLF
  size_t lf = 0;
  for (size_t i = 0; i + 1 < csv.size(); ++i)
    if (csv[i] == '\n' && csv[i - 1] != '\r') ++lf;
  CHECK(lf == 0);
  // the comma-bearing scenario name is quoted
  CHECK(csv.find("\"needs,quoting\"") != std::string::npos);
}

TEST_CASE("invalid parameters are reported, not thrown") {
  Scenario s;
  s.name = "bad-param";
  s.verifier = "fraclap-eval";
  s.parameters = {{"s", 1.7}};  // fractional order outside (0,1)
  Report r = run_scenario(s);
  CHECK(r.verdict == "invalid");
  CHECK(report_exit_code(r) == 3);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("fraclap-eval scenario on a builtin field") {
  Scenario s;
  s.name = "eval";
  s.verifier = "fraclap-eval";
  s.parameters = {{"field", "bump"}, {"point", {0.0, 0.0}}, {"s", 0.5}};
  Report r = run_scenario(s);
  CHECK(r.verdict == "pass");
  CHECK_FALSE(r.margins.empty());
}
