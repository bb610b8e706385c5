#ifndef FLK_CLI_HPP
#define FLK_CLI_HPP

#include <string>
#include <vector>

#include "json.hpp"

// Scenario-driven front end: loads JSON scenario descriptions, dispatches to
// the verification drivers, and serializes deterministic reports.

namespace flk {

struct Scenario {
  std::string name;
  std::string verifier;  // barrier | mollifier | maxprinciple | bocher |
                         // poisson | compose | counterexamples | fraclap-eval
  nlohmann::ordered_json parameters;
  unsigned seed = 1;
};

// Parse a scenario JSON document from a file.  Throws on I/O or parse errors.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const nlohmann::ordered_json& doc);

struct Margin {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct Report {
  Scenario scenario;
  std::string verdict;  // pass | fail | inconclusive | invalid
  std::string diagnostic;
  std::vector<Margin> margins;
  std::vector<std::pair<std::string, double>> provenance;
  std::vector<std::pair<std::string, double>> timings;  // per-phase ms
};

// Dispatches to the named verifier.  Unknown verifiers or invalid parameters
// yield verdict "invalid" with a diagnostic (never throws).
Report run_scenario(const Scenario& s);

// Deterministic serialization.  Timings are excluded unless requested, so
// identical scenario + seed gives byte-identical output.
std::string report_json(const Report& r, bool include_timings = false);
std::string report_json(const std::vector<Report>& rs,
                        bool include_timings = false);
std::string report_csv(const Report& r);
std::string report_csv(const std::vector<Report>& rs);

// pass -> 0, fail -> 1, inconclusive -> 2, invalid -> 3
int report_exit_code(const Report& r);

const std::vector<std::string>& builtin_verifiers();

}  // namespace flk

#endif  // FLK_CLI_HPP
