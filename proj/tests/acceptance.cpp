// Acceptance suite: runs every bundled scenario and prints one pass/fail line
// per criterion.  Criterion 11 (deterministic byte-identical reruns) re-runs
// each scenario and compares the serialized reports.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "flk/cli.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <scenarios-dir>\n");
    return 2;
  }
  std::string dir = argv[1];
  const std::vector<std::pair<std::string, std::string>> criteria = {
      {"ac-01", "ac-01-fundamental.json"},
      {"ac-02", "ac-02-dual-method.json"},
      {"ac-03", "ac-03-poisson.json"},
      {"ac-04", "ac-04-barrier-classical.json"},
      {"ac-05", "ac-05-barrier-fractional.json"},
      {"ac-06", "ac-06-commutator.json"},
      {"ac-07", "ac-07-compose.json"},
      {"ac-08", "ac-08-maxprinciple.json"},
      {"ac-09", "ac-09-bocher.json"},
      {"ac-10", "ac-10-counterexamples.json"},
  };

  int failures = 0;
  bool deterministic = true;
  std::string det_detail;
  for (const auto& [id, file] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
      flk::Scenario s = flk::load_scenario(dir + "/" + file);
      flk::Report r1 = flk::run_scenario(s);
      ok = r1.verdict == "pass";
      if (!ok) note = " verdict=" + r1.verdict + " " + r1.diagnostic;
      // criterion 11: identical scenario + seed must serialize byte-identically
      flk::Report r2 = flk::run_scenario(s);
      if (flk::report_json(r1) != flk::report_json(r2) ||
          flk::report_csv(r1) != flk::report_csv(r2)) {
        deterministic = false;
        det_detail += " " + id;
      }
    } catch (const std::exception& e) {
      note = std::string(" exception: ") + e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
            .count() /
        1000.0;
    std::printf("%s %s (%.1fs)%s\n", id.c_str(), ok ? "PASS" : "FAIL", secs,
                note.c_str());
    if (!ok) ++failures;
  }
  std::printf("ac-11 %s%s\n", deterministic ? "PASS" : "FAIL",
              deterministic ? "" : det_detail.c_str());
  if (!deterministic) ++failures;
  return failures == 0 ? 0 : 1;
}
