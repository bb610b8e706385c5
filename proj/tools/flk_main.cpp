#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "flk/cli.hpp"
#include "flk/distrib.hpp"
#include "flk/fraclap.hpp"
#include "flk/potentials.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::vector<std::string>& files, const std::string& format,
            const std::string& out_path, int parallel, bool timings,
            bool has_s, double s_override, bool has_M, double M_override,
            bool has_grid, int grid_override, bool has_seed,
            unsigned seed_override) {
  std::vector<flk::Scenario> scenarios;
  for (const std::string& f : files) {
    try {
      flk::Scenario sc = flk::load_scenario(f);
      if (has_s) sc.parameters["s"] = s_override;
      if (has_M) sc.parameters["M"] = M_override;
      if (has_grid) sc.parameters["grid_points"] = grid_override;
      if (has_seed) sc.seed = seed_override;
      scenarios.push_back(std::move(sc));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
  }

  std::vector<flk::Report> reports(scenarios.size());
  if (parallel > 1 && scenarios.size() > 1) {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= scenarios.size()) return;
        reports[i] = flk::run_scenario(scenarios[i]);
      }
    };
    std::vector<std::thread> pool;
    int nw = std::min<int>(parallel, (int)scenarios.size());
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  } else {
    for (size_t i = 0; i < scenarios.size(); ++i)
      reports[i] = flk::run_scenario(scenarios[i]);
  }

  std::string body;
  if (format == "csv")
    body = reports.size() == 1 ? flk::report_csv(reports[0])
                               : flk::report_csv(reports);
  else
    body = reports.size() == 1 ? flk::report_json(reports[0], timings)
                               : flk::report_json(reports, timings);

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write report to " << out_path << "\n";
      return 3;
    }
    out << body;
  } else {
    std::cout << body;
  }

  int code = 0;
  for (const flk::Report& r : reports)
    code = std::max(code, flk::report_exit_code(r));
  return code;
}

int cmd_list(const std::string& dir) {
  std::cout << "verifiers:\n";
  for (const std::string& v : flk::builtin_verifiers())
    std::cout << "  " << v << "\n";
  if (fs::is_directory(dir)) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") names.push_back(e.path().string());
    std::sort(names.begin(), names.end());
    std::cout << "scenarios (" << dir << "):\n";
    for (const std::string& n : names) std::cout << "  " << n << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& field, const std::string& point_str,
             double s) {
  std::vector<double> coords;
  std::string tok;
  for (char c : point_str + ",") {
    if (c == ',') {
      if (!tok.empty()) coords.push_back(std::stod(tok));
      tok.clear();
    } else {
      tok += c;
    }
  }
  if (coords.empty() || coords.size() > 3) {
    std::cerr << "error: --point needs 1 to 3 comma-separated coordinates\n";
    return 3;
  }
  flk::Scenario sc;
  sc.name = "eval";
  sc.verifier = "fraclap-eval";
  sc.parameters["mode"] = "point";
  sc.parameters["field"] = field;
  sc.parameters["n"] = (int)coords.size();
  sc.parameters["s"] = s;
  sc.parameters["point"] = coords;
  flk::Report r = flk::run_scenario(sc);
  std::cout << flk::report_json(r);
  return flk::report_exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flk: numerical verification toolkit for the fractional "
               "Laplacian and drift-perturbed operators"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run scenario files");
  std::vector<std::string> files;
  std::string format = "json", out_path;
  int parallel = 1;
  bool timings = false;
  double s_override = 0.0, M_override = 0.0;
  int grid_override = 0;
  unsigned seed_override = 0;
  run->add_option("scenarios", files, "Scenario JSON files")->required();
  run->add_option("--report-format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", out_path, "Write the report to this path");
  run->add_option("--parallel", parallel,
                  "Run independent scenarios over N workers");
  run->add_flag("--timings", timings, "Include per-phase timings (breaks "
                                      "byte-identical reruns)");
  auto* so = run->add_option("--frac-order", s_override,
                             "Override the fractional order s");
  auto* mo = run->add_option("--coeff-bound", M_override,
                             "Override the coefficient bound M");
  auto* go = run->add_option("--grid-points", grid_override,
                             "Override the verification grid size");
  auto* seedo = run->add_option("--seed", seed_override,
                                "Override the scenario seed");

  // list
  auto* list = app.add_subcommand("list", "List verifiers and scenarios");
  std::string dir = "scenarios";
  list->add_option("--scenario-dir", dir, "Scenario directory to list");

  // eval
  auto* ev = app.add_subcommand("eval",
                                "Evaluate (-Delta)^s of a builtin field");
  std::string field = "bump", point_str = "0.25,0";
  double s_val = 0.5;
  ev->add_option("--field", field,
                 "constant | bump | gaussian | fundamental");
  ev->add_option("--point", point_str, "Comma-separated coordinates");
  ev->add_option("--frac-order", s_val, "Fractional order s in (0,1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (run->parsed())
      return cmd_run(files, format, out_path, parallel, timings,
                     so->count() > 0, s_override, mo->count() > 0, M_override,
                     go->count() > 0, grid_override, seedo->count() > 0,
                     seed_override);
    if (list->parsed()) return cmd_list(dir);
    if (ev->parsed()) return cmd_eval(field, point_str, s_val);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
