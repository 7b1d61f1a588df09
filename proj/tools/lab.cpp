#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

#include "sqlab/lab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitGate = 3;

std::string cache_dir() {
  const char* env = std::getenv("SQLAB_CACHE");
  return env ? env : ".sqlab-cache";
}

int report_validation(const sqlab::lab::ValidationError& e) {
  std::cerr << "validation failed:\n";
  for (const auto& f : e.fields) std::cerr << "  " << f << "\n";
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sqlab::lab;
  CLI::App app{"radial Schrodinger square-function lab"};
  app.require_subcommand(1);

  std::string config, out;
  int threads = 0;
  long long seed = -1;

  auto* run = app.add_subcommand("run", "run a scenario and write report.json, rows.csv and plotdata/");
  run->add_option("--config", config, "scenario JSON")->required();
  run->add_option("--out", out, "output directory (defaults to the scenario's output field)");
  run->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "overrides the scenario seed")->check(CLI::NonNegativeNumber);

  auto* validate = app.add_subcommand("validate", "parse and validate a scenario");
  validate->add_option("--config", config, "scenario JSON")->required();

  auto* list = app.add_subcommand("list-scenarios", "list the shipped scenarios");

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& [name, path] : shipped_scenarios()) std::cout << name << "\t" << path << "\n";
    return kExitOk;
  }

  Scenario sc;
  try {
    sc = load_scenario(config);
  } catch (const ValidationError& e) {
    return report_validation(e);
  }
  if (*validate) {
    std::cout << "ok: " << sc.name << " (" << sc.operators.size() << " probes)\n";
    return kExitOk;
  }

  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
  if (out.empty()) out = sc.output;
  if (out.empty()) {
    std::cerr << "validation failed:\n  out: no output directory given\n";
    return kExitValidation;
  }
  if (threads > 0) omp_set_num_threads(threads);

  RunOutcome res;
  try {
    res = run_scenario(sc, cache_dir());
  } catch (const ValidationError& e) {
    return report_validation(e);
  } catch (const std::domain_error& e) {
    std::cerr << "validation failed:\n  " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
  try {
    write_outputs(res, out);
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << "\n";
    return 1;
  }
  for (const auto& p : res.probes) {
    for (const auto& g : p.gates)
      std::cout << (g.pass ? "PASS " : "FAIL ") << p.id << ": " << g.name << " (value " << g.value << ")\n";
    for (const auto& w : p.warnings) std::cout << "warn " << p.id << ": " << w << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return res.gates_passed ? kExitOk : kExitGate;
}
