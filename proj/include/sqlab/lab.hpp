#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqlab/extrapolate.hpp"
#include "sqlab/semigroup.hpp"
#include "sqlab/squarefn.hpp"

namespace sqlab::lab {

constexpr int kSchemaVersion = 1;
constexpr const char* kPanelVersion = "panel-v1";

enum class Mode { classical_1d, schrodinger_3d };

struct PotentialSpec {
  std::string kind = "zero";  // zero | constant | power
  double scale = 1.0;
  double exponent = 2.0;      // power: V = scale r^exponent
  std::optional<double> rh_q; // reverse Holder exponent; constant potentials default to infinity
};

struct GridSpec {
  double r_max = 20.0;
  std::size_t nodes = 512;
  double r_first = 1e-3;
};

struct EigenSpec {
  double r_max = 24.0;
  std::size_t points = 4096;
  std::size_t kmax = 600;
};

struct TimeSpec {
  double t0 = 1e-3;
  double t1 = 1e3;
  std::size_t count = 97;
};

struct BallSpecConfig {
  double d_min = 0.01, d_max = 5.0;
  std::size_t nd = 20;
  double R_min = 0.01, R_max = 10.0;
  std::size_t nR = 20;
  double reach = 20.0;
};

struct WeightFamilySpec {
  std::string kind = "shifted-power";  // power | shifted-power | near-extremal
  std::vector<double> params;
};

// One entry of the scenario's operator list. Fields unused by a probe keep their defaults.
struct ProbeSpec {
  std::string probe;  // weighted-norm | rdf | extrapolation | scaling | growth | cover | intrinsic-lp
  std::string id;
  // weighted-norm
  std::vector<std::string> ops;
  std::vector<double> p{2.0};
  double theta = 0.0;
  double alpha = 1.0;
  double lambda = 4.0;
  double mu = 0.0;
  std::string bound = "none";  // none | buckley | lemma2 | lemma10 | theorem1 | theorem2
  bool dual_test = false;
  std::vector<double> weight_params;  // overrides the scenario family's parameters when set
  // rdf
  double r = 3.0, r0 = 2.0;
  int K = 40;
  double safety = 1.5;
  double g_center = 1.0, g_width = 0.7;
  // extrapolation
  std::string op = "M";
  double p0 = 2.0, eta = 1.0, gamma = 0.0;
  // scaling
  std::vector<double> alphas{1.0, 2.0, 4.0, 8.0};
  double beta = 1.0;
  // growth
  std::vector<double> lambdas{1.0, 2.0, 4.0, 8.0, 16.0};
  // cover
  std::vector<double> sigmas{1.0, 2.0, 4.0, 8.0};
  double domain = 6.0;
  // intrinsic-lp
  std::size_t samples = 20;
  std::size_t draws = 10000;
};

struct Scenario {
  int schema = kSchemaVersion;
  std::string name;
  Mode mode = Mode::schrodinger_3d;
  std::uint64_t seed = 1;
  PotentialSpec potential;
  GridSpec grid;
  EigenSpec eigen;
  TimeSpec times;
  BallSpecConfig balls;
  WeightFamilySpec weights;
  std::vector<ProbeSpec> operators;
  std::string output;  // optional default output directory
};

struct ValidationError : std::runtime_error {
  std::vector<std::string> fields;
  explicit ValidationError(std::vector<std::string> f);
};

// Parses and validates; every offending field is listed in the thrown ValidationError.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);
std::string to_string(Mode m);

// --- panels

// five bumps of varying centre and width plus two oscillatory windows
std::vector<RadialProfile> test_panel(GridPtr grid);
std::vector<std::string> panel_labels();
// w^{-1/(p-1)} on the unit ball, zero outside (the extremal test function for power weights)
RadialProfile dual_indicator(const WeightProfile& w, double p);

// --- results

struct Row {
  double param = 0.0;
  double w_const = 0.0;
  std::string op;
  double ratio = 0.0;
};

struct Gate {
  std::string name;
  bool pass = true;
  double value = 0.0;
  std::string rule;
};

struct FitEntry {
  std::string op;
  double p = 0.0;
  FitResult fit;
  bool flagged = false;  // R^2 below 0.9
  double predicted = 0.0;
};

struct ProbeResult {
  std::string id;
  std::string probe;
  std::vector<Row> rows;
  std::vector<FitEntry> fits;
  std::vector<Gate> gates;
  std::vector<std::string> warnings;
  nlohmann::json details = nlohmann::json::object();
  std::map<std::string, std::vector<std::array<double, 2>>> plots;  // log10 points
  bool passed() const;
};

// fit of log y on log x; throws std::domain_error on fewer than 4 rows or non-positive entries
FitResult fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

// --- execution

// Built state shared by the probes of one scenario.
struct Context {
  Scenario sc;
  int dim = 3;
  GridPtr grid;
  RadialProfile V;
  CriticalRadius rho;
  std::optional<EigenSystem> sys;
  TimeGrid times;
  BallFamily balls;
  std::vector<RadialProfile> panel;
  std::string cache_note;
  Exec exec = Exec::parallel;
};

// k0 of the first theorem's lambda range; needs the doubling constant of V dx
double theorem1_k0(const Context& ctx);
double theorem1_lambda_min(const Context& ctx, double theta);
double theorem2_lambda_min(const Context& ctx, double theta);

// Eigensystems are cached under cache_dir by a hash of (potential, r_max, points, kmax).
Context build_context(const Scenario& sc, const std::string& cache_dir);

ProbeResult run_probe(const Context& ctx, const ProbeSpec& spec);

struct RunOutcome {
  nlohmann::json report;
  std::vector<ProbeResult> probes;
  bool gates_passed = true;
};

RunOutcome run_scenario(const Scenario& sc, const std::string& cache_dir);
// writes report.json, rows.csv and plotdata/<probe>.csv under dir
void write_outputs(const RunOutcome& out, const std::string& dir);

std::string content_hash(const std::string& s);
void save_eigensystem(const EigenSystem& sys, const std::string& path);
std::optional<EigenSystem> load_eigensystem(const std::string& path);

// names of the shipped scenarios and their file paths
std::vector<std::pair<std::string, std::string>> shipped_scenarios();

}  // namespace sqlab::lab
