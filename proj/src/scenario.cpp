#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sqlab/lab.hpp"

#ifndef SQLAB_SCENARIO_DIR
#define SQLAB_SCENARIO_DIR "scenarios"
#endif

namespace sqlab::lab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kCacheMagic = 0x53514c4142454947ull;  // "SQLABEIG"

std::string canonical_eigen_key(const Scenario& sc) {
  std::ostringstream s;
  s << std::setprecision(17) << "potential=" << sc.potential.kind;
  if (sc.potential.kind != "zero") s << ",scale=" << sc.potential.scale;
  if (sc.potential.kind == "power") s << ",exponent=" << sc.potential.exponent;
  s << ";grid=" << sc.grid.r_max << "," << sc.grid.nodes << "," << sc.grid.r_first;
  s << ";eigen=" << sc.eigen.r_max << "," << sc.eigen.points << "," << sc.eigen.kmax;
  return s.str();
}

RadialProfile make_potential(const PotentialSpec& ps, GridPtr grid) {
  if (ps.kind == "zero") return RadialProfile::zeros(grid);
  if (ps.kind == "constant") {
    auto V = RadialProfile::sample(grid, [&](double) { return ps.scale; });
    V.tail = Extension::constant;
    return V;
  }
  auto V = RadialProfile::sample(grid, [&](double r) { return ps.scale * std::pow(r, ps.exponent); });
  V.tail = Extension::power;
  V.tail_exponent = ps.exponent;
  V.head_exponent = ps.exponent;
  return V;
}

bool scenario_needs_eigensystem(const Scenario& sc) {
  for (const auto& p : sc.operators) {
    if (p.probe == "weighted-norm")
      for (const auto& op : p.ops)
        if (op == "g_L" || op == "S_L" || op == "gstar_L" || op == "stilde_L") return true;
    if (p.probe == "extrapolation" && (p.op == "g_L" || p.op == "S_L" || p.op == "gstar_L" || p.op == "stilde_L"))
      return true;
  }
  return false;
}

template <class T>
void put(std::ostream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
bool take(std::istream& in, T& v) {
  return bool(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}
void put_vec(std::ostream& o, const std::vector<double>& v) {
  put<std::uint64_t>(o, v.size());
  o.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(double)));
}
bool take_vec(std::istream& in, std::vector<double>& v) {
  std::uint64_t n = 0;
  if (!take(in, n) || n > (1ull << 32)) return false;
  v.resize(n);
  return bool(in.read(reinterpret_cast<char*>(v.data()), std::streamsize(n * sizeof(double))));
}

json gate_json(const Gate& g) {
  return {{"name", g.name}, {"pass", g.pass}, {"value", std::isfinite(g.value) ? json(g.value) : json(nullptr)},
          {"rule", g.rule}};
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json probe_json(const ProbeResult& r) {
  json rows = json::array(), fits = json::array(), gates = json::array();
  for (const auto& x : r.rows) rows.push_back({{"param", num(x.param)}, {"w_const", num(x.w_const)}, {"op", x.op}, {"ratio", num(x.ratio)}});
  for (const auto& f : r.fits) {
    json j{{"op", f.op}, {"p", num(f.p)}, {"intercept", num(f.fit.intercept)}, {"r2", num(f.fit.r2)},
           {"points", f.fit.points}, {"flagged", f.flagged}, {"predicted", num(f.predicted)}};
    // the slope is reported only for trustworthy fits; flagged ones keep it under its own key
    j[f.flagged ? "slope_flagged" : "slope"] = num(f.fit.slope);
    fits.push_back(j);
  }
  for (const auto& g : r.gates) gates.push_back(gate_json(g));
  return {{"id", r.id}, {"probe", r.probe}, {"passed", r.passed()}, {"gates", gates}, {"fits", fits},
          {"rows", rows}, {"warnings", r.warnings}, {"details", r.details}};
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

}  // namespace

std::string content_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << h;
  return o.str();
}

void save_eigensystem(const EigenSystem& sys, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write eigensystem cache " + tmp);
    put(o, kCacheMagic);
    put(o, sys.r_max);
    put(o, sys.h);
    put_vec(o, sys.r);
    put_vec(o, sys.potential);
    put_vec(o, sys.lambda);
    put_vec(o, sys.raw_lambda);
    put_vec(o, sys.vectors);
    put<std::uint64_t>(o, sys.potential_tag.size());
    o.write(sys.potential_tag.data(), std::streamsize(sys.potential_tag.size()));
  }
  fs::rename(tmp, path);
}

std::optional<EigenSystem> load_eigensystem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  EigenSystem sys;
  std::uint64_t magic = 0, n = 0;
  if (!take(in, magic) || magic != kCacheMagic) return std::nullopt;
  if (!take(in, sys.r_max) || !take(in, sys.h)) return std::nullopt;
  if (!take_vec(in, sys.r) || !take_vec(in, sys.potential) || !take_vec(in, sys.lambda) ||
      !take_vec(in, sys.raw_lambda) || !take_vec(in, sys.vectors))
    return std::nullopt;
  if (!take(in, n) || n > 4096) return std::nullopt;
  sys.potential_tag.resize(n);
  if (!in.read(sys.potential_tag.data(), std::streamsize(n))) return std::nullopt;
  if (sys.vectors.size() != sys.r.size() * sys.lambda.size()) return std::nullopt;
  return sys;
}

Context build_context(const Scenario& sc, const std::string& cache_dir) {
  Context ctx;
  ctx.sc = sc;
  ctx.dim = sc.mode == Mode::classical_1d ? 1 : 3;
  ctx.grid = make_grid(RadialGrid::geometric(ctx.dim, sc.grid.r_max, sc.grid.nodes, sc.grid.r_first));
  ctx.V = make_potential(sc.potential, ctx.grid);
  ctx.rho = sc.potential.kind == "zero" ? CriticalRadius::infinite(ctx.grid) : critical_radius_profile(ctx.V);
  ctx.times = TimeGrid::log_spaced(sc.times.t0, sc.times.t1, sc.times.count);
  const auto& b = sc.balls;
  ctx.balls = BallFamily::tensor(b.d_min, b.d_max, b.nd, b.R_min, b.R_max, b.nR, b.reach);
  ctx.panel = test_panel(ctx.grid);
  if (scenario_needs_eigensystem(sc)) {
    const std::string key = canonical_eigen_key(sc);
    const std::string name = "eig-" + content_hash(key) + ".bin";
    fs::path file;
    if (!cache_dir.empty()) {
      fs::create_directories(cache_dir);
      file = fs::path(cache_dir) / name;
      if (auto sys = load_eigensystem(file.string())) {
        ctx.sys = std::move(*sys);
        ctx.cache_note = "eigensystem loaded from " + file.string();
      }
    }
    if (!ctx.sys) {
      ctx.sys = build_eigensystem(ctx.V, sc.eigen.r_max, sc.eigen.points, sc.eigen.kmax);
      ctx.cache_note = "eigensystem built";
      if (!file.empty()) {
        save_eigensystem(*ctx.sys, file.string());
        ctx.cache_note += " and stored at " + file.string();
      }
    }
  }
  return ctx;
}

RunOutcome run_scenario(const Scenario& sc, const std::string& cache_dir) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  const Context ctx = build_context(sc, cache_dir);
  for (const auto& spec : sc.operators) {
    out.probes.push_back(run_probe(ctx, spec));
    out.gates_passed &= out.probes.back().passed();
  }
  json probes = json::array();
  for (const auto& p : out.probes) probes.push_back(probe_json(p));
  json desc{{"grid", ctx.grid->describe()},
            {"balls", ctx.balls.describe()},
            {"times", ctx.times.describe()},
            {"critical_radius", ctx.rho.is_infinite() ? json("infinite")
                                                      : json{{"min", ctx.rho.min()}, {"max", ctx.rho.max()}}}};
  if (ctx.sys) desc["eigensystem"] = ctx.sys->describe();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out.report = json{{"schema", kSchemaVersion},
                    {"scenario", to_json(sc)},
                    {"panel", {{"version", kPanelVersion}, {"functions", panel_labels()}}},
                    {"descriptors", desc},
                    {"probes", probes},
                    {"gates_passed", out.gates_passed},
                    // everything under "run" varies between identical runs
                    {"run", {{"timestamp", stamp}, {"seconds", seconds}, {"cache", ctx.cache_note}}}};
  return out;
}

void write_outputs(const RunOutcome& out, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "plotdata");
  std::ofstream(fs::path(dir) / "report.json") << out.report.dump(2) << "\n";
  std::ofstream rows(fs::path(dir) / "rows.csv");
  rows << "param,w_const,op,ratio\n";
  for (const auto& p : out.probes)
    for (const auto& r : p.rows)
      rows << csv_number(r.param) << "," << csv_number(r.w_const) << "," << r.op << "," << csv_number(r.ratio) << "\n";
  for (const auto& p : out.probes)
    for (const auto& [key, pts] : p.plots) {
      std::string name = key;
      for (auto& c : name)
        if (c == '/' || c == ' ') c = '_';
      std::ofstream f(fs::path(dir) / "plotdata" / (name + ".csv"));
      f << "x,y\n";
      for (const auto& xy : pts) f << csv_number(xy[0]) << "," << csv_number(xy[1]) << "\n";
    }
}

std::vector<std::pair<std::string, std::string>> shipped_scenarios() {
  std::vector<std::pair<std::string, std::string>> out;
  const fs::path dir(SQLAB_SCENARIO_DIR);
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") out.emplace_back(e.path().stem().string(), e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sqlab::lab
