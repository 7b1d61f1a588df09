#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sqlab/lab.hpp"

namespace sqlab::lab {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
  return s;
}

// Reads typed fields of one JSON object and records every problem under its path.
class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(path_ + ": expected an object");
  }

  bool ok() const { return j_.is_object(); }
  std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return ok() && j_.contains(k); }
  const json& raw(const std::string& k) const { return j_.at(k); }

  void allow(std::initializer_list<const char*> keys) {
    if (!ok()) return;
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key())) errors_.push_back(at(it.key()) + ": unknown field");
  }

  template <class T>
  void get(const std::string& k, T& out, bool required = false) {
    if (!has(k)) {
      if (required) errors_.push_back(at(k) + ": required field missing");
      return;
    }
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!raw(k).is_number()) throw std::invalid_argument("");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!raw(k).is_number_integer() || (std::is_unsigned_v<T> && raw(k).get<long long>() < 0))
          throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!raw(k).is_boolean()) throw std::invalid_argument("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!raw(k).is_string()) throw std::invalid_argument("");
      }
      out = raw(k).get<T>();
    } catch (const std::exception&) {
      errors_.push_back(at(k) + ": wrong type");
    }
  }

  void get_list(const std::string& k, std::vector<double>& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (v.is_number()) {
      out = {v.get<double>()};
      return;
    }
    if (!v.is_array() || v.empty()) {
      errors_.push_back(at(k) + ": expected a number or a non-empty array of numbers");
      return;
    }
    std::vector<double> tmp;
    for (const auto& x : v) {
      if (!x.is_number()) {
        errors_.push_back(at(k) + ": expected numbers");
        return;
      }
      tmp.push_back(x.get<double>());
    }
    out = tmp;
  }

  void get_strings(const std::string& k, std::vector<std::string>& out) {
    if (!has(k)) return;
    const auto& v = raw(k);
    if (!v.is_array()) {
      errors_.push_back(at(k) + ": expected an array of strings");
      return;
    }
    out.clear();
    for (const auto& x : v) {
      if (!x.is_string()) {
        errors_.push_back(at(k) + ": expected strings");
        return;
      }
      out.push_back(x.get<std::string>());
    }
  }

  void check(bool cond, const std::string& k, const std::string& msg) {
    if (!cond) errors_.push_back(at(k) + ": " + msg);
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
};

const std::set<std::string> kProbes{"weighted-norm", "rdf", "extrapolation", "scaling",
                                    "growth", "cover", "intrinsic-lp"};
const std::set<std::string> kBounds{"none", "buckley", "lemma2", "lemma10", "theorem1", "theorem2"};
const std::set<std::string> kOps3{"M", "M_theta", "R_loc", "Mstar_loc", "g_loc", "S_loc", "g_L",
                                  "S_L", "gstar_L", "stilde_L", "g_classical", "S_classical"};
const std::set<std::string> kOps1{"M", "g_classical", "S_classical"};

bool positive_list(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0)) return false;
  return !v.empty();
}

void parse_probe(const json& j, const std::string& path, ProbeSpec& p, Mode mode, std::vector<std::string>& err) {
  Reader r(j, path, err);
  if (!r.ok()) return;
  r.get("probe", p.probe, true);
  r.get("id", p.id);
  if (!p.probe.empty() && !kProbes.count(p.probe)) {
    err.push_back(r.at("probe") + ": unknown probe '" + p.probe + "'");
    return;
  }
  if (p.id.empty()) p.id = p.probe;
  if (p.probe == "weighted-norm") {
    r.allow({"probe", "id", "ops", "p", "theta", "alpha", "lambda", "mu", "bound", "dual_test", "weight_params"});
    r.get_list("weight_params", p.weight_params);
    r.get_strings("ops", p.ops);
    r.get_list("p", p.p);
    r.get("theta", p.theta);
    r.get("alpha", p.alpha);
    r.get("lambda", p.lambda);
    r.get("mu", p.mu);
    r.get("bound", p.bound);
    r.get("dual_test", p.dual_test);
    r.check(!p.ops.empty(), "ops", "at least one operator is required");
    const auto& allowed = mode == Mode::classical_1d ? kOps1 : kOps3;
    for (const auto& op : p.ops)
      if (!allowed.count(op)) err.push_back(r.at("ops") + ": operator '" + op + "' not available in this mode");
    r.check(kBounds.count(p.bound) > 0, "bound", "unknown bound '" + p.bound + "'");
    for (double x : p.p) r.check(x > 1.0, "p", "every p must exceed 1");
    r.check(p.theta >= 0.0, "theta", "must be nonnegative");
    r.check(p.alpha > 0.0, "alpha", "must be positive");
    r.check(p.lambda > 0.0, "lambda", "must be positive");
    r.check(p.mu >= 0.0, "mu", "must be nonnegative");
    if (p.bound == "buckley" || p.bound == "lemma2")
      r.check(p.theta == 0.0 || p.bound == "lemma2", "theta", "buckley uses the classical class");
  } else if (p.probe == "rdf") {
    r.allow({"probe", "id", "r", "r0", "theta", "K", "safety", "g_center", "g_width"});
    r.get("r", p.r);
    r.get("r0", p.r0);
    r.get("theta", p.theta);
    r.get("K", p.K);
    r.get("safety", p.safety);
    r.get("g_center", p.g_center);
    r.get("g_width", p.g_width);
    r.check(p.r > 1.0, "r", "must exceed 1");
    r.check(p.r0 >= 1.0 && p.r0 < p.r, "r0", "must lie in [1, r)");
    r.check(p.theta >= 0.0, "theta", "must be nonnegative");
    r.check(p.K >= 0, "K", "must be nonnegative");
    r.check(p.safety >= 1.0, "safety", "must be at least 1");
    r.check(p.g_width > 0.0, "g_width", "must be positive");
  } else if (p.probe == "extrapolation") {
    r.allow({"probe", "id", "op", "p0", "eta", "gamma", "p"});
    r.get("op", p.op);
    r.get("p0", p.p0);
    r.get("eta", p.eta);
    r.get("gamma", p.gamma);
    r.get_list("p", p.p);
    const auto& allowed = mode == Mode::classical_1d ? kOps1 : kOps3;
    r.check(allowed.count(p.op) > 0, "op", "operator '" + p.op + "' not available in this mode");
    r.check(p.p0 >= 1.0, "p0", "must be at least 1");
    r.check(p.eta > 0.0, "eta", "must be positive");
    r.check(p.gamma >= 0.0, "gamma", "must be nonnegative");
    for (double x : p.p) r.check(x > 1.0, "p", "every p must exceed 1");
  } else if (p.probe == "scaling") {
    r.allow({"probe", "id", "alphas", "beta"});
    r.get_list("alphas", p.alphas);
    r.get("beta", p.beta);
    r.check(positive_list(p.alphas) && p.alphas.size() >= 2, "alphas", "needs at least two positive apertures");
    r.check(p.beta > 0.0 && p.beta <= 1.0, "beta", "must lie in (0, 1]");
  } else if (p.probe == "growth") {
    r.allow({"probe", "id", "p", "theta", "lambdas"});
    r.get_list("p", p.p);
    r.get("theta", p.theta);
    r.get_list("lambdas", p.lambdas);
    for (double x : p.p) r.check(x > 1.0, "p", "every p must exceed 1");
    for (double x : p.lambdas) r.check(x >= 1.0, "lambdas", "dilations must be at least 1");
    r.check(p.theta >= 0.0, "theta", "must be nonnegative");
  } else if (p.probe == "cover") {
    r.allow({"probe", "id", "sigmas", "domain"});
    r.get_list("sigmas", p.sigmas);
    r.get("domain", p.domain);
    for (double x : p.sigmas) r.check(x >= 1.0, "sigmas", "dilations must be at least 1");
    r.check(p.domain > 0.0, "domain", "must be positive");
    r.check(mode == Mode::schrodinger_3d, "probe", "cover needs the three-dimensional mode");
  } else if (p.probe == "intrinsic-lp") {
    r.allow({"probe", "id", "samples", "draws", "beta"});
    r.get("samples", p.samples);
    r.get("draws", p.draws);
    r.get("beta", p.beta);
    r.check(p.samples >= 1, "samples", "must be positive");
    r.check(p.beta > 0.0 && p.beta <= 1.0, "beta", "must lie in (0, 1]");
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> f)
    : std::runtime_error("invalid scenario: " + join(f)), fields(std::move(f)) {}

std::string to_string(Mode m) { return m == Mode::classical_1d ? "classical-1d" : "schrodinger-radial-3d"; }

Scenario parse_scenario(const json& j) {
  std::vector<std::string> err;
  Scenario s;
  Reader top(j, "", err);
  if (!top.ok()) throw ValidationError(err);
  top.allow({"schema", "name", "mode", "seed", "potential", "grid", "eigen", "times", "balls", "weights",
             "operators", "output"});
  top.get("schema", s.schema, true);
  if (top.has("schema") && s.schema != kSchemaVersion)
    err.push_back("schema: unsupported version " + std::to_string(s.schema));
  top.get("name", s.name, true);
  std::string mode = "schrodinger-radial-3d";
  top.get("mode", mode);
  if (mode == "classical-1d") s.mode = Mode::classical_1d;
  else if (mode == "schrodinger-radial-3d") s.mode = Mode::schrodinger_3d;
  else err.push_back("mode: unknown mode '" + mode + "'");
  top.get("seed", s.seed);
  top.get("output", s.output);

  if (top.has("potential")) {
    Reader r(top.raw("potential"), "potential", err);
    r.allow({"kind", "scale", "exponent", "rh_q"});
    r.get("kind", s.potential.kind);
    r.get("scale", s.potential.scale);
    r.get("exponent", s.potential.exponent);
    if (r.has("rh_q")) {
      double q = 0.0;
      r.get("rh_q", q);
      s.potential.rh_q = q;
      r.check(q > 1.5, "rh_q", "must exceed n/2");
    }
    const auto& k = s.potential.kind;
    r.check(k == "zero" || k == "constant" || k == "power", "kind", "unknown potential '" + k + "'");
    r.check(s.potential.scale >= 0.0, "scale", "must be nonnegative");
    r.check(s.potential.exponent >= 0.0, "exponent", "must be nonnegative");
  }
  if (s.mode == Mode::classical_1d && s.potential.kind != "zero")
    err.push_back("potential.kind: classical-1d requires the zero potential");

  if (top.has("grid")) {
    Reader r(top.raw("grid"), "grid", err);
    r.allow({"r_max", "nodes", "r_first"});
    r.get("r_max", s.grid.r_max);
    r.get("nodes", s.grid.nodes);
    r.get("r_first", s.grid.r_first);
    r.check(s.grid.r_max > 0.0, "r_max", "must be positive");
    r.check(s.grid.nodes >= 16, "nodes", "at least 16 nodes");
    r.check(s.grid.r_first > 0.0 && s.grid.r_first < s.grid.r_max, "r_first", "must lie in (0, r_max)");
  }
  if (top.has("eigen")) {
    Reader r(top.raw("eigen"), "eigen", err);
    r.allow({"r_max", "points", "kmax"});
    r.get("r_max", s.eigen.r_max);
    r.get("points", s.eigen.points);
    r.get("kmax", s.eigen.kmax);
    r.check(s.eigen.r_max > 0.0, "r_max", "must be positive");
    r.check(s.eigen.kmax >= 1 && s.eigen.kmax <= s.eigen.points, "kmax", "must lie in [1, points]");
  }
  if (top.has("times")) {
    Reader r(top.raw("times"), "times", err);
    r.allow({"t0", "t1", "count"});
    r.get("t0", s.times.t0);
    r.get("t1", s.times.t1);
    r.get("count", s.times.count);
    r.check(s.times.t0 > 0.0 && s.times.t1 > s.times.t0, "t1", "need 0 < t0 < t1");
    r.check(s.times.count >= 2, "count", "at least two time nodes");
  }
  if (top.has("balls")) {
    Reader r(top.raw("balls"), "balls", err);
    r.allow({"d_min", "d_max", "nd", "R_min", "R_max", "nR", "reach"});
    auto& b = s.balls;
    r.get("d_min", b.d_min);
    r.get("d_max", b.d_max);
    r.get("nd", b.nd);
    r.get("R_min", b.R_min);
    r.get("R_max", b.R_max);
    r.get("nR", b.nR);
    r.get("reach", b.reach);
    r.check(b.d_min > 0.0 && b.d_max > b.d_min, "d_max", "need 0 < d_min < d_max");
    r.check(b.R_min > 0.0 && b.R_max > b.R_min, "R_max", "need 0 < R_min < R_max");
    r.check(b.nd >= 2 && b.nR >= 2, "nR", "at least two samples per axis");
    r.check(b.reach > 0.0, "reach", "must be positive");
  }
  if (top.has("weights")) {
    Reader r(top.raw("weights"), "weights", err);
    r.allow({"kind", "params"});
    r.get("kind", s.weights.kind);
    r.get_list("params", s.weights.params);
    const auto& k = s.weights.kind;
    r.check(k == "power" || k == "shifted-power" || k == "near-extremal", "kind", "unknown family '" + k + "'");
  }
  if (top.has("operators")) {
    const auto& ops = top.raw("operators");
    if (!ops.is_array()) {
      err.push_back("operators: expected an array");
    } else {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        ProbeSpec p;
        const std::string path = "operators[" + std::to_string(i) + "]";
        parse_probe(ops[i], path, p, s.mode, err);
        if (!ids.insert(p.id).second) err.push_back(path + ".id: duplicate id '" + p.id + "'");
        s.operators.push_back(p);
      }
    }
  }
  bool short_family = false;
  for (const auto& p : s.operators) {
    const bool uses = p.probe == "weighted-norm" || p.probe == "rdf" || p.probe == "extrapolation" || p.probe == "growth";
    const auto& params = p.weight_params.empty() ? s.weights.params : p.weight_params;
    short_family |= uses && params.size() < 4;
  }
  if (short_family)
    err.push_back("weights.params: the probes need a weight family of at least 4 members");
  if (!err.empty()) throw ValidationError(err);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({"config: cannot open '" + path + "'"});
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("config: JSON parse error: ") + e.what()});
  }
  return parse_scenario(j);
}

json to_json(const Scenario& s) {
  json ops = json::array();
  for (const auto& p : s.operators) {
    json o{{"probe", p.probe}, {"id", p.id}};
    if (p.probe == "weighted-norm") {
      o.update({{"ops", p.ops}, {"p", p.p}, {"theta", p.theta}, {"alpha", p.alpha}, {"lambda", p.lambda},
                {"mu", p.mu}, {"bound", p.bound}, {"dual_test", p.dual_test}});
      if (!p.weight_params.empty()) o["weight_params"] = p.weight_params;
    } else if (p.probe == "rdf") {
      o.update({{"r", p.r}, {"r0", p.r0}, {"theta", p.theta}, {"K", p.K}, {"safety", p.safety},
                {"g_center", p.g_center}, {"g_width", p.g_width}});
    } else if (p.probe == "extrapolation") {
      o.update({{"op", p.op}, {"p0", p.p0}, {"eta", p.eta}, {"gamma", p.gamma}, {"p", p.p}});
    } else if (p.probe == "scaling") {
      o.update({{"alphas", p.alphas}, {"beta", p.beta}});
    } else if (p.probe == "growth") {
      o.update({{"p", p.p}, {"theta", p.theta}, {"lambdas", p.lambdas}});
    } else if (p.probe == "cover") {
      o.update({{"sigmas", p.sigmas}, {"domain", p.domain}});
    } else if (p.probe == "intrinsic-lp") {
      o.update({{"samples", p.samples}, {"draws", p.draws}, {"beta", p.beta}});
    }
    ops.push_back(o);
  }
  json pot{{"kind", s.potential.kind}, {"scale", s.potential.scale}, {"exponent", s.potential.exponent}};
  if (s.potential.rh_q) pot["rh_q"] = *s.potential.rh_q;
  json out{{"schema", s.schema},
           {"name", s.name},
           {"mode", to_string(s.mode)},
           {"seed", s.seed},
           {"potential", pot},
           {"grid", {{"r_max", s.grid.r_max}, {"nodes", s.grid.nodes}, {"r_first", s.grid.r_first}}},
           {"eigen", {{"r_max", s.eigen.r_max}, {"points", s.eigen.points}, {"kmax", s.eigen.kmax}}},
           {"times", {{"t0", s.times.t0}, {"t1", s.times.t1}, {"count", s.times.count}}},
           {"balls",
            {{"d_min", s.balls.d_min},
             {"d_max", s.balls.d_max},
             {"nd", s.balls.nd},
             {"R_min", s.balls.R_min},
             {"R_max", s.balls.R_max},
             {"nR", s.balls.nR},
             {"reach", s.balls.reach}}},
           {"weights", {{"kind", s.weights.kind}, {"params", s.weights.params}}},
           {"operators", ops}};
  if (!s.output.empty()) out["output"] = s.output;
  return out;
}

}  // namespace sqlab::lab
