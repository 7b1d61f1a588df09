#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sqlab/lab.hpp"

using namespace sqlab;
using namespace sqlab::lab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_l2(const RadialProfile& a, const RadialProfile& b, const RadialProfile& ref) {
  RadialProfile d(a.grid, a.values);
  for (std::size_t i = 0; i < d.size(); ++i) d.values[i] -= b.values[i];
  return lp_norm(d, 2.0) / lp_norm(ref, 2.0);
}

RadialProfile constant_potential(GridPtr g, double c) {
  RadialProfile V(g, std::vector<double>(g->size(), c));
  V.tail = Extension::constant;
  return V;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

Verdict semigroup_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = make_grid(RadialGrid::standard(3));
  const auto sys = build_eigensystem(constant_potential(g, 1.0));
  const auto panel = test_panel(g);
  double worst = 0.0;
  for (std::size_t k = 0; k < 5; ++k)  // the five bumps
    for (double t : {0.01, 0.1, 1.0}) {
      const auto u = schrodinger_apply(sys, panel[k], t, Multiplier::semigroup);
      auto ref = gaussian_apply(panel[k], t);
      for (auto& v : ref.values) v *= std::exp(-t);
      worst = std::max(worst, rel_l2(u, ref, panel[k]));
    }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && secs <= 120.0, "max rel " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Verdict psi_identity() {
  const auto g = make_grid(RadialGrid::standard(3));
  double worst = 0.0;
  for (const auto& f : test_panel(g))
    for (double t : {0.05, 0.5, 2.0}) {
      auto psi = psi_apply(f, t);
      for (auto& v : psi.values) v *= psi_constant(3);
      const auto fd = laplacian_heat_fd(f, t);
      worst = std::max(worst, rel_l2(psi, fd, fd));
    }
  return {worst <= 1e-6, "max rel " + fmt(worst)};
}

Verdict closed_form_rho() {
  const auto g = make_grid(RadialGrid::standard(3));
  const double one = critical_radius(BallIntegrator(constant_potential(g, 1.0)), 3.0).value;
  auto sq = RadialProfile::sample(g, [](double r) { return r * r; });
  sq.tail = Extension::power;
  sq.tail_exponent = 2.0;
  const double at0 = critical_radius(BallIntegrator(sq), 0.0).value;
  const double e1 = std::abs(one / std::sqrt(3.0 / (4.0 * kPi)) - 1.0);
  const double e2 = std::abs(at0 / std::pow(5.0 / (4.0 * kPi), 0.25) - 1.0);
  return {e1 <= 1e-6 && e2 <= 1e-6, "rel " + fmt(e1) + " and " + fmt(e2)};
}

Verdict weight_structure() {
  const auto g = make_grid(RadialGrid::standard(3));
  const auto rho = critical_radius_profile(constant_potential(g, 1.0));
  const auto fam = BallFamily::tensor(0.01, 5.0, 24, 0.01, 10.0, 24, 20.0);
  const std::vector<double> thetas{0.0, 0.25, 0.5, 1.0, 2.0};
  std::size_t pairs = 0, violations = 0;
  double worst_dual = 0.0, min_ap = INFINITY;
  for (double p : {2.0, 3.0}) {
    auto ws = make_weight_family("shifted-power", {-1.5, -0.5, 0.5, 1.5}, g, p, 0.5, true);
    for (const auto& extra : make_weight_family("power", {-1.0, 1.0}, g, p)) ws.push_back(extra);
    for (const auto& w : ws) {
      const auto scan = ap_rho_theta_scan(w, p, thetas, rho, fam);
      for (std::size_t i = 1; i < scan.size(); ++i, ++pairs)
        if (scan[i].value > scan[i - 1].value + 1e-12) ++violations;
      const ApBall ab(w.w, p);
      for (double d : {0.0, 0.5, 2.0, 6.0})
        for (double R : {0.05, 0.5, 3.0}) {
          double prev = INFINITY;
          for (double th : thetas) {
            const double q = ab.quantity(d, R, psi_theta({d, R}, rho, th));
            if (q > prev + 1e-12) ++violations;
            prev = q;
            ++pairs;
          }
        }
      worst_dual = std::max(worst_dual, duality_check(w, p, 0.5, rho, fam).residual);
      min_ap = std::min(min_ap, ap_constant(w, p, fam).value);
    }
  }
  return {violations == 0 && worst_dual <= 2e-2 && min_ap >= 1.0,
          std::to_string(violations) + "/" + std::to_string(pairs) + " monotonicity violations, duality residual " +
              fmt(worst_dual) + ", min [w]_Ap " + fmt(min_ap)};
}

// Runs shipped scenarios and requires every gate to pass within the time budget.
Verdict scenario_gates(const std::vector<std::string>& names, double budget) {
  std::map<std::string, std::string> shipped;
  for (const auto& [n, path] : shipped_scenarios()) shipped[n] = path;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string failed;
  for (const auto& n : names) {
    if (!shipped.count(n)) return {false, "scenario " + n + " not shipped"};
    const auto out = run_scenario(load_scenario(shipped[n]), "");
    for (const auto& p : out.probes)
      for (const auto& gate : p.gates)
        if (!gate.pass) {
          ok = false;
          failed += (failed.empty() ? "" : "; ") + p.id + ": " + gate.name + " = " + fmt(gate.value);
        }
  }
  const double secs = seconds_since(t0);
  std::string detail = fmt(secs) + " s";
  if (secs > budget) {
    ok = false;
    detail += " (budget " + fmt(budget) + " s)";
  }
  if (!failed.empty()) detail += ", failed " + failed;
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"semigroup oracle, unit potential", semigroup_oracle},
      {"psi kernel identity", psi_identity},
      {"closed-form critical radius", closed_form_rho},
      {"weight class structure", weight_structure},
      {"Rubio de Francia majorant", [] { return scenario_gates({"rdf"}, 60.0); }},
      {"Buckley slope", [] { return scenario_gates({"buckley-1d"}, 1e9); }},
      {"g_L, S_L, gstar_L slope, admissible lambda", [] { return scenario_gates({"theorem1-g_L-V1"}, 900.0); }},
      {"gstar_L slope, small lambda", [] { return scenario_gates({"theorem2"}, 1e9); }},
      {"aperture scaling laws", [] { return scenario_gates({"scaling"}, 1e9); }},
      {"weighted ball growth", [] { return scenario_gates({"growth"}, 1e9); }},
      {"critical-ball cover", [] { return scenario_gates({"cover"}, 1e9); }},
      {"intrinsic LP soundness", [] { return scenario_gates({"intrinsic-lp"}, 1e9); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
