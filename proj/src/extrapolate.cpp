#include "sqlab/extrapolate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sqlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const MaximalSearch& search_for(const RdFConfig& cfg, const RadialGrid& g, MaximalSearch& local) {
  if (!cfg.search.R.empty()) return cfg.search;
  local = MaximalSearch::for_grid(g);
  return local;
}

RadialProfile product(const RadialProfile& a, const RadialProfile& b) {
  RadialProfile out(a.grid, std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  out.head_exponent = b.head_exponent;
  return out;
}

double norm_q(const RadialProfile& f, const RadialProfile& w, double q) { return lp_norm(f, w, q); }

}  // namespace

void RdFConfig::validate() const {
  if (!(r > 1.0)) throw std::domain_error("RdF: r must exceed 1");
  if (!(r0 >= 1.0 && r0 < r)) throw std::domain_error("RdF: r0 must lie in [1, r)");
  if (!(theta >= 0.0)) throw std::domain_error("RdF: theta must be nonnegative");
  if (K < 0) throw std::domain_error("RdF: K must be nonnegative");
  if (!(safety >= 1.0)) throw std::domain_error("RdF: safety factor must be at least 1");
}

RadialProfile rdf_step(const RadialProfile& g, const RadialProfile& w, const CriticalRadius& rho,
                       const RdFConfig& cfg, Exec exec) {
  cfg.validate();
  if (g.grid != w.grid) throw std::domain_error("RdF: g and w must share a grid");
  double top = 0.0;
  for (double v : g.values) {
    if (v < 0.0) throw std::domain_error("RdF: g must be nonnegative");
    top = std::max(top, v);
  }
  RadialProfile out(g.grid, std::vector<double>(g.size(), 0.0));
  if (top == 0.0) return out;
  const double s = cfg.s();
  RadialProfile h(g.grid, std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) h.values[i] = std::pow(g.values[i] / top, 1.0 / s) * w.values[i];
  h.head_exponent = w.head_exponent;
  MaximalSearch local;
  const auto m = adapted_maximal(h, cfg.gamma(), rho, search_for(cfg, *g.grid, local), exec);
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = top * std::pow(m.values.values[i] / w.values[i], s);
  return out;
}

std::vector<RadialProfile> rdf_panel(GridPtr grid) {
  const double centres[5] = {0.0, 0.5, 1.5, 3.0, 6.0};
  const double widths[2] = {0.4, 1.2};
  std::vector<RadialProfile> out;
  for (double c : centres)
    for (double w : widths)
      out.push_back(RadialProfile::sample(grid, [&](double r) { return std::exp(-(r - c) * (r - c) / (w * w)); }));
  return out;
}

NormEstimate estimate_rdf_norm(const std::vector<RadialProfile>& panel, const RadialProfile& w,
                               const CriticalRadius& rho, const RdFConfig& cfg, Exec exec) {
  NormEstimate e;
  const double q = cfg.q();
  for (const auto& h : panel) {
    const double a = norm_q(h, w, q);
    if (!(a > 0.0)) continue;
    e.measured = std::max(e.measured, norm_q(rdf_step(h, w, rho, cfg, exec), w, q) / a);
  }
  e.value = cfg.safety * e.measured;
  std::ostringstream s;
  s << "panel(" << panel.size() << ") max ratio x " << cfg.safety;
  e.source = s.str();
  return e;
}

RdFResult rdf_majorant(const RadialProfile& g, const RadialProfile& w, const CriticalRadius& rho,
                       const RdFConfig& cfg, const NormEstimate& norm, Exec exec) {
  cfg.validate();
  RdFResult res;
  auto& rep = res.report;
  rep.norm = norm;
  const double q = cfg.q();
  rep.norm_g = norm_q(g, w, q);
  rep.gw_constant = rep.w_constant = rep.transfer_ratio = kNaN;
  if (rep.norm_g == 0.0) {
    res.G = RadialProfile(g.grid, std::vector<double>(g.size(), 0.0));
    rep.norm_ratio = 1.0;
    rep.fixed_point = 0.0;
    return res;
  }
  if (!(norm.value > 0.0)) throw std::domain_error("RdF: the norm estimate must be positive");

  for (int attempt = 0;; ++attempt) {
    const double Rn = rep.norm.value;
    RadialProfile G = g, term = g;
    double prev = rep.norm_g, growth = 0.0, last_scaled = 1.0;
    bool restart = false;
    int k = 0;
    for (k = 1; k <= cfg.K; ++k) {
      term = rdf_step(term, w, rho, cfg, exec);
      const double nk = norm_q(term, w, q);
      const double step = prev > 0.0 ? nk / prev : 0.0;
      growth = std::max(growth, step);
      if (step > Rn) {
        restart = true;
        break;
      }
      // the stored term is R^k g / (2 Rn)^k; keep it at that scale for the next step
      for (auto& v : term.values) v /= 2.0 * Rn;
      prev = nk / (2.0 * Rn);
      for (std::size_t i = 0; i < G.size(); ++i) G.values[i] += term.values[i];
      last_scaled = prev / rep.norm_g;
      if (last_scaled < cfg.early_exit) break;
    }
    if (restart) {
      if (attempt >= cfg.restarts) {
        std::ostringstream s;
        s << "RdF: step " << k << " grew by " << growth << " > norm estimate " << Rn << " after "
          << attempt << " restarts";
        throw std::runtime_error(s.str());
      }
      rep.norm.value *= 2.0;
      rep.norm.source += " x2";
      rep.warnings.add("norm estimate too small; doubled and restarted");
      ++rep.restarts;
      continue;
    }
    rep.terms = std::min(k, cfg.K);
    rep.max_step_growth = growth;
    // later terms shrink by at most growth / (2 Rn) <= 1/2 each
    const double ratio = growth / (2.0 * Rn);
    rep.residual = ratio < 1.0 ? last_scaled * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    res.G = std::move(G);
    break;
  }
  rep.norm_G = norm_q(res.G, w, q);
  rep.norm_ratio = rep.norm_G / rep.norm_g;
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) rep.margin = std::min(rep.margin, res.G.values[i] - g.values[i]);
  const auto RG = rdf_step(res.G, w, rho, cfg, exec);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (res.G.values[i] > 0.0)
      rep.fixed_point = std::max(rep.fixed_point, RG.values[i] / (2.0 * rep.norm.value * res.G.values[i]));
  return res;
}

void rdf_transfer(RdFResult& res, const RadialProfile& w, const CriticalRadius& rho, const RdFConfig& cfg,
                  const BallFamily& fam, Exec exec) {
  auto& rep = res.report;
  if (cfg.r0 <= 1.0) {
    rep.warnings.add("class transfer needs r0 > 1; skipped");
    return;
  }
  const WeightProfile Gw{product(res.G, w), "Gw", 0.0};
  rep.gw_constant = ap_rho_theta_constant(Gw, cfg.r0, cfg.gamma(), rho, fam, exec).value;
  rep.w_constant = ap_rho_theta_constant(WeightProfile{w, "w", 0.0}, cfg.r, cfg.theta, rho, fam, exec).value;
  rep.transfer_ratio = rep.gw_constant / rep.w_constant;
}

double extrapolation_theta(double gamma, double p0, double p) {
  if (p > p0) return gamma / conjugate(p0);
  if (p < p0) return gamma / p0;
  return gamma;
}

std::vector<ProbeFit> extrapolation_probe(const RadialOperator& T, double p0, double eta, double gamma,
                                          const std::vector<double>& ps,
                                          const std::function<std::vector<WeightProfile>(double p)>& family,
                                          const std::vector<RadialProfile>& panel, const CriticalRadius& rho,
                                          const BallFamily& fam, Exec exec) {
  if (!(p0 >= 1.0)) throw std::domain_error("extrapolation probe: p0 must be at least 1");
  std::vector<RadialProfile> images;
  for (const auto& f : panel) images.push_back(T(f));
  std::vector<ProbeFit> out;
  for (double p : ps) {
    if (!(p > 1.0)) throw std::domain_error("extrapolation probe: p must exceed 1");
    ProbeFit pf;
    pf.p = p;
    pf.theta = extrapolation_theta(gamma, p0, p);
    pf.predicted = eta * std::max(1.0, (p0 - 1.0) / (p - 1.0));
    const auto ws = family(p);
    if (ws.size() < 4) throw std::domain_error("extrapolation probe: weight family needs at least 4 members");
    std::vector<double> xs, ys;
    for (const auto& w : ws) {
      ProbeRow row;
      row.param = w.param;
      row.w_const = ap_rho_theta_constant(w, p, pf.theta, rho, fam, exec).value;
      for (std::size_t k = 0; k < panel.size(); ++k) {
        const double a = lp_norm(panel[k], w.w, p);
        if (a > 0.0) row.ratio = std::max(row.ratio, lp_norm(images[k], w.w, p) / a);
      }
      pf.rows.push_back(row);
      xs.push_back(row.w_const);
      ys.push_back(row.ratio);
    }
    pf.fit = fit_loglog(xs, ys);
    out.push_back(std::move(pf));
  }
  return out;
}

}  // namespace sqlab
