#include "sqlab/weights.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sqlab {

std::string to_string(WeightClass c) {
  switch (c) {
    case WeightClass::ap: return "A_p";
    case WeightClass::ap_rho_theta: return "A_p^{rho,theta}";
    case WeightClass::ap_rho_loc: return "A_p^{rho,loc}";
  }
  return "?";
}

double conjugate(double p) {
  if (!(p > 1.0)) throw std::domain_error("exponent must exceed 1");
  return p / (p - 1.0);
}

double psi_theta(const BallSpec& B, const CriticalRadius& rho, double theta) {
  if (theta < 0.0) throw std::domain_error("theta must be nonnegative");
  if (rho.is_infinite() || theta == 0.0) return 1.0;
  return std::pow(1.0 + B.R / rho.at(B.d), theta);
}

RadialProfile dual_weight(const RadialProfile& w, double p) {
  const double e = -1.0 / (p - 1.0);
  RadialProfile s = w;
  for (auto& v : s.values) v = std::pow(v, e);
  if (w.head_exponent) s.head_exponent = e * *w.head_exponent;
  if (w.tail == Extension::power) s.tail_exponent = e * w.tail_exponent;
  return s;
}

ApBall::ApBall(const RadialProfile& w, double p) : p_(p), w_(w), sigma_(dual_weight(w, p)) {
  if (!(p > 1.0)) throw std::domain_error("exponent must exceed 1");
}

double ApBall::quantity(double d, double R, double psi) const {
  try {
    const double a = w_.average(d, R);
    const double b = sigma_.average(d, R);
    return std::pow(psi, -p_) * a * std::pow(b, p_ - 1.0);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

WeightConstantReport finish(WeightClass cls, double p, double th, const SupResult& s) {
  WeightConstantReport r;
  r.cls = cls;
  r.p = p;
  r.theta = th;
  r.value = s.value;
  r.arg = s.arg;
  r.family = s.family;
  if (std::isinf(s.value)) {
    r.in_class = false;
    r.offending = s.arg;
  }
  return r;
}

void check_positive(const WeightProfile& w) {
  const std::size_t first = w.w.head_exponent ? 1 : 0;
  for (std::size_t i = first; i < w.w.size(); ++i)
    if (!(w.w.values[i] > 1e-300)) throw std::domain_error("weight must be strictly positive at every node");
}

}  // namespace

WeightConstantReport ap_rho_theta_constant(const WeightProfile& w, double p, double theta,
                                           const CriticalRadius& rho, const BallFamily& fam, Exec exec) {
  return ap_rho_theta_scan(w, p, {theta}, rho, fam, exec).front();
}

WeightConstantReport ap_constant(const WeightProfile& w, double p, const BallFamily& fam, Exec exec) {
  auto r = ap_rho_theta_constant(w, p, 0.0, CriticalRadius::infinite(w.w.grid), fam, exec);
  r.cls = WeightClass::ap;
  return r;
}

std::vector<WeightConstantReport> ap_rho_theta_scan(const WeightProfile& w, double p,
                                                    const std::vector<double>& thetas,
                                                    const CriticalRadius& rho, const BallFamily& fam,
                                                    Exec exec) {
  check_positive(w);
  const ApBall ab(w.w, p);
  auto objective = [&](double th) {
    return [&, th](double d, double R) { return ab.quantity(d, R, psi_theta({d, R}, rho, th)); };
  };
  std::vector<SupResult> res;
  for (double th : thetas) res.push_back(ball_sup(fam, objective(th), exec));
  std::vector<WeightConstantReport> out;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    SupResult s = res[i];
    const auto f = objective(thetas[i]);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
      if (j == i) continue;
      const double v = f(res[j].arg.d, res[j].arg.R);
      if (v > s.value) {
        s.value = v;
        s.arg = res[j].arg;
      }
    }
    const auto cls = (thetas[i] == 0.0 && rho.is_infinite()) ? WeightClass::ap : WeightClass::ap_rho_theta;
    out.push_back(finish(cls, p, thetas[i], s));
  }
  return out;
}

WeightConstantReport ap_rho_loc_constant(const WeightProfile& w, double p, const CriticalRadius& rho,
                                         double beta, const BallFamily& fam, Exec exec) {
  if (!(beta >= 1.0)) throw std::domain_error("beta must be at least 1");
  check_positive(w);
  const ApBall ab(w.w, p);
  auto f = [&](double d, double R) {
    if (!rho.is_infinite() && R > beta * rho.at(d)) return std::numeric_limits<double>::quiet_NaN();
    return ab.quantity(d, R, 1.0);
  };
  return finish(WeightClass::ap_rho_loc, p, beta, ball_sup(fam, f, exec));
}

DualityReport duality_check(const WeightProfile& w, double r, double theta, const CriticalRadius& rho,
                            const BallFamily& fam, Exec exec) {
  DualityReport rep;
  rep.lhs = ap_rho_theta_constant(w, r, theta, rho, fam, exec).value;
  WeightProfile s{dual_weight(w.w, r), w.family + "-dual", w.param};
  const double rp = conjugate(r);
  rep.rhs = std::pow(ap_rho_theta_constant(s, rp, theta, rho, fam, exec).value, r - 1.0);
  rep.residual = std::abs(rep.lhs - rep.rhs) / std::abs(rep.lhs);
  return rep;
}

double weight_growth_ratio(const ApBall& ab, const BallSpec& B, double lambda, double theta,
                           const CriticalRadius& rho) {
  if (!(lambda >= 1.0)) throw std::domain_error("dilation must be at least 1");
  const double p = ab.p();
  const int n = ab.dim();
  const double big = ab.weight_mass(B.d, lambda * B.R);
  const double small = ab.weight_mass(B.d, B.R);
  const double psi = rho.is_infinite() ? 1.0 : 1.0 + lambda * B.R / rho.at(B.d);
  return big / (std::pow(lambda, p * n) * std::pow(psi, conjugate(p) * p * theta) * small);
}

GrowthReport weight_growth_check(const WeightProfile& w, double p, double theta, const CriticalRadius& rho,
                                 const std::vector<BallSpec>& balls, const std::vector<double>& lambdas,
                                 double weight_constant) {
  const ApBall ab(w.w, p);
  GrowthReport rep;
  rep.weight_constant = weight_constant;
  for (const auto& B : balls)
    for (double l : lambdas) {
      const double v = weight_growth_ratio(ab, B, l, theta, rho);
      ++rep.samples;
      if (v > rep.sup_ratio) {
        rep.sup_ratio = v;
        rep.arg = B;
        rep.arg_lambda = l;
      }
    }
  rep.fitted_C = rep.sup_ratio / std::pow(weight_constant, p / (p - 1.0));
  return rep;
}

WeightProfile power_weight(GridPtr grid, double a) {
  WeightProfile wp;
  wp.family = "power";
  wp.param = a;
  wp.w = RadialProfile::sample(grid, [&](double r) { return r > 0.0 ? std::pow(r, a) : 1.0; });
  if (a != 0.0) {
    wp.w.values[0] = wp.w.values[1];  // placeholder; the head exponent governs [0, r_1]
    wp.w.head_exponent = a;
  }
  wp.w.tail = Extension::power;
  wp.w.tail_exponent = a;
  return wp;
}

WeightProfile shifted_power_weight(GridPtr grid, double a) {
  WeightProfile wp;
  wp.family = "shifted-power";
  wp.param = a;
  wp.w = RadialProfile::sample(grid, [&](double r) { return std::pow(1.0 + r, a); });
  wp.w.tail = Extension::power;
  wp.w.tail_exponent = a;
  return wp;
}

std::vector<WeightProfile> make_weight_family(const std::string& kind, const std::vector<double>& params,
                                              GridPtr grid, double p, double theta, bool rho_finite) {
  const int n = grid->dim();
  std::vector<WeightProfile> out;
  for (double a : params) {
    if (kind == "power") {
      if (!(a > -n && a < n * (p - 1.0)))
        throw std::domain_error("power weight: exponent a must satisfy -n < a < n(p-1)");
      out.push_back(power_weight(grid, a));
    } else if (kind == "near-extremal") {
      if (!(a > 0.0 && a < 1.0)) throw std::domain_error("near-extremal weight: delta must lie in (0,1)");
      auto wp = power_weight(grid, (1.0 - a) * n * (p - 1.0));
      wp.family = "near-extremal";
      wp.param = a;
      out.push_back(wp);
    } else if (kind == "shifted-power") {
      const double ext = rho_finite ? theta * p : 0.0;
      if (!(a > -n - ext && a < n * (p - 1.0) + ext))
        throw std::domain_error("shifted-power weight: exponent a must satisfy -n-theta*p < a < n(p-1)+theta*p "
                                "(theta taken as 0 when rho is infinite)");
      out.push_back(shifted_power_weight(grid, a));
    } else {
      throw std::domain_error("unknown weight family kind: " + kind);
    }
  }
  return out;
}

}  // namespace sqlab
