#pragma once

#include <string>
#include <vector>

#include "sqlab/potential.hpp"

namespace sqlab {

struct WeightProfile {
  RadialProfile w;
  std::string family;
  double param = 0.0;
};

enum class WeightClass { ap, ap_rho_theta, ap_rho_loc };

std::string to_string(WeightClass c);

struct WeightConstantReport {
  WeightClass cls = WeightClass::ap;
  double p = 2.0;
  double theta = 0.0;  // theta for the adapted class, beta for the local class
  double value = 1.0;
  BallSpec arg;
  std::string family;
  bool in_class = true;  // false when some ball average of w^{-1/(p-1)} diverges
  BallSpec offending;
};

// p' = p / (p - 1)
double conjugate(double p);

// [1 + R / rho(d)]^theta, 1 for the infinite critical radius
double psi_theta(const BallSpec& B, const CriticalRadius& rho, double theta);

// Ball averages of w and of w^{-1/(p-1)}.
class ApBall {
 public:
  ApBall(const RadialProfile& w, double p);
  // Psi^{-p} <w> <sigma>^{p-1}; +inf when the sigma average diverges
  double quantity(double d, double R, double psi) const;
  double weight_mass(double d, double R) const { return w_.ball(d, R); }
  double p() const { return p_; }
  int dim() const { return w_.profile().grid->dim(); }

 private:
  double p_;
  BallIntegrator w_, sigma_;
};

RadialProfile dual_weight(const RadialProfile& w, double p);

WeightConstantReport ap_constant(const WeightProfile& w, double p, const BallFamily& fam,
                                 Exec exec = Exec::parallel);
WeightConstantReport ap_rho_theta_constant(const WeightProfile& w, double p, double theta,
                                           const CriticalRadius& rho, const BallFamily& fam,
                                           Exec exec = Exec::parallel);
// one report per theta, each a sup over the union of all searched balls, so the
// values are exactly nonincreasing in theta
std::vector<WeightConstantReport> ap_rho_theta_scan(const WeightProfile& w, double p,
                                                    const std::vector<double>& thetas,
                                                    const CriticalRadius& rho, const BallFamily& fam,
                                                    Exec exec = Exec::parallel);
// classical quantity restricted to balls with R <= beta rho(d)
WeightConstantReport ap_rho_loc_constant(const WeightProfile& w, double p, const CriticalRadius& rho,
                                         double beta, const BallFamily& fam, Exec exec = Exec::parallel);

struct DualityReport {
  double lhs = 0.0;  // [w]_{A_r^{rho,theta}}
  double rhs = 0.0;  // [w^{-1/(r-1)}]_{A_{r'}^{rho,theta}}^{r-1}
  double residual = 0.0;
};

DualityReport duality_check(const WeightProfile& w, double r, double theta, const CriticalRadius& rho,
                            const BallFamily& fam, Exec exec = Exec::parallel);

// w(lambda B) / (lambda^{pn} [1 + lambda R / rho(d)]^{p' p theta} w(B))
double weight_growth_ratio(const ApBall& ab, const BallSpec& B, double lambda, double theta,
                           const CriticalRadius& rho);

struct GrowthReport {
  double sup_ratio = 0.0;
  BallSpec arg;
  double arg_lambda = 1.0;
  double weight_constant = 1.0;
  double fitted_C = 0.0;  // sup_ratio / [w]^{p/(p-1)}
  std::size_t samples = 0;
};

GrowthReport weight_growth_check(const WeightProfile& w, double p, double theta, const CriticalRadius& rho,
                                 const std::vector<BallSpec>& balls, const std::vector<double>& lambdas,
                                 double weight_constant);

// kinds: "power" |x|^a, "shifted-power" (1+|x|)^a, "near-extremal" |x|^{(1-delta) n (p-1)}
// (parameters are the deltas). theta and rho_finite select the admissible range of
// shifted powers.
std::vector<WeightProfile> make_weight_family(const std::string& kind, const std::vector<double>& params,
                                              GridPtr grid, double p, double theta = 0.0,
                                              bool rho_finite = false);

WeightProfile power_weight(GridPtr grid, double a);
WeightProfile shifted_power_weight(GridPtr grid, double a);

}  // namespace sqlab
