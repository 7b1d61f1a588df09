#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sqlab/maximal.hpp"
#include "sqlab/search.hpp"
#include "sqlab/weights.hpp"

namespace sqlab {

struct RdFConfig {
  double r = 3.0;
  double r0 = 2.0;
  double theta = 0.0;
  int K = 40;              // series truncation order
  double safety = 1.5;     // factor on the measured panel ratio
  int restarts = 3;        // doublings of the norm estimate before giving up
  double early_exit = 1e-8;  // stop once a term's norm falls below this times ||g||
  MaximalSearch search;     // empty radii: MaximalSearch::for_grid

  // (r - r0) / (r - 1)
  double s() const { return (r - r0) / (r - 1.0); }
  double gamma() const { return r * theta; }
  // exponent of the space the iteration acts on: r / (r - r0)
  double q() const { return r / (r - r0); }
  void validate() const;
};

// [M_gamma(g^{1/s} w) w^{-1}]^s with the adapted maximal function at theta = gamma.
// The input is rescaled to unit maximum before the powers are taken (the map is
// positively homogeneous of degree 1).
RadialProfile rdf_step(const RadialProfile& g, const RadialProfile& w, const CriticalRadius& rho,
                       const RdFConfig& cfg, Exec exec = Exec::parallel);

struct NormEstimate {
  double value = 0.0;     // the estimate used by the series
  double measured = 0.0;  // max panel ratio before the safety factor
  std::string source;
};

// max over the panel of ||R h|| / ||h|| in L^q(w), times the safety factor
NormEstimate estimate_rdf_norm(const std::vector<RadialProfile>& panel, const RadialProfile& w,
                               const CriticalRadius& rho, const RdFConfig& cfg, Exec exec = Exec::parallel);

// ten bumps of varying centre and width on the grid
std::vector<RadialProfile> rdf_panel(GridPtr grid);

struct RdFReport {
  double margin = 0.0;          // min over nodes of G - g
  double norm_g = 0.0;
  double norm_G = 0.0;
  double norm_ratio = 0.0;      // ||G|| / ||g|| in L^q(w)
  double residual = 0.0;        // geometric bound on the omitted terms, relative to ||g||
  double max_step_growth = 0.0; // max ||R^{k+1} g|| / ||R^k g||
  double fixed_point = 0.0;     // max over nodes of R(G) / (2 ||R|| G)
  NormEstimate norm;
  int terms = 0;
  int restarts = 0;
  // class transfer; NaN when not computed
  double gw_constant = 0.0;
  double w_constant = 0.0;
  double transfer_ratio = 0.0;
  Warnings warnings;
};

struct RdFResult {
  RadialProfile G;
  RdFReport report;
};

// sum_k R^k(g) / (2 ||R||)^k truncated at K, with per-step growth monitoring: a step
// growing by more than the norm estimate doubles the estimate and restarts.
RdFResult rdf_majorant(const RadialProfile& g, const RadialProfile& w, const CriticalRadius& rho,
                       const RdFConfig& cfg, const NormEstimate& norm, Exec exec = Exec::parallel);

// fills the transfer fields: [G w]_{A_{r0}^{rho,gamma}} against [w]_{A_r^{rho,theta}}
void rdf_transfer(RdFResult& res, const RadialProfile& w, const CriticalRadius& rho, const RdFConfig& cfg,
                  const BallFamily& fam, Exec exec = Exec::parallel);

struct ProbeRow {
  double param = 0.0;
  double w_const = 0.0;
  double ratio = 0.0;
};

struct ProbeFit {
  double p = 0.0;
  double theta = 0.0;
  double predicted = 0.0;  // eta max{1, (p0 - 1)/(p - 1)}
  FitResult fit;
  std::vector<ProbeRow> rows;
};

using RadialOperator = std::function<RadialProfile(const RadialProfile&)>;

// theta used at exponent p for an anchor class A_{p0}^{rho,gamma}
double extrapolation_theta(double gamma, double p0, double p);

// For each p: the weight constants [w]_{A_p^{rho,theta}} over the family and the worst
// panel ratio ||T f||_{L^p(w)} / ||f||_{L^p(w)}, fitted in log-log coordinates.
std::vector<ProbeFit> extrapolation_probe(const RadialOperator& T, double p0, double eta, double gamma,
                                          const std::vector<double>& ps,
                                          const std::function<std::vector<WeightProfile>(double p)>& family,
                                          const std::vector<RadialProfile>& panel, const CriticalRadius& rho,
                                          const BallFamily& fam, Exec exec = Exec::parallel);

}  // namespace sqlab
