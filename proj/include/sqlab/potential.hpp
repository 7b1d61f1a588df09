#pragma once

#include <array>
#include <string>
#include <vector>

#include "sqlab/radial.hpp"
#include "sqlab/search.hpp"

namespace sqlab {

struct Warnings {
  std::vector<std::string> items;
  void add(std::string s) { items.push_back(std::move(s)); }
};

// Critical radius sampled on the grid nodes, or the tagged infinite value.
class CriticalRadius {
 public:
  static CriticalRadius infinite(GridPtr g, bool flagged = false);
  static CriticalRadius from_samples(GridPtr g, std::vector<double> rho);

  bool is_infinite() const { return infinite_; }
  // set when the infinite tag came from an ambiguous (zero-valued) tail
  bool flagged() const { return flagged_; }
  // linear interpolation in the centre distance; throws when infinite
  double at(double r) const;
  const std::vector<double>& samples() const { return rho_; }
  const GridPtr& grid() const { return grid_; }
  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> rho_;
  bool infinite_ = false;
  bool flagged_ = false;
};

struct PotentialProfile {
  RadialProfile V;
  double q = 10.0;      // declared reverse Holder exponent, q > n/2
  double c_rh = 1.0;    // fitted reverse Holder constant
  double c0 = 1.0;      // fitted doubling constant

  double k0() const;
  // admissible exponents in the comparability lemma are those above this bound
  double n0_lower_bound() const;
};

double k0_of(double c0, double q, int n);
double n0_lower_bound_of(double c0, double q, int n);

// sup over the family of avg(V^q)^{1/q} / avg(V)
double rh_constant(const RadialProfile& V, double q, const BallFamily& fam, Warnings* warn = nullptr,
                   Exec exec = Exec::parallel);
SupResult rh_search(const RadialProfile& V, double q, const BallFamily& fam, Warnings* warn = nullptr,
                    Exec exec = Exec::parallel);

// sup over the family of V(B(x, 2r)) / V(B(x, r)); balls whose double leaves the reach are skipped
SupResult doubling_search(const RadialProfile& V, const BallFamily& fam, Warnings* warn = nullptr,
                          Exec exec = Exec::parallel);
double doubling_constant(const RadialProfile& V, const BallFamily& fam, Warnings* warn = nullptr,
                         Exec exec = Exec::parallel);

struct RadiusResult {
  double value = 0.0;
  bool infinite = false;
  bool flagged = false;
  double f_lo = 0.0;  // r^{2-n} V(B(x, r)) at the returned radius
  double f_hi = 0.0;  // same quantity just above it
};

// sup{r : r^{2-n} V(B(x, r)) <= 1} for n = 3, by scan plus bisection
RadiusResult critical_radius(const BallIntegrator& V, double x_dist, double rel_tol = 1e-8);
CriticalRadius critical_radius_profile(const RadialProfile& V, double rel_tol = 1e-8,
                                       Exec exec = Exec::parallel);

struct ComparabilityReport {
  double C = 1.0;
  double N0 = 0.0;
  double worst_x = 0.0, worst_y = 0.0;
  std::size_t pairs = 0;
};

// smallest C for which both comparability inequalities hold on the sampled radii pairs,
// using the minimal distance ||x| - |y|| between points at those radii
ComparabilityReport shen_comparability_check(const CriticalRadius& rho, double N0,
                                             const std::vector<std::array<double, 2>>& pairs);

struct CriticalCover {
  std::vector<std::array<double, 3>> centers;
  std::vector<double> radii;
  double sigma = 1.0;
  double spacing = 0.0;
  std::size_t samples = 0;
  double coverage = 0.0;  // fraction of sample points inside some ball
  int overlap = 0;        // max over samples of the number of sigma-dilated balls containing it
};

// quasi-uniform cubic lattice of B(0, R_dom) with the given spacing
std::vector<std::array<double, 3>> ball_lattice(double R_dom, double spacing);

// Greedy farthest-point cover by balls B(x, rho(x)).
CriticalCover build_critical_cover(const CriticalRadius& rho, double R_dom, double sigma,
                                   double spacing = 0.0, Exec exec = Exec::parallel);
int cover_overlap(const CriticalCover& cover, const std::vector<std::array<double, 3>>& pts, double sigma,
                  Exec exec = Exec::parallel);

}  // namespace sqlab
