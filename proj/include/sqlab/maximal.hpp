#pragma once

#include <string>
#include <vector>

#include "sqlab/heat.hpp"
#include "sqlab/potential.hpp"

namespace sqlab {

struct MaximalField {
  RadialProfile values;
  std::string op;
  std::string search;
  std::size_t truncated = 0;  // nodes whose cone sample left the grid
};

// Balls containing a node at radius r are parametrised by R and the signed centre
// offset u in (-1, 1): the centre sits at |r + u R| on the ray through the node.
struct MaximalSearch {
  std::vector<double> R;
  int offsets = 21;
  bool refine = true;

  static MaximalSearch geometric(double R_min, double R_max, std::size_t nR, int offsets = 21);
  // radii from r_1 / 2 to 4 r_max, twelve per decade
  static MaximalSearch for_grid(const RadialGrid& g);
  std::string describe() const;
};

// sup over balls B containing x of Psi_theta(B)^{-1} |B|^{-1} int_B |f|
MaximalField hl_maximal(const RadialProfile& f, const MaximalSearch& search, Exec exec = Exec::parallel);
MaximalField adapted_maximal(const RadialProfile& f, double theta, const CriticalRadius& rho,
                             const MaximalSearch& search, Exec exec = Exec::parallel);

// sup over tau of |e^{tau Delta} f(x)|
MaximalField heat_radial_maximal(const RadialProfile& f, const TimeGrid& taus, Exec exec = Exec::parallel);
// sup over |x - y| < alpha t of |e^{t^2 Delta} f(y)|: grid nodes inside the cone
// section plus its two boundary points
MaximalField heat_nontangential_maximal(const RadialProfile& f, double alpha, const TimeGrid& times,
                                        Exec exec = Exec::parallel);

// default time samples: tau in [1e-4, 1e4] for the radial and t in [1e-2, 1e2] for the cone
TimeGrid maximal_taus();
TimeGrid maximal_times();

// e^{tau Delta}(f 1_{B(x, b)})(y) for y on the ray through x at signed position
// lambda (|x| = r); exact inner sphere integrals through the s f(s) antiderivative
double truncated_heat_on_axis(const BallIntegrator& f, double r, double b, double lambda, double tau);

struct LocalizedMaximals {
  MaximalField radial;          // R(f 1_{B(x, rho(x))})(x)
  MaximalField nontangential;   // M*_alpha(f 1_{B(x, 2 rho(x))})(x)
};

// In n = 3 the cone sup runs over points of the cone on the axis through 0 and x,
// where the truncated integrand keeps its axial symmetry (a lower bound for the
// full cone, exact for the radial operator). The infinite radius returns the
// unlocalised operators.
LocalizedMaximals localized_maximals(const RadialProfile& f, const CriticalRadius& rho, double alpha,
                                     const TimeGrid& taus, const TimeGrid& times, Exec exec = Exec::parallel);

}  // namespace sqlab
