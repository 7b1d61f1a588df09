#pragma once

#include <string>
#include <vector>

#include "sqlab/intrinsic.hpp"
#include "sqlab/potential.hpp"
#include "sqlab/semigroup.hpp"

namespace sqlab {

struct SquareFunctionField {
  RadialProfile values;
  std::string op;
  std::string quadrature;
  bool truncated = false;   // a cone section left the spatial grid
  double tail = 0.0;        // largest estimated relative contribution of what was cut off
  Warnings warnings;
};

// Time integrals of a field u(r, t) on its own grid.
// [factor * int |u(x, t)|^2 dt / t]^{1/2}; `decay` selects the tail model (1 when u ~ t
// near 0, 2 when u ~ t^2) and lambda1 the large-t decay rate (0 skips that estimate)
SquareFunctionField square_g(const RTField& u, double factor = 1.0, int decay = 1, double lambda1 = 0.0);
// [int int_{|x - y| < alpha t} |u(y, t)|^2 weight(|y|, t) dy dt / t^{n+1}]^{1/2}
SquareFunctionField square_cone(const RTField& u, double alpha, Exec exec = Exec::parallel,
                                const std::function<double(double, double)>& weight = nullptr);
// [int int (t / (t + |x - y|))^{lambda n} |u(y, t)|^2 dy dt / t^{n+1}]^{1/2} over the grid
SquareFunctionField square_gstar(const RTField& u, double lambda, Exec exec = Exec::parallel);

// integral of (t / (t + |x - y|))^a over the sphere |y| = s, |x| = r
double gstar_shell_weight(int n, double a, double t, double r, double s);

SquareFunctionField g_schrodinger(const EigenSystem& sys, const RadialProfile& f, const TimeGrid& times,
                                  Exec exec = Exec::parallel);
SquareFunctionField s_schrodinger(const EigenSystem& sys, const RadialProfile& f, double alpha,
                                  const TimeGrid& times, Exec exec = Exec::parallel);
SquareFunctionField gstar_schrodinger(const EigenSystem& sys, const RadialProfile& f, double lambda,
                                      const TimeGrid& times, Exec exec = Exec::parallel);
// unit-aperture cone with the factor [1 + t / rho(y)]^mu
SquareFunctionField stilde_schrodinger(const EigenSystem& sys, const RadialProfile& f, double mu,
                                       const CriticalRadius& rho, const TimeGrid& times,
                                       Exec exec = Exec::parallel);

// psi_t * f at every time node
RTField psi_field(const RadialProfile& f, const TimeGrid& times, Exec exec = Exec::parallel);
// sqrt(2) [int |psi_t * f|^2 dt / t]^{1/2}
SquareFunctionField g_classical(const RadialProfile& f, const TimeGrid& times, Exec exec = Exec::parallel);
SquareFunctionField s_classical(const RadialProfile& f, double alpha, const TimeGrid& times,
                                Exec exec = Exec::parallel);

// intrinsic square functions from A_beta on the (r, t) grid
SquareFunctionField g_intrinsic(const RTField& A);
SquareFunctionField G_intrinsic(const RTField& A, double alpha, Exec exec = Exec::parallel);
SquareFunctionField gstar_intrinsic(const RTField& A, double lambda, Exec exec = Exec::parallel);

// g* against the dyadic cone sum: C = sup_x g* / sum_{j <= J} 2^{-j lambda n / 2} S_{2^j},
// and the reverse one-term bound S_1 <= 2^{lambda n / 2} g*
struct AnnulusReport {
  double C = 0.0;
  double reverse_worst = 0.0;  // max of S_1 / (2^{lambda n / 2} g*)
  int J = 0;
};
AnnulusReport dyadic_annulus_check(const RTField& u, double lambda, int J, Exec exec = Exec::parallel);

struct LocalizedSquareFunctions {
  SquareFunctionField g_loc;     // g_{-Delta}(f 1_{B(x, rho(x))})(x)
  SquareFunctionField s_loc;     // S_{-Delta, alpha}(f 1_{B(x, 2 rho(x))})(x)
  SquareFunctionField gL_loc;    // g_L(f 1_{B(x, rho(x))})(x)
  SquareFunctionField gL_glob;   // g_L(f 1_{B(x, rho(x))^c})(x)
  bool has_gL = false;
};

// Truncation happens per node. g_loc is exact through on-axis sphere integrals. In
// n = 3 s_loc samples the truncated convolution on the axis through 0 and x and
// weights each sample by its cone cross-section. The g_L pair needs the kernel of
// e^{-tL} off the radial sector, available here only for a constant potential V = c
// (e^{-tL} = e^{-ct} e^{t Delta}); it is skipped otherwise.
LocalizedSquareFunctions localized_squarefns(const RadialProfile& f, const CriticalRadius& rho, double alpha,
                                             const TimeGrid& times, const EigenSystem* sys = nullptr,
                                             Exec exec = Exec::parallel);

}  // namespace sqlab
