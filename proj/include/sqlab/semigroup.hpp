#pragma once

#include <array>
#include <string>
#include <vector>

#include "sqlab/heat.hpp"
#include "sqlab/potential.hpp"

namespace sqlab {

// Spectral realisation of L = -Delta + V on radial functions in R^3 through v = r u:
// -v'' + V v on (0, r_max) with Dirichlet ends, second-order differences on a uniform
// grid. Eigenvalues carry the a-posteriori correction (h^2/12) sum (V - lambda)^2 q^2,
// which removes the leading O(h^2) error.
struct EigenSystem {
  double r_max = 24.0;
  double h = 0.0;
  std::vector<double> r;          // interior nodes r_i = i h, i = 1..points
  std::vector<double> potential;  // V(r_i)
  std::vector<double> lambda;     // corrected eigenvalues, ascending
  std::vector<double> raw_lambda; // eigenvalues of the difference matrix
  std::vector<double> vectors;    // column-major points x kmax, unit l2 columns
  std::string potential_tag;

  std::size_t points() const { return r.size(); }
  std::size_t kmax() const { return lambda.size(); }
  const double* vec(std::size_t k) const { return vectors.data() + k * points(); }
  // max |Q^T Q - I|
  double orthonormality_defect() const;
  // radial eigenfunction phi_k(r) normalised in L^2(R^3); one-sided limit at r = 0
  double eigenfunction(std::size_t k, double r) const;
  RadialProfile eigenfunction_profile(std::size_t k, GridPtr grid) const;
  std::string describe() const;
};

EigenSystem build_eigensystem(const RadialProfile& V, double r_max = 24.0, std::size_t points = 4096,
                              std::size_t kmax = 600);

// Spectral multipliers m(t, lambda).
enum class Multiplier {
  semigroup,    // e^{-t lambda}
  g_integrand,  // t lambda e^{-t lambda}
  s_integrand,  // t^2 lambda e^{-t^2 lambda}
};

std::string to_string(Multiplier m);
double multiplier_value(Multiplier m, double t, double lambda);

// sum_k m(t, lambda_k) <f, phi_k> phi_k at the difference nodes; u holds f(r_i)
std::vector<double> apply_on_nodes(const EigenSystem& sys, const std::vector<double>& u, double t,
                                   Multiplier m);

// fraction of the l2 mass of r f outside the truncated eigenbasis
double spectral_tail_mass(const EigenSystem& sys, const RadialProfile& f);

RadialProfile schrodinger_apply(const EigenSystem& sys, const RadialProfile& f, double t, Multiplier m,
                                Warnings* warn = nullptr);

struct HeatField {
  RTField field;
  Multiplier op = Multiplier::semigroup;
  double tail_mass = 0.0;
  Warnings warnings;
};

// fields on f's grid at every time node; the parallel path assembles with one matrix product
HeatField schrodinger_field(const EigenSystem& sys, const RadialProfile& f, const TimeGrid& times, Multiplier m,
                            Exec exec = Exec::parallel);

// spectral tail tolerance attached to applications
constexpr double kSpectralTailTolerance = 1e-6;

// Kernel of m(t, L) restricted to radial functions: the mean of K_t(x, y) over the
// sphere |y| = s at |x| = r.
double radial_kernel(const EigenSystem& sys, double t, double r, double s, Multiplier m = Multiplier::semigroup);
// d/dt of the semigroup kernel
double radial_kernel_dt(const EigenSystem& sys, double t, double r, double s);

struct KernelSample {
  double t, r, s;
};

struct KernelFit {
  int k = 0;
  double N = 0.0;
  double C = 0.0;  // in units of (4 pi t)^{-3/2} t^{-k}
  double c = 0.0;
  KernelSample worst{0, 0, 0};
  std::size_t used = 0;
  std::size_t excluded = 0;
  Warnings warnings;
};

// Fits the bound |d^k_t K_t| <= C (4 pi t)^{-3/2} t^{-k} e^{-c |r - s|^2 / t}
// [1 + sqrt(t)/rho(r) + sqrt(t)/rho(s)]^{-N}: for each c on a grid the smallest C is the
// sample sup; the reported c is the largest grid value (step 1/256) that keeps C at
// the c = 0 constant to 0.1%, so C is minimal and c the best decay at that C.
KernelFit kernel_bound_check(const EigenSystem& sys, int k, double N, const CriticalRadius& rho,
                             const std::vector<KernelSample>& samples);

}  // namespace sqlab
