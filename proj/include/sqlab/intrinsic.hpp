#pragma once

#include <array>
#include <string>
#include <vector>

#include "sqlab/radial.hpp"

namespace sqlab {

enum class SupMethod { lp, dictionary };

struct IntrinsicConfig {
  double beta = 1.0;
  // kernel grid points per unit length (n = 1: the interval, n = 3: the meridional half-disk)
  int resolution = 0;  // 0 picks 32 for n = 1 and 6 for n = 3
  SupMethod method = SupMethod::dictionary;
  // Hoelder cones min((rho^beta - |z - c|^beta)_+, height, (1 - |z|)^beta) with centres on a
  // grid of this spacing (0 picks 0.125 for n = 1 and 0.25 for n = 3) and these radii;
  // dictionary kernels are their mean-zero pairwise combinations
  double cone_spacing = 0.0;
  std::vector<double> cone_radii{0.125, 0.25, 0.5, 1.0};
  // cones are also truncated at these fractions of their peak
  std::vector<double> cone_heights{1.0};
  // LP extremals of polynomial functionals with prescribed sign changes join the
  // dictionary: roots on a grid of this spacing, up to three roots along the axis
  // (n = 3: up to two, times an optional radial root); 0 picks 0.125 for n = 1 and
  // 0.25 for n = 3, negative disables
  double harvest_spacing = 0.0;
  // LP extremals of oscillatory functionals cos(omega |z - c| + phase), c on the axis
  // (and plane waves along it), join the dictionary for these angular frequencies
  std::vector<double> harvest_frequencies{3.0, 5.0, 8.0, 12.0, 16.0, 20.0, 24.0};
};

// Discretised unit ball. In n = 3 kernels are axially symmetric about the axis through
// the evaluation point; nodes are (axial, perpendicular) cell centres of the half-disk
// with ring volumes as weights.
struct KernelGrid {
  int dim = 1;
  double h = 0.0;
  std::vector<std::array<double, 2>> z;
  std::vector<double> w;
  std::vector<double> cap;  // (1 - |z|)^beta, the bound forced by the support condition

  static KernelGrid make(int dim, int resolution, double beta);
  std::size_t size() const { return z.size(); }
  double distance(std::size_t i, std::size_t j) const;
};

struct FeasibilityReport {
  double mean = 0.0;         // |sum w phi|
  double lipschitz = 0.0;    // max over pairs of |phi_i - phi_j| / d^beta
  double support = 0.0;      // max of |phi_i| / cap_i
  bool ok(double tol = 1e-9) const { return mean <= 1e-10 && lipschitz <= 1 + tol && support <= 1 + tol; }
};

class IntrinsicSup {
 public:
  IntrinsicSup(int dim, IntrinsicConfig cfg);

  const KernelGrid& grid() const { return grid_; }
  const IntrinsicConfig& config() const { return cfg_; }
  std::size_t dictionary_size() const { return pairs_.size() + extremals_.size(); }

  // g_i = w_i f(|y - t z_i|) for y at distance r from the origin
  std::vector<double> functional(const RadialProfile& f, double r, double t) const;
  // sup of |sum g_i phi_i| over the discrete class
  double lp_value(const std::vector<double>& g, std::vector<double>* phi = nullptr) const;
  double dictionary_value(const std::vector<double>& g) const;
  // value of the configured method at (y, t)
  double value(const RadialProfile& f, double r, double t) const;

  FeasibilityReport check(const std::vector<double>& phi) const;
  std::vector<double> dictionary_kernel(std::size_t k) const;

 private:
  void harvest();
  struct Pair {
    std::size_t a, b;
    double kappa, scale;  // scale (cone_a - kappa cone_b)
  };
  double beta_;
  IntrinsicConfig cfg_;
  KernelGrid grid_;
  std::vector<std::vector<double>> cones_;
  std::vector<Pair> pairs_;
  std::vector<std::vector<double>> extremals_;
  std::vector<std::array<std::size_t, 2>> near_;  // initial constraint pairs of the LP
};

// A_beta(f)(y, t) on every (node, time) of f's grid
RTField intrinsic_field(const IntrinsicSup& sup, const RadialProfile& f, const TimeGrid& times,
                        Exec exec = Exec::parallel);

}  // namespace sqlab
