#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sqlab/radial.hpp"

namespace sqlab {

// Tensor family of balls (d, R); d = 0 plus geometric centres, geometric radii.
// Balls with d + R > reach are skipped.
struct BallFamily {
  std::vector<double> d;
  std::vector<double> R;
  double reach = 0.0;

  static BallFamily tensor(double d_min, double d_max, std::size_t nd, double R_min, double R_max,
                           std::size_t nR, double reach);
  // inserts geometric midpoints; the result contains every ball of *this
  BallFamily refined() const;
  std::size_t count() const { return d.size() * R.size(); }
  std::string describe() const;
};

// value of the sup quantity on one ball, NaN when the ball is excluded
using BallObjective = std::function<double(double d, double R)>;

struct SupResult {
  double value = 0.0;
  BallSpec arg;
  double grid_value = 0.0;  // before local refinement
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  std::string family;
};

// Two-stage search: scan the tensor family, then coordinate descent in (d, log R)
// from the best ball, confined to the hull of the family. Ties resolve to the lowest family index.
SupResult ball_sup(const BallFamily& fam, const BallObjective& f, Exec exec = Exec::parallel,
                   bool refine = true);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// ordinary least squares of log y on log x
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sqlab
