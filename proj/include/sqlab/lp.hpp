#pragma once

#include <cstddef>
#include <vector>

namespace sqlab {

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

// Dense row-major constraint matrix.
struct LpMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// maximise c.x subject to A x <= b, x >= 0, for b >= 0 so that the origin is a
// feasible vertex. Condensed-tableau simplex, steepest reduced cost with a switch
// to Bland's rule after a run of degenerate pivots.
LpResult simplex_max(const std::vector<double>& c, const LpMatrix& A, const std::vector<double>& b,
                     std::size_t max_pivots = 200000);

}  // namespace sqlab
