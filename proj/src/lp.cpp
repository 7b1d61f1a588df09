#include "sqlab/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sqlab {

LpResult simplex_max(const std::vector<double>& c, const LpMatrix& A, const std::vector<double>& b,
                     std::size_t max_pivots) {
  const std::size_t m = A.rows, n = A.cols;
  if (c.size() != n || b.size() != m) throw std::invalid_argument("simplex: dimension mismatch");
  for (double v : b)
    if (v < 0.0) throw std::invalid_argument("simplex: right-hand side must be nonnegative");
  const double eps = 1e-11;
  // T[i][j]: row i < m holds x_basic(i) = T[i][n] - sum_j T[i][j] x_nonbasic(j); row m the objective
  const std::size_t W = n + 1;
  std::vector<double> T((m + 1) * W);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) T[i * W + j] = A(i, j);
    T[i * W + n] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) T[m * W + j] = -c[j];
  // variables 0..n-1 are structural, n..n+m-1 slacks
  std::vector<std::size_t> nonbasic(n), basic(m);
  for (std::size_t j = 0; j < n; ++j) nonbasic[j] = j;
  for (std::size_t i = 0; i < m; ++i) basic[i] = n + i;

  LpResult res;
  std::size_t degenerate = 0;
  for (;;) {
    const bool bland = degenerate > 50;
    std::size_t s = n;
    double best = -eps;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = T[m * W + j];
      if (d < -eps) {
        if (bland) {
          if (s == n || nonbasic[j] < nonbasic[s]) s = j;
        } else if (d < best) {
          best = d;
          s = j;
        }
      }
    }
    if (s == n) break;
    std::size_t r = m;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = T[i * W + s];
      if (a > eps) {
        const double q = T[i * W + n] / a;
        if (q < ratio - 1e-14 || (std::abs(q - ratio) <= 1e-14 && r < m && basic[i] < basic[r])) {
          ratio = q;
          r = i;
        }
      }
    }
    if (r == m) {
      res.status = LpStatus::unbounded;
      return res;
    }
    if (++res.pivots > max_pivots) {
      res.status = LpStatus::iteration_limit;
      break;
    }
    degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
    const double piv = T[r * W + s];
    double* R = &T[r * W];
    for (std::size_t j = 0; j <= n; ++j) R[j] /= piv;
    R[s] = 1.0 / piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      double* Ri = &T[i * W];
      const double f = Ri[s];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) Ri[j] -= f * R[j];
      Ri[s] = -f * R[s];
    }
    std::swap(basic[r], nonbasic[s]);
  }
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basic[i] < n) res.x[basic[i]] = T[i * W + n];
  res.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
  return res;
}

}  // namespace sqlab
