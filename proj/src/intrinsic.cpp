#include "sqlab/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqlab/lp.hpp"

namespace sqlab {

KernelGrid KernelGrid::make(int dim, int resolution, double beta) {
  if (dim != 1 && dim != 3) throw std::domain_error("intrinsic kernels: n must be 1 or 3");
  if (resolution < 2) throw std::domain_error("intrinsic kernels: resolution must be at least 2");
  KernelGrid g;
  g.dim = dim;
  g.h = 1.0 / resolution;
  const int m = 2 * resolution;
  for (int i = 0; i < m; ++i) {
    const double a = -1.0 + (i + 0.5) * g.h;
    if (dim == 1) {
      g.z.push_back({a, 0.0});
      g.w.push_back(g.h);
      continue;
    }
    for (int j = 0; j < resolution; ++j) {
      const double b = (j + 0.5) * g.h;
      if (a * a + b * b >= 1.0) continue;
      g.z.push_back({a, b});
      g.w.push_back(2.0 * kPi * b * g.h * g.h);
    }
  }
  for (const auto& p : g.z) g.cap.push_back(std::pow(1.0 - std::hypot(p[0], p[1]), beta));
  return g;
}

double KernelGrid::distance(std::size_t i, std::size_t j) const {
  return std::hypot(z[i][0] - z[j][0], z[i][1] - z[j][1]);
}

IntrinsicSup::IntrinsicSup(int dim, IntrinsicConfig cfg) : beta_(cfg.beta), cfg_(std::move(cfg)) {
  if (!(beta_ > 0.0 && beta_ <= 1.0)) throw std::domain_error("intrinsic: beta must lie in (0, 1]");
  if (cfg_.resolution == 0) cfg_.resolution = dim == 1 ? 32 : 6;
  if (cfg_.cone_spacing == 0.0) cfg_.cone_spacing = dim == 1 ? 0.125 : 0.25;
  if (cfg_.harvest_spacing == 0.0) cfg_.harvest_spacing = dim == 1 ? 0.125 : 0.25;
  grid_ = KernelGrid::make(dim, cfg_.resolution, beta_);
  const std::size_t N = grid_.size();

  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (grid_.distance(i, j) <= 1.5 * grid_.h) near_.push_back({i, j});

  const double s = cfg_.cone_spacing;
  const int k = int(std::floor((1.0 - 1e-12) / s));
  std::vector<std::array<double, 2>> centres;
  for (int i = -k; i <= k; ++i)
    for (int j = 0; j <= (dim == 1 ? 0 : k); ++j) {
      const double a = i * s, b = j * s;
      if (a * a + b * b < 1.0) centres.push_back({a, b});
    }
  std::vector<double> mass;
  auto add_basis = [&](std::vector<double> v) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m += grid_.w[i] * v[i];
    if (m <= 0.0) return;
    cones_.push_back(std::move(v));
    mass.push_back(m);
  };
  for (const auto& c : centres)
    for (double rho : cfg_.cone_radii)
      for (double top : cfg_.cone_heights) {
        std::vector<double> v(N);
        for (std::size_t i = 0; i < N; ++i) {
          const double d = std::hypot(grid_.z[i][0] - c[0], grid_.z[i][1] - c[1]);
          const double cone = std::max(0.0, std::pow(rho, beta_) - std::pow(d, beta_));
          v[i] = std::min({cone, top * std::pow(rho, beta_), grid_.cap[i]});
        }
        add_basis(std::move(v));
      }
  if (cones_.size() < 2) throw std::domain_error("intrinsic: dictionary is empty");
  std::vector<double> phi(N);
  for (std::size_t a = 0; a < cones_.size(); ++a)
    for (std::size_t b = 0; b < cones_.size(); ++b) {
      if (a == b) continue;
      const double kappa = mass[a] / mass[b];
      double size = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        phi[i] = cones_[a][i] - kappa * cones_[b][i];
        size = std::max(size, cones_[a][i]);
      }
      const auto rep = check(phi);
      const double worst = std::max(rep.lipschitz, rep.support);
      // proportional cones on the grid leave only rounding noise
      if (worst > 1e-9 * size) pairs_.push_back({a, b, kappa, 1.0 / worst});
    }
  if (cfg_.harvest_spacing > 0.0) harvest();
}

void IntrinsicSup::harvest() {
  const std::size_t N = grid_.size();
  const double s = cfg_.harvest_spacing;
  std::vector<double> roots;
  for (int i = -int(std::floor((1.0 - 1e-12) / s)); i * s < 1.0 - 1e-12; ++i) roots.push_back(i * s);
  std::vector<std::vector<double>> axial;  // root sets along the axis
  const std::size_t R = roots.size();
  for (std::size_t i = 0; i < R; ++i) {
    axial.push_back({roots[i]});
    for (std::size_t j = i + 1; j < R; ++j) {
      axial.push_back({roots[i], roots[j]});
      if (grid_.dim == 1 && (i % 2 == 0) && (j % 2 == 0))
        for (std::size_t k = j + 2; k < R; k += 2) axial.push_back({roots[i], roots[j], roots[k]});
    }
  }
  std::vector<double> shells{0.0};
  if (grid_.dim == 3)
    for (double r : roots)
      if (r > 0.0) shells.push_back(r);
  std::vector<double> g(N), phi;
  for (const auto& set : axial)
    for (double shell : shells) {
      for (std::size_t i = 0; i < N; ++i) {
        double v = grid_.w[i];
        for (double c : set) v *= grid_.z[i][0] - c;
        if (shell > 0.0) v *= std::hypot(grid_.z[i][0], grid_.z[i][1]) - shell;
        g[i] = v;
      }
      if (lp_value(g, &phi) > 0.0) extremals_.push_back(phi);
    }
  // oscillatory functionals: many sign changes, out of reach of the polynomial ones
  const double kPlane = std::numeric_limits<double>::infinity();
  std::vector<double> centres{kPlane};
  if (grid_.dim == 3)
    for (double c : {-1.0, -0.5, 0.0, 0.5, 1.0}) centres.push_back(c);
  for (double omega : cfg_.harvest_frequencies)
    for (double c : centres)
      for (int ph = 0; ph < 4; ++ph) {
        for (std::size_t i = 0; i < N; ++i) {
          const double x = c == kPlane ? grid_.z[i][0] : std::hypot(grid_.z[i][0] - c, grid_.z[i][1]);
          g[i] = grid_.w[i] * std::cos(omega * x + ph * kPi / 4);
        }
        if (lp_value(g, &phi) > 0.0) extremals_.push_back(phi);
      }
}

std::vector<double> IntrinsicSup::dictionary_kernel(std::size_t k) const {
  if (k >= pairs_.size()) return extremals_.at(k - pairs_.size());
  const auto& p = pairs_.at(k);
  std::vector<double> phi(grid_.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = p.scale * (cones_[p.a][i] - p.kappa * cones_[p.b][i]);
  return phi;
}

FeasibilityReport IntrinsicSup::check(const std::vector<double>& phi) const {
  FeasibilityReport r;
  const std::size_t N = grid_.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    mean += grid_.w[i] * phi[i];
    r.support = std::max(r.support, std::abs(phi[i]) / grid_.cap[i]);
    for (std::size_t j = i + 1; j < N; ++j)
      r.lipschitz = std::max(r.lipschitz, std::abs(phi[i] - phi[j]) / std::pow(grid_.distance(i, j), beta_));
  }
  r.mean = std::abs(mean);
  return r;
}

std::vector<double> IntrinsicSup::functional(const RadialProfile& f, double r, double t) const {
  std::vector<double> g(grid_.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = r - t * grid_.z[i][0], b = t * grid_.z[i][1];
    g[i] = grid_.w[i] * f(std::hypot(a, b));
  }
  return g;
}

double IntrinsicSup::dictionary_value(const std::vector<double>& g) const {
  std::vector<double> d(cones_.size());
  for (std::size_t k = 0; k < cones_.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * cones_[k][i];
    d[k] = acc;
  }
  double best = 0.0;
  for (const auto& p : pairs_) best = std::max(best, p.scale * std::abs(d[p.a] - p.kappa * d[p.b]));
  for (const auto& phi : extremals_) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * phi[i];
    best = std::max(best, std::abs(acc));
  }
  return best;
}

double IntrinsicSup::lp_value(const std::vector<double>& g, std::vector<double>* phi_out) const {
  const std::size_t N = grid_.size();
  // the mean-zero condition eliminates the node of largest weight
  const std::size_t e = std::size_t(std::max_element(grid_.w.begin(), grid_.w.end()) - grid_.w.begin());
  std::vector<double> a(N);
  for (std::size_t i = 0; i < N; ++i) a[i] = grid_.w[i] / grid_.w[e];
  // free variables phi_i (i != e) split as p - m: column 2 v and 2 v + 1
  std::vector<std::size_t> col(N, 0);
  for (std::size_t i = 0, v = 0; i < N; ++i)
    if (i != e) col[i] = v++;
  const std::size_t V = N - 1;

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto add_row = [&](const std::vector<std::pair<std::size_t, double>>& terms, double bound) {
    std::vector<double> coef(V, 0.0);
    for (const auto& [i, c] : terms) {
      if (i == e) {
        for (std::size_t j = 0; j < N; ++j)
          if (j != e) coef[col[j]] -= c * a[j];
      } else {
        coef[col[i]] += c;
      }
    }
    rows.push_back(std::move(coef));
    rhs.push_back(bound);
  };
  for (std::size_t i = 0; i < N; ++i) {
    add_row({{i, 1.0}}, grid_.cap[i]);
    add_row({{i, -1.0}}, grid_.cap[i]);
  }
  auto add_pair = [&](std::size_t i, std::size_t j) {
    const double d = std::pow(grid_.distance(i, j), beta_);
    add_row({{i, 1.0}, {j, -1.0}}, d);
    add_row({{i, -1.0}, {j, 1.0}}, d);
  };
  for (const auto& p : near_) add_pair(p[0], p[1]);

  std::vector<double> c(2 * V, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (i == e) continue;
    const double v = g[i] - g[e] * a[i];
    c[2 * col[i]] = v;
    c[2 * col[i] + 1] = -v;
  }
  std::vector<double> phi(N);
  for (int round = 0; round < 50; ++round) {
    LpMatrix A;
    A.rows = rows.size();
    A.cols = 2 * V;
    A.a.assign(A.rows * A.cols, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < V; ++j) {
        A(r, 2 * j) = rows[r][j];
        A(r, 2 * j + 1) = -rows[r][j];
      }
    const auto res = simplex_max(c, A, rhs);
    if (res.status != LpStatus::optimal) throw std::runtime_error("intrinsic LP did not reach an optimum");
    double last = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      if (i != e) {
        phi[i] = res.x[2 * col[i]] - res.x[2 * col[i] + 1];
        last -= a[i] * phi[i];
      }
    phi[e] = last;
    // constraint generation over all pairs
    std::size_t added = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) {
        const double d = std::pow(grid_.distance(i, j), beta_);
        if (std::abs(phi[i] - phi[j]) > d * (1 + 1e-9) + 1e-12) {
          add_pair(i, j);
          ++added;
        }
      }
    if (added == 0) {
      if (phi_out) *phi_out = phi;
      double v = 0.0;
      for (std::size_t i = 0; i < N; ++i) v += g[i] * phi[i];
      return std::abs(v);
    }
  }
  throw std::runtime_error("intrinsic LP: constraint generation did not settle");
}

double IntrinsicSup::value(const RadialProfile& f, double r, double t) const {
  const auto g = functional(f, r, t);
  return cfg_.method == SupMethod::lp ? lp_value(g) : dictionary_value(g);
}

RTField intrinsic_field(const IntrinsicSup& sup, const RadialProfile& f, const TimeGrid& times, Exec exec) {
  const std::size_t K = f.size(), M = times.size();
  RTField out{f.grid, times, std::vector<double>(K * M, 0.0)};
  const auto& x = f.grid->nodes();
  auto body = [&](std::size_t i) {
    for (std::size_t j = 0; j < M; ++j) out.data[j * K + i] = sup.value(f, x[i], times.node(j));
  };
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < K; ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < long(K); ++i) body(std::size_t(i));
  }
  return out;
}

}  // namespace sqlab
