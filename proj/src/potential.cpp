#include "sqlab/potential.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <omp.h>

namespace sqlab {

CriticalRadius CriticalRadius::infinite(GridPtr g, bool flagged) {
  CriticalRadius c;
  c.grid_ = std::move(g);
  c.infinite_ = true;
  c.flagged_ = flagged;
  return c;
}

CriticalRadius CriticalRadius::from_samples(GridPtr g, std::vector<double> rho) {
  if (rho.size() != g->size()) throw std::domain_error("critical radius: size mismatch");
  for (double v : rho)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("critical radius must be positive and finite");
  CriticalRadius c;
  c.grid_ = std::move(g);
  c.rho_ = std::move(rho);
  return c;
}

double CriticalRadius::at(double r) const {
  if (infinite_) throw std::logic_error("critical radius is infinite");
  const auto& x = grid_->nodes();
  if (r >= x.back()) return rho_.back();
  const std::size_t i = grid_->locate(r);
  const double s = (r - x[i]) / (x[i + 1] - x[i]);
  return rho_[i] + s * (rho_[i + 1] - rho_[i]);
}

double CriticalRadius::min() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  return *std::min_element(rho_.begin(), rho_.end());
}

double CriticalRadius::max() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  return *std::max_element(rho_.begin(), rho_.end());
}

double k0_of(double c0, double q, int n) {
  return std::max((std::log2(c0) + 2.0 - n) / (2.0 - n / q), 1.0);
}

double n0_lower_bound_of(double c0, double q, int n) {
  return std::max((std::log2(c0) + n / q - n) / (2.0 - n / q), 0.0);
}

double PotentialProfile::k0() const { return k0_of(c0, q, V.grid->dim()); }
double PotentialProfile::n0_lower_bound() const { return n0_lower_bound_of(c0, q, V.grid->dim()); }

SupResult rh_search(const RadialProfile& V, double q, const BallFamily& fam, Warnings* warn, Exec exec) {
  RadialProfile Vq = V;
  for (auto& v : Vq.values) {
    if (v < 0.0) throw std::domain_error("potential must be nonnegative");
    v = std::pow(v, q);
  }
  if (V.head_exponent) Vq.head_exponent = q * *V.head_exponent;
  if (V.tail == Extension::power) Vq.tail_exponent = q * V.tail_exponent;
  const BallIntegrator a(V), b(Vq);
  auto f = [&](double d, double R) {
    const double m1 = a.average(d, R);
    if (!(m1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::pow(b.average(d, R), 1.0 / q) / m1;
  };
  auto res = ball_sup(fam, f, exec);
  if (warn && res.excluded > 0)
    warn->add("rh_constant: " + std::to_string(res.excluded) + " balls with zero potential mass excluded");
  return res;
}

double rh_constant(const RadialProfile& V, double q, const BallFamily& fam, Warnings* warn, Exec exec) {
  return rh_search(V, q, fam, warn, exec).value;
}

SupResult doubling_search(const RadialProfile& V, const BallFamily& fam, Warnings* warn, Exec exec) {
  const BallIntegrator a(V);
  std::atomic<std::size_t> zero{0};
  auto f = [&](double d, double R) {
    if (d + 2.0 * R > fam.reach) return std::numeric_limits<double>::quiet_NaN();
    const double m1 = a.ball(d, R);
    if (!(m1 > 0.0)) {
      ++zero;
      return std::numeric_limits<double>::quiet_NaN();
    }
    return a.ball(d, 2.0 * R) / m1;
  };
  auto res = ball_sup(fam, f, exec);
  if (warn && zero > 0)
    warn->add("doubling_constant: " + std::to_string(zero.load()) + " zero-mass balls excluded");
  return res;
}

double doubling_constant(const RadialProfile& V, const BallFamily& fam, Warnings* warn, Exec exec) {
  return doubling_search(V, fam, warn, exec).value;
}

RadiusResult critical_radius(const BallIntegrator& V, double x, double rel_tol) {
  const RadialProfile& h = V.profile();
  if (h.grid->dim() != 3) throw std::domain_error("critical radius needs n = 3");
  const double rm = h.grid->r_max();
  const double last = h.values.back();
  const bool growing = last > 0.0 && (h.tail == Extension::constant ||
                                      (h.tail == Extension::power && h.tail_exponent > -2.0));
  bool any_mass = false;
  for (double v : h.values) any_mass = any_mass || v > 0.0;
  RadiusResult out;
  if (!any_mass) {
    out.infinite = true;
    return out;
  }
  auto F = [&](double r) { return V.ball(x, r) / r; };
  const double horizon = growing ? 1e3 * (rm + x) : rm;
  const double ratio = 1.2;
  double r = 1e-7 * rm;
  double fr = F(r);
  while (fr > 1.0 && r > 1e-290) {
    r /= ratio;
    fr = F(r);
  }
  double lo = r, hi = -1.0;
  while (r < horizon) {
    const double rn = std::min(r * ratio, horizon);
    const double fn = F(rn);
    if (fr <= 1.0 && fn > 1.0) {
      lo = r;
      hi = rn;
    }
    r = rn;
    fr = fn;
    if (growing && hi > 0.0 && r > 2.0 * (rm + x) && fr > 1.0) break;
  }
  if (hi < 0.0 || fr <= 1.0) {
    out.infinite = true;
    out.flagged = true;
    return out;
  }
  while (hi - lo > rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) <= 1.0)
      lo = mid;
    else
      hi = mid;
  }
  out.value = lo;
  out.f_lo = F(lo);
  out.f_hi = F(hi);
  return out;
}

CriticalRadius critical_radius_profile(const RadialProfile& V, double rel_tol, Exec exec) {
  const BallIntegrator bi(V);
  const auto& x = V.grid->nodes();
  const std::size_t K = x.size();
  std::vector<RadiusResult> res(K);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < K; ++i) res[i] = critical_radius(bi, x[i], rel_tol);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < K; ++i) res[i] = critical_radius(bi, x[i], rel_tol);
  }
  std::size_t inf = 0;
  bool flagged = false;
  for (const auto& r : res) {
    inf += r.infinite;
    flagged = flagged || r.flagged;
  }
  if (inf == K) return CriticalRadius::infinite(V.grid, flagged);
  if (inf > 0) throw std::domain_error("critical radius is infinite at some nodes only");
  std::vector<double> rho(K);
  for (std::size_t i = 0; i < K; ++i) rho[i] = res[i].value;
  return CriticalRadius::from_samples(V.grid, std::move(rho));
}

ComparabilityReport shen_comparability_check(const CriticalRadius& rho, double N0,
                                             const std::vector<std::array<double, 2>>& pairs) {
  if (rho.is_infinite()) throw std::domain_error("comparability check needs a finite critical radius");
  ComparabilityReport rep;
  rep.N0 = N0;
  rep.pairs = pairs.size();
  for (const auto& p : pairs) {
    for (int swap = 0; swap < 2; ++swap) {
      const double a = swap ? p[1] : p[0], b = swap ? p[0] : p[1];
      const double ra = rho.at(a), rb = rho.at(b);
      const double base = 1.0 + std::abs(a - b) / ra;
      const double lower = ra * std::pow(base, -N0) / rb;
      const double upper = rb / (ra * std::pow(base, N0 / (N0 + 1.0)));
      const double c = std::max(lower, upper);
      if (c > rep.C) {
        rep.C = c;
        rep.worst_x = a;
        rep.worst_y = b;
      }
    }
  }
  return rep;
}

std::vector<std::array<double, 3>> ball_lattice(double R_dom, double spacing) {
  std::vector<std::array<double, 3>> pts;
  const int m = int(std::floor(R_dom / spacing));
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        const double x = i * spacing, y = j * spacing, z = k * spacing;
        if (x * x + y * y + z * z <= R_dom * R_dom) pts.push_back({x, y, z});
      }
  return pts;
}

namespace {
inline double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}
inline double norm3(const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
}  // namespace

int cover_overlap(const CriticalCover& cover, const std::vector<std::array<double, 3>>& pts, double sigma,
                  Exec exec) {
  const std::size_t P = pts.size(), C = cover.centers.size();
  int best = 0;
  auto count = [&](std::size_t i) {
    int c = 0;
    for (std::size_t j = 0; j < C; ++j)
      if (dist3(pts[i], cover.centers[j]) < sigma * cover.radii[j]) ++c;
    return c;
  };
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < P; ++i) best = std::max(best, count(i));
  } else {
#pragma omp parallel for reduction(max : best) schedule(static)
    for (std::size_t i = 0; i < P; ++i) best = std::max(best, count(i));
  }
  return best;
}

CriticalCover build_critical_cover(const CriticalRadius& rho, double R_dom, double sigma, double spacing,
                                   Exec exec) {
  if (rho.is_infinite()) throw std::domain_error("cover needs a finite critical radius");
  double rmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) rmin = std::min(rmin, rho.at(R_dom * i / 400.0));
  if (spacing <= 0.0) spacing = rmin / 4.0;
  if (spacing > rmin) throw std::domain_error("cover: lattice spacing exceeds the smallest critical radius");
  CriticalCover cov;
  cov.sigma = sigma;
  cov.spacing = spacing;
  const auto pts = ball_lattice(R_dom, spacing);
  const std::size_t P = pts.size();
  cov.samples = P;
  std::vector<double> near(P, std::numeric_limits<double>::infinity());
  std::vector<char> covered(P, 0);
  std::vector<double> rp(P);
  for (std::size_t i = 0; i < P; ++i) rp[i] = rho.at(norm3(pts[i]));
  std::size_t next = 0;
  for (std::size_t i = 1; i < P; ++i)
    if (norm3(pts[i]) < norm3(pts[next])) next = i;
  for (;;) {
    const auto c = pts[next];
    const double rad = rp[next];
    cov.centers.push_back(c);
    cov.radii.push_back(rad);
    auto update = [&](std::size_t i) {
      const double d = dist3(pts[i], c);
      near[i] = std::min(near[i], d);
      if (d < rad) covered[i] = 1;
    };
    if (exec == Exec::serial) {
      for (std::size_t i = 0; i < P; ++i) update(i);
    } else {
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < P; ++i) update(i);
    }
    double far = -1.0;
    std::size_t arg = P;
    for (std::size_t i = 0; i < P; ++i)
      if (!covered[i] && near[i] > far) {
        far = near[i];
        arg = i;
      }
    if (arg == P) break;
    next = arg;
  }
  std::size_t in = 0;
  for (std::size_t i = 0; i < P; ++i) {
    bool hit = false;
    for (std::size_t j = 0; j < cov.centers.size() && !hit; ++j) hit = dist3(pts[i], cov.centers[j]) < cov.radii[j];
    in += hit;
  }
  cov.coverage = double(in) / double(P);
  cov.overlap = cover_overlap(cov, pts, sigma, exec);
  return cov;
}

}  // namespace sqlab
