#pragma once
// Independent brute-force references used to freeze expected values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace oracle {

constexpr double pi = 3.14159265358979323846;

struct Vec3 {
  double x, y, z;
};

inline Vec3 unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Vec3 v{g(rng), g(rng), g(rng)};
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (n > 1e-12) return {v.x / n, v.y / n, v.z / n};
  }
}

// area of {|y| = s} inside B((d,0,0), R) by uniform sampling of the sphere
inline double sphere_cap_area(double d, double R, double s, long N, unsigned seed) {
  std::mt19937_64 rng(seed);
  long in = 0;
  for (long i = 0; i < N; ++i) {
    const Vec3 u = unit_vector(rng);
    const double dx = s * u.x - d, dy = s * u.y, dz = s * u.z;
    if (dx * dx + dy * dy + dz * dz < R * R) ++in;
  }
  return 4.0 * pi * s * s * double(in) / double(N);
}

// integral of h(|y|) over B((d,0,0), R) by uniform sampling of the ball
inline double ball_integral(const std::function<double(double)>& h, double d, double R, long N,
                            unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double acc = 0.0;
  long taken = 0;
  while (taken < N) {
    const double x = u(rng), y = u(rng), z = u(rng);
    if (x * x + y * y + z * z >= 1.0) continue;
    ++taken;
    const double px = d + R * x, py = R * y, pz = R * z;
    acc += h(std::sqrt(px * px + py * py + pz * pz));
  }
  return 4.0 * pi / 3.0 * R * R * R * acc / double(N);
}

// convolution of a radial f with the Gaussian heat kernel at |x| = r, by sampling
// the kernel as a normal distribution with variance 2t per coordinate
inline double heat_convolution(const std::function<double(double)>& f, double r, double t, long N,
                               unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(2.0 * t));
  double acc = 0.0;
  for (long i = 0; i < N; ++i) {
    const double x = r + g(rng), y = g(rng), z = g(rng);
    acc += f(std::sqrt(x * x + y * y + z * z));
  }
  return acc / double(N);
}

// midpoint Riemann sum in Cartesian cells of a ball integral
inline double riemann_ball(const std::function<double(double)>& h, double d, double R, int cells) {
  const double step = 2.0 * R / cells;
  double acc = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double x = -R + (i + 0.5) * step;
    for (int j = 0; j < cells; ++j) {
      const double y = -R + (j + 0.5) * step;
      for (int k = 0; k < cells; ++k) {
        const double z = -R + (k + 0.5) * step;
        if (x * x + y * y + z * z >= R * R) continue;
        const double px = d + x;
        acc += h(std::sqrt(px * px + y * y + z * z));
      }
    }
  }
  return acc * step * step * step;
}

// ball integral of a radial h by composite Simpson over sphere slices |y| = s,
// with the cap area written as 2 pi s^2 (1 - cos) evaluated directly
inline double ball_by_slices(const std::function<double(double)>& h, double d, double R, int panels = 400) {
  auto cap = [&](double s) {
    if (s <= 0.0) return 0.0;
    if (s + d <= R) return 4.0 * pi * s * s;
    if (s >= d + R || s <= d - R) return 0.0;
    const double c = (s * s + d * d - R * R) / (2.0 * s * d);
    return 2.0 * pi * s * s * (1.0 - c);
  };
  auto simpson = [&](double a, double b) {
    if (b <= a) return 0.0;
    const double step = (b - a) / panels;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double x0 = a + i * step, x1 = x0 + step, xm = 0.5 * (x0 + x1);
      acc += step / 6.0 * (h(x0) * cap(x0) + 4.0 * h(xm) * cap(xm) + h(x1) * cap(x1));
    }
    return acc;
  };
  const double lo = std::abs(R - d);
  return simpson(0.0, R > d ? R - d : 0.0) + simpson(lo, R + d);
}

}  // namespace oracle

namespace oracle {

// closed-form integral of |x|^a over [lo, hi] on the line, a > -1
inline double power_integral_1d(double a, double lo, double hi) {
  auto F = [&](double x) { return (x < 0 ? -1.0 : 1.0) * std::pow(std::abs(x), a + 1) / (a + 1); };
  return F(hi) - F(lo);
}

// classical A_p quantity of |x|^a on the interval (c - R, c + R)
inline double power_ap_1d(double a, double p, double c, double R) {
  const double lo = c - R, hi = c + R, L = 2 * R;
  const double w = power_integral_1d(a, lo, hi) / L;
  const double s = power_integral_1d(-a / (p - 1), lo, hi) / L;
  return w * std::pow(s, p - 1);
}

// the quantity depends only on c / R; dense scan of that ratio
inline double power_ap_1d_sup(double a, double p, double t_max = 20.0, int steps = 400000) {
  double best = 0.0;
  for (int i = 0; i <= steps; ++i) best = std::max(best, power_ap_1d(a, p, t_max * i / steps, 1.0));
  return best;
}

}  // namespace oracle

#include <vector>

namespace oracle {

// Crank-Nicolson for v_t = v'' - V v, v = r u, on a uniform grid over (0, R) with
// Dirichlet ends; returns u at r = i R / (N + 1), i = 1..N
inline std::vector<double> crank_nicolson(const std::function<double(double)>& V,
                                          const std::function<double(double)>& f, double R, int N, double t,
                                          int steps) {
  const double h = R / (N + 1), dt = t / steps, a = dt / (2 * h * h);
  std::vector<double> v(N), Vn(N);
  for (int i = 0; i < N; ++i) {
    const double r = h * (i + 1);
    v[i] = r * f(r);
    Vn[i] = V(r);
  }
  std::vector<double> rhs(N), c(N), d(N);
  for (int s = 0; s < steps; ++s) {
    for (int i = 0; i < N; ++i) {
      const double l = i > 0 ? v[i - 1] : 0.0, rr = i + 1 < N ? v[i + 1] : 0.0;
      rhs[i] = v[i] + a * (l - 2 * v[i] + rr) - 0.5 * dt * Vn[i] * v[i];
    }
    // Thomas algorithm for (1 + 2a + dt V / 2) on the diagonal, -a off it
    for (int i = 0; i < N; ++i) {
      const double diag = 1 + 2 * a + 0.5 * dt * Vn[i];
      const double denom = i > 0 ? diag + a * c[i - 1] : diag;
      c[i] = -a / denom;
      d[i] = (rhs[i] + (i > 0 ? a * d[i - 1] : 0.0)) / denom;
    }
    for (int i = N - 1; i >= 0; --i) v[i] = d[i] - (i + 1 < N ? c[i] * v[i + 1] : 0.0);
  }
  std::vector<double> u(N);
  for (int i = 0; i < N; ++i) u[i] = v[i] / (h * (i + 1));
  return u;
}

// Dirichlet eigenvalues of -v'' + V v on (0, R) by RK4 shooting and bisection; the
// first `count` values
inline std::vector<double> shooting_eigenvalues(const std::function<double(double)>& V, double R, int count,
                                                double lambda_step = 0.05, double dr = 1e-3) {
  auto end_value = [&](double lam) {
    double v = 0.0, w = 1.0;
    const int n = int(R / dr);
    const double step = R / n;
    auto acc = [&](double r, double vv) { return (V(r) - lam) * vv; };
    for (int i = 0; i < n; ++i) {
      const double r = i * step;
      const double k1v = w, k1w = acc(r, v);
      const double k2v = w + 0.5 * step * k1w, k2w = acc(r + 0.5 * step, v + 0.5 * step * k1v);
      const double k3v = w + 0.5 * step * k2w, k3w = acc(r + 0.5 * step, v + 0.5 * step * k2v);
      const double k4v = w + step * k3w, k4w = acc(r + step, v + step * k3v);
      v += step / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
      w += step / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
      if (std::abs(v) > 1e250) return v;
    }
    return v;
  };
  std::vector<double> out;
  double lo = 0.0, flo = end_value(lo);
  while (int(out.size()) < count) {
    const double hi = lo + lambda_step, fhi = end_value(hi);
    if ((flo < 0) != (fhi < 0)) {
      double a = lo, b = hi, fa = flo;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b), fm = end_value(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    lo = hi;
    flo = fhi;
  }
  return out;
}

}  // namespace oracle
