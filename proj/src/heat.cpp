#include "sqlab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqlab {

namespace {

// 5-point Gauss-Legendre on [-1, 1]
constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                           0.2369268850561891};

// the profile may vary on this length even under a wide kernel
constexpr double kMaxPiece = 0.2;

struct Quadrature {
  std::vector<double> s, w;  // nodes ascending, weights include f(s)
};

// Pieces of length at most min(scale / 2, kMaxPiece) inside the grid; short grid
// intervals are grouped so that the node count stays bounded by the kernel window
// rather than the grid size. The tail extension is smooth and uses scale / 2.
Quadrature build_quadrature(const RadialProfile& f, double scale, double reach) {
  const auto& x = f.grid->nodes();
  const double piece = std::min(0.5 * scale, kMaxPiece);
  std::vector<double> cuts{0.0};
  double start = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] - start < piece) continue;
    if (x[i - 1] > start) {
      cuts.push_back(x[i - 1]);
      start = x[i - 1];
    }
    const int m = std::max(1, int(std::ceil((x[i] - start) / piece)));
    for (int j = 1; j <= m; ++j) cuts.push_back(start + (x[i] - start) * j / m);
    start = x[i];
  }
  if (cuts.back() < x.back()) cuts.push_back(x.back());
  if (f.tail != Extension::zero && reach > x.back()) {
    const int m = int(std::ceil((reach - x.back()) / (0.5 * scale)));
    for (int j = 1; j <= m; ++j) cuts.push_back(x.back() + (reach - x.back()) * j / m);
  }
  Quadrature q;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1], mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int g = 0; g < 5; ++g) {
      const double s = mid + half * kGx[g];
      q.s.push_back(s);
      q.w.push_back(half * kGw[g] * f(s));
    }
  }
  return q;
}

template <class Kernel>
RadialProfile convolve(const RadialProfile& f, double width, double scale, Exec exec, const Kernel& kernel) {
  const auto& x = f.grid->nodes();
  const Quadrature q = build_quadrature(f, scale, x.back() + width);
  RadialProfile out(f.grid, std::vector<double>(x.size(), 0.0));
  auto node = [&](std::size_t i) {
    const double r = x[i];
    const auto lo = std::lower_bound(q.s.begin(), q.s.end(), r - width) - q.s.begin();
    const auto hi = std::upper_bound(q.s.begin(), q.s.end(), r + width) - q.s.begin();
    double acc = 0.0;
    for (auto k = lo; k < hi; ++k) acc += q.w[k] * kernel(r, q.s[k]);
    out.values[i] = acc;
  };
  const long K = long(x.size());
  if (exec == Exec::serial) {
    for (long i = 0; i < K; ++i) node(std::size_t(i));
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < K; ++i) node(std::size_t(i));
  }
  return out;
}

void check_dim(int n) {
  if (n != 1 && n != 3) throw std::domain_error("radial convolution supports n = 1 and n = 3");
}

// e^{-u_m/c} sinh(a)/a with u_m = r^2 + s^2, a = 2 r s / c, written without cancellation
double mean_shc(double r, double s, double c) {
  const double two_a = 4.0 * r * s / c;
  const double e1 = std::exp(-(r - s) * (r - s) / c);
  if (two_a == 0.0) return e1;
  return -e1 * std::expm1(-two_a) / two_a;
}

// 5-point rule on pieces of at most min(piece, kMaxPiece)
template <class F>
double gauss_pieces(double a, double b, double piece, const F& g) {
  if (!(b > a)) return 0.0;
  const int m = std::max(1, int(std::ceil((b - a) / std::min(piece, kMaxPiece))));
  const double h = (b - a) / m;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (int j = 0; j < 5; ++j) acc += 0.5 * h * kGw[j] * g(mid + 0.5 * h * kGx[j]);
  }
  return acc;
}

// splits [a, b] at the kinks of the integrand first
template <class F>
double gauss_pieces(double a, double b, std::vector<double> kinks, double piece, const F& g) {
  double acc = 0.0, lo = a;
  std::sort(kinks.begin(), kinks.end());
  for (double c : kinks)
    if (c > lo && c < b) {
      acc += gauss_pieces(lo, c, piece, g);
      lo = c;
    }
  return acc + gauss_pieces(lo, b, piece, g);
}

}  // namespace

double gaussian_shell_kernel(int n, double t, double r, double s) {
  const double c = 4.0 * t;
  if (n == 1) return (std::exp(-(r - s) * (r - s) / c) + std::exp(-(r + s) * (r + s) / c)) / std::sqrt(kPi * c);
  return std::pow(kPi * c, -1.5) * 4.0 * kPi * s * s * mean_shc(r, s, c);
}

double psi_shell_kernel(int n, double t, double r, double s) {
  if (n == 1) {
    auto psi = [](double z) { return (0.5 * z * z - 1.0) * std::exp(-0.25 * z * z); };
    return (psi((r - s) / t) + psi((r + s) / t)) / t;
  }
  const double c = 4.0 * t * t;
  const double um = r * r + s * s;
  const double S = mean_shc(r, s, c);
  const double C = 0.5 * (std::exp(-(r - s) * (r - s) / c) + std::exp(-(r + s) * (r + s) / c));
  return -kPi * s * s / (t * t * t) * (4.0 * (c - 2.0 * um) / c * S + 8.0 * C);
}

RadialProfile gaussian_apply(const RadialProfile& f, double t, double scale, Exec exec) {
  if (!(t > 0.0)) throw std::domain_error("gaussian_apply: t must be positive");
  const int n = f.grid->dim();
  check_dim(n);
  if (scale <= 0.0) scale = std::sqrt(t);
  auto out = convolve(f, 13.0 * std::sqrt(t), scale, exec,
                      [&](double r, double s) { return gaussian_shell_kernel(n, t, r, s); });
  out.tail = f.tail;
  out.tail_exponent = f.tail_exponent;
  return out;
}

RadialProfile psi_apply(const RadialProfile& f, double t, double scale, Exec exec) {
  if (!(t > 0.0)) throw std::domain_error("psi_apply: t must be positive");
  const int n = f.grid->dim();
  check_dim(n);
  if (scale <= 0.0) scale = t;
  return convolve(f, 14.0 * t, scale, exec, [&](double r, double s) { return psi_shell_kernel(n, t, r, s); });
}

double psi_constant(int n) { return 0.5 * std::pow(4.0 * kPi, -0.5 * n); }

RadialProfile laplacian_heat_fd(const RadialProfile& f, double t, double rel_step, Exec exec) {
  const double tau = t * t, d = rel_step * tau;
  const auto p2 = gaussian_apply(f, tau + 2 * d, t, exec), p1 = gaussian_apply(f, tau + d, t, exec);
  const auto m1 = gaussian_apply(f, tau - d, t, exec), m2 = gaussian_apply(f, tau - 2 * d, t, exec);
  RadialProfile out(f.grid, std::vector<double>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i)
    out.values[i] = tau * (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * d);
  return out;
}

double truncated_convolution_on_axis(const BallIntegrator& F, double r, double b, double lambda,
                                     const std::function<double(double)>& kernel, double reach, double scale,
                                     bool outside) {
  const auto& f = F.profile();
  const double piece = 0.5 * scale;
  if (f.grid->dim() == 1) {
    auto g = [&](double z) { return kernel(std::abs(lambda - z)) * f(std::abs(z)); };
    const double lo = lambda - reach, hi = lambda + reach;
    if (!outside) return gauss_pieces(std::max(r - b, lo), std::min(r + b, hi), {0.0, lambda}, piece, g);
    return gauss_pieces(lo, std::min(r - b, hi), {0.0, lambda}, piece, g) +
           gauss_pieces(std::max(r + b, lo), hi, {0.0, lambda}, piece, g);
  }
  if (f.grid->dim() != 3) throw std::domain_error("truncated convolution: n must be 1 or 3");
  const double D = lambda - r, aD = std::abs(D);
  // integral of f over the part of {|z - y| = q} with cosine to the axis in [m1, m2]
  auto band = [&](double q, double m1, double m2) {
    if (m2 <= m1) return 0.0;
    if (std::abs(lambda) < 1e-12) return 2.0 * kPi * q * q * f(q) * (m2 - m1);
    const double s1 = std::sqrt(std::max(0.0, lambda * lambda + q * q + 2.0 * lambda * q * m1));
    const double s2 = std::sqrt(std::max(0.0, lambda * lambda + q * q + 2.0 * lambda * q * m2));
    return 2.0 * kPi * q / std::abs(lambda) * F.moment(1, std::min(s1, s2), std::max(s1, s2));
  };
  // the part inside B(x, b) is the cosine range [m1, m2]
  auto inner = [&](double q) {
    if (q <= 0.0) return 0.0;
    double m1 = -1.0, m2 = 1.0;
    if (aD == 0.0) {
      if (q >= b) m2 = m1;
    } else {
      const double m = (b * b - D * D - q * q) / (2.0 * D * q);
      if (D > 0.0) m2 = std::min(m2, m);
      else m1 = std::max(m1, m);
    }
    if (!outside) return band(q, m1, m2);
    if (m2 <= m1) return band(q, -1.0, 1.0);
    return band(q, -1.0, m1) + band(q, m2, 1.0);
  };
  const double q_lo = outside ? 0.0 : std::max(0.0, aD - b), q_hi = outside ? reach : std::min(aD + b, reach);
  return gauss_pieces(q_lo, q_hi, {std::abs(lambda), std::abs(b - aD), aD + b}, piece,
                      [&](double q) { return kernel(q) * inner(q); });
}

}  // namespace sqlab
