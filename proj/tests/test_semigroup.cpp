#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sqlab/semigroup.hpp"

using namespace sqlab;

namespace {

GridPtr grid3() {
  static const GridPtr g = make_grid(RadialGrid::standard(3));
  return g;
}

struct Bump {
  double c, w;
  double operator()(double r) const { return std::exp(-(r - c) * (r - c) / (w * w)); }
};

const Bump kBumps[5] = {{0.0, 1.0}, {0.0, 0.5}, {1.5, 0.6}, {3.0, 1.0}, {0.0, 2.0}};

RadialProfile constant(GridPtr g, double c) {
  RadialProfile V(g, std::vector<double>(g->size(), c));
  V.tail = Extension::constant;
  return V;
}

RadialProfile square(GridPtr g) {
  auto V = RadialProfile::sample(g, [](double r) { return r * r; });
  V.tail = Extension::power;
  V.tail_exponent = 2.0;
  return V;
}

double rel_l2(const RadialProfile& a, const RadialProfile& b, const RadialProfile& ref) {
  RadialProfile d(a.grid, a.values);
  for (std::size_t i = 0; i < d.size(); ++i) d.values[i] -= b.values[i];
  return lp_norm(d, 2.0) / lp_norm(ref, 2.0);
}

const EigenSystem& sys_of(int which) {
  static const EigenSystem zero = build_eigensystem(constant(grid3(), 0.0));
  static const EigenSystem one = build_eigensystem(constant(grid3(), 1.0));
  static const EigenSystem sq = build_eigensystem(square(grid3()));
  return which == 0 ? zero : which == 1 ? one : sq;
}

}  // namespace

TEST_CASE("gaussian semigroup closed forms") {
  const auto g = grid3();
  for (double t : {0.1, 1.0, 10.0}) {
    const auto u = gaussian_apply(constant(g, 1.0), t);
    for (std::size_t i = 0; i < g->size(); i += 50)
      if (g->node(i) < 10.0) CHECK(u[i] == doctest::Approx(1.0).epsilon(1e-8));
  }
  for (int n : {1, 3}) {
    const auto gn = make_grid(RadialGrid::standard(n));
    const double s = 0.5;
    const auto f = RadialProfile::sample(gn, [&](double r) { return std::exp(-r * r / (4 * s)); });
    for (double t : {0.01, 0.3, 2.0}) {
      const auto u = gaussian_apply(f, t);
      for (std::size_t i = 0; i < gn->size(); i += 37) {
        const double r = gn->node(i);
        const double want = std::pow(s / (s + t), 0.5 * n) * std::exp(-r * r / (4 * (s + t)));
        CHECK(std::abs(u[i] - want) <= 1e-5);
      }
    }
  }
}

TEST_CASE("gaussian semigroup against Monte Carlo convolution") {
  const auto g = grid3();
  const Bump b{1.0, 0.7};
  const auto f = RadialProfile::sample(g, b);
  const double t = 0.2;
  const auto u = gaussian_apply(f, t);
  for (double r : {0.0, 0.5, 1.2, 2.5}) {
    const double mc = oracle::heat_convolution(b, r, t, 400000, 7);
    const std::size_t i = g->locate(r);
    const double got = u(r);
    (void)i;
    CHECK(std::abs(got / mc - 1) <= 1e-2);
  }
}

TEST_CASE("psi kernel") {
  // mean zero: integral of psi over R^n
  for (int n : {1, 3}) {
    double acc = 0.0;
    const int M = 200000;
    const double L = 40.0, h = L / M;
    for (int i = 0; i < M; ++i) {
      const double r = (i + 0.5) * h;
      const double p = (0.5 * r * r - n) * std::exp(-0.25 * r * r);
      acc += (n == 1 ? 2.0 : 4 * kPi * r * r) * p * h;
    }
    CHECK(std::abs(acc) <= 1e-10);
  }
  // shell kernel at the origin is the surface times psi_t(s)
  const double t = 0.7, s = 1.3;
  const double z = s / t;
  const double want = 4 * kPi * s * s * (0.5 * z * z - 3) * std::exp(-0.25 * z * z) / (t * t * t);
  CHECK(psi_shell_kernel(3, t, 0.0, s) == doctest::Approx(want).epsilon(1e-12));
  CHECK(psi_shell_kernel(3, t, 1e-9, s) == doctest::Approx(want).epsilon(1e-7));
}

TEST_CASE("psi route equals the time derivative of the heat semigroup") {
  const auto g = grid3();
  for (const auto& b : kBumps) {
    const auto f = RadialProfile::sample(g, b);
    for (double t : {0.05, 0.5, 2.0}) {
      auto psi = psi_apply(f, t);
      for (auto& v : psi.values) v *= psi_constant(3);
      const auto fd = laplacian_heat_fd(f, t);
      CHECK(rel_l2(psi, fd, fd) <= 1e-6);
    }
  }
}

TEST_CASE("eigensystem closed forms") {
  const auto& z = sys_of(0);
  const auto& o = sys_of(1);
  CHECK(z.orthonormality_defect() <= 1e-10);
  for (std::size_t k = 0; k < 60; ++k) {
    const double exact = std::pow((k + 1) * kPi / 24.0, 2);
    CHECK(std::abs(z.lambda[k] / exact - 1) <= 1e-7);
    CHECK(std::abs(o.lambda[k] / (exact + 1) - 1) <= 1e-7);
  }
  for (std::size_t k = 1; k < z.kmax(); ++k) CHECK(z.lambda[k] >= z.lambda[k - 1]);
  // eigenvectors are sampled sines
  const auto* q = z.vec(2);
  const double norm = std::sqrt(2.0 / (z.points() + 1));
  for (std::size_t i = 0; i < z.points(); i += 301)
    CHECK(q[i] == doctest::Approx(norm * std::sin(3 * kPi * z.r[i] / 24.0)).epsilon(1e-9));
  CHECK_THROWS_AS(build_eigensystem(constant(grid3(), 1.0), 24.0, 400, 200), std::domain_error);
}

TEST_CASE("eigenvalues of the quadratic potential against shooting") {
  const auto& s = sys_of(2);
  const auto ref = oracle::shooting_eigenvalues([](double r) { return r * r; }, 12.0, 10);
  for (int k = 0; k < 10; ++k) CHECK(std::abs(s.lambda[k] / ref[k] - 1) <= 1e-4);
}

TEST_CASE("unit potential matches the damped heat semigroup") {
  const auto& sys = sys_of(1);
  const auto g = grid3();
  for (const auto& b : kBumps) {
    const auto f = RadialProfile::sample(g, b);
    for (double t : {0.01, 0.1, 1.0}) {
      Warnings w;
      const auto u = schrodinger_apply(sys, f, t, Multiplier::semigroup, &w);
      auto ref = gaussian_apply(f, t);
      for (auto& v : ref.values) v *= std::exp(-t);
      CHECK(rel_l2(u, ref, f) <= 1e-3);
      CHECK(w.items.empty());
    }
  }
}

TEST_CASE("spectral identities on the difference nodes") {
  const auto& sys = sys_of(2);
  std::vector<double> phi(sys.points());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = sys.vec(0)[i] / sys.r[i];
  const auto u = apply_on_nodes(sys, phi, 0.3, Multiplier::semigroup);
  for (std::size_t i = 0; i < phi.size(); i += 97)
    CHECK(std::abs(u[i] - std::exp(-0.3 * sys.lambda[0]) * phi[i]) <= 1e-12 * std::abs(phi[0]));

  const Bump b{0.5, 0.8};
  std::vector<double> f(sys.points());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = b(sys.r[i]);
  auto l2 = [&](const std::vector<double>& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i] * sys.r[i] * sys.r[i];
    return std::sqrt(s);
  };
  // semigroup property
  const auto ab = apply_on_nodes(sys, apply_on_nodes(sys, f, 0.2, Multiplier::semigroup), 0.5,
                                 Multiplier::semigroup);
  const auto direct = apply_on_nodes(sys, f, 0.7, Multiplier::semigroup);
  std::vector<double> d(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) d[i] = ab[i] - direct[i];
  CHECK(l2(d) <= 1e-8 * l2(direct));
  // contraction
  CHECK(l2(direct) <= l2(f));
  // t L e^{-tL} f = -t d/ds e^{-sL} f at s = t
  const double t = 0.4, e = 1e-2 * t;
  const auto gl = apply_on_nodes(sys, f, t, Multiplier::g_integrand);
  const auto p2 = apply_on_nodes(sys, f, t + 2 * e, Multiplier::semigroup);
  const auto p1 = apply_on_nodes(sys, f, t + e, Multiplier::semigroup);
  const auto m1 = apply_on_nodes(sys, f, t - e, Multiplier::semigroup);
  const auto m2 = apply_on_nodes(sys, f, t - 2 * e, Multiplier::semigroup);
  for (std::size_t i = 0; i < f.size(); ++i) d[i] = gl[i] + t * (-p2[i] + 8 * p1[i] - 8 * m1[i] + m2[i]) / (12 * e);
  CHECK(l2(d) <= 1e-6 * l2(gl));
}

TEST_CASE("eigenfunction profile is reproduced by the semigroup") {
  const auto& sys = sys_of(2);
  const auto phi = sys.eigenfunction_profile(0, grid3());
  CHECK(lp_norm(phi, 2.0) == doctest::Approx(1.0).epsilon(1e-4));
  const auto u = schrodinger_apply(sys, phi, 0.5, Multiplier::semigroup);
  auto want = phi;
  for (auto& v : want.values) v *= std::exp(-0.5 * sys.lambda[0]);
  CHECK(rel_l2(u, want, want) <= 1e-4);
}

TEST_CASE("kernel symmetry") {
  const auto& sys = sys_of(2);
  for (double t : {0.05, 0.5})
    for (auto [r, s] : {std::pair{0.3, 1.1}, std::pair{2.0, 0.0}, std::pair{1.0, 4.0}})
      CHECK(std::abs(radial_kernel(sys, t, r, s) - radial_kernel(sys, t, s, r)) <=
            1e-10 * std::abs(radial_kernel(sys, t, r, r)));
}

TEST_CASE("Crank-Nicolson cross-check") {
  const auto& sys = sys_of(2);
  const auto g = grid3();
  const Bump b{1.0, 0.8};
  const auto f = RadialProfile::sample(g, b);
  for (double t : {0.05, 0.5, 2.0}) {
    const auto u = schrodinger_apply(sys, f, t, Multiplier::semigroup);
    const int N = 3000;
    const auto cn = oracle::crank_nicolson([](double r) { return r * r; }, b, 24.0, N, t, 4000);
    const double h = 24.0 / (N + 1);
    double peak = 0.0;
    for (double v : cn) peak = std::max(peak, std::abs(v));
    for (double r : {0.2, 0.8, 1.5, 3.0}) {
      const int i = int(r / h) - 1;
      const double x = (r - h * (i + 1)) / h;
      const double ref = cn[i] + x * (cn[i + 1] - cn[i]);
      CHECK(std::abs(u(r) - ref) <= 1e-4 * peak);
    }
  }
}

TEST_CASE("domain truncation is stable") {
  const auto g = grid3();
  const auto V = constant(g, 1.0);
  const auto& a = sys_of(1);
  const auto b = build_eigensystem(V, 48.0, 8193, 1200);
  const auto f = RadialProfile::sample(g, kBumps[3]);
  for (double t : {0.1, 1.0, 10.0}) {
    const auto ua = schrodinger_apply(a, f, t, Multiplier::semigroup);
    const auto ub = schrodinger_apply(b, f, t, Multiplier::semigroup);
    RadialProfile ia = ua, ib = ub;
    for (std::size_t i = 0; i < g->size(); ++i)
      if (g->node(i) > 12.0) ia.values[i] = ib.values[i] = 0.0;
    CHECK(rel_l2(ia, ib, ib) <= 1e-4);
  }
}

TEST_CASE("fields agree with single applications and across paths") {
  const auto& sys = sys_of(2);
  const auto g = grid3();
  const auto f = RadialProfile::sample(g, kBumps[2]);
  const auto times = TimeGrid::log_spaced(0.01, 10.0, 16);
  const auto par = schrodinger_field(sys, f, times, Multiplier::s_integrand, Exec::parallel);
  const auto ser = schrodinger_field(sys, f, times, Multiplier::s_integrand, Exec::serial);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < par.field.data.size(); ++k) {
    worst = std::max(worst, std::abs(par.field.data[k] - ser.field.data[k]));
    scale = std::max(scale, std::abs(par.field.data[k]));
  }
  CHECK(worst <= 1e-12 * scale);
  const auto one = schrodinger_apply(sys, f, times.node(5), Multiplier::s_integrand);
  for (std::size_t i = 0; i < g->size(); i += 41) CHECK(par.field.at(i, 5) == doctest::Approx(one[i]).epsilon(1e-12));
  CHECK(par.tail_mass < kSpectralTailTolerance);
}

TEST_CASE("kernel bounds") {
  const auto g = grid3();
  std::vector<KernelSample> samples;
  for (double t : {0.05, 0.2, 1.0, 4.0})
    for (double r : {0.0, 0.5, 1.5, 3.0})
      for (double s : {0.0, 0.3, 1.0, 2.5, 5.0}) samples.push_back({t, r, s});
  const auto free = kernel_bound_check(sys_of(0), 0, 0.0, CriticalRadius::infinite(g), samples);
  CHECK(free.C == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(free.c == doctest::Approx(0.25));

  const auto rho1 = critical_radius_profile(constant(g, 1.0));
  double prev = 0.0;
  for (double N : {0.0, 1.0, 2.0}) {
    const auto fit = kernel_bound_check(sys_of(1), 0, N, rho1, samples);
    CHECK(std::isfinite(fit.C));
    CHECK(fit.C >= prev);
    prev = fit.C;
  }
  CHECK(kernel_bound_check(sys_of(1), 0, 0.0, rho1, samples).C <= 1.0 + 1e-3);

  const auto rho2 = critical_radius_profile(square(g));
  auto more = samples;
  for (double t : {0.1, 0.5, 2.0})
    for (double r : {0.25, 0.75, 2.0})
      for (double s : {0.1, 0.6, 1.8, 4.0}) more.push_back({t, r, s});
  const auto a = kernel_bound_check(sys_of(2), 1, 1.0, rho2, samples);
  const auto b = kernel_bound_check(sys_of(2), 1, 1.0, rho2, more);
  CHECK(std::isfinite(a.C));
  CHECK(std::abs(b.C / a.C - 1) <= 0.2);
  CHECK(a.c > 0.0);
}
