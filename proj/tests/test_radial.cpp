#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sqlab/radial.hpp"

using namespace sqlab;

namespace {

GridPtr grid3() { return make_grid(RadialGrid::standard(3)); }

// 3-point Gauss over many equal panels; slice_area is polynomial between its kinks
double integrate_slices(double d, double R) {
  const double lo = std::abs(R - d), hi = R + d;
  auto panel = [&](double a, double b) {
    const int P = 200;
    const double x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double acc = 0.0;
    for (int p = 0; p < P; ++p) {
      const double u0 = a + (b - a) * p / P, u1 = a + (b - a) * (p + 1) / P;
      for (int g = 0; g < 3; ++g) {
        const double s = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x[g];
        acc += 0.5 * (u1 - u0) * w[g] * slice_area(d, R, s, 3);
      }
    }
    return acc;
  };
  return panel(0.0, lo) + panel(lo, hi);
}

}  // namespace

TEST_CASE("grid nodes increase and the ball volume is reproduced") {
  for (int n : {1, 3}) {
    const auto g = RadialGrid::standard(n);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.node(i) > g.node(i - 1));
    CHECK(g.node(0) == 0.0);
    RadialProfile one(make_grid(g), std::vector<double>(g.size(), 1.0));
    const double vol = integrate_radial(one);
    CHECK(std::abs(vol / g.ball_volume(g.r_max()) - 1.0) <= 1e-10);
  }
}

TEST_CASE("grid quadrature is exact for piecewise-linear integrands") {
  const auto g = RadialGrid::geometric(3, 5.0, 300, 1e-2);
  // h(r) = r is linear on every interval: integral of r * r^2 = r^4 / 4
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights()[i] * g.node(i);
  CHECK(std::abs(s / (std::pow(5.0, 4) / 4.0) - 1.0) <= 1e-12);
}

TEST_CASE("time grid reproduces the dt/t measure") {
  const auto tg = TimeGrid::standard();
  double s = 0.0;
  for (double w : tg.weights()) s += w;
  CHECK(std::abs(s / std::log(1e6) - 1.0) <= 1e-10);
  for (std::size_t j = 1; j < tg.size(); ++j) CHECK(tg.node(j) > tg.node(j - 1));
}

TEST_CASE("slice area examples") {
  CHECK(slice_area(0, 2, 1, 3) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(slice_area(5, 1, 1, 3) == 0.0);
  // frozen from oracle::sphere_cap_area(1, 1, 1, 2e7, seed 7)
  const double frozen = 3.14046671;
  CHECK(std::abs(slice_area(1, 1, 1, 3) - frozen) <= 4e-3);
  CHECK(std::abs(slice_area(1, 1, 1, 3) - oracle::sphere_cap_area(1, 1, 1, 400000, 3)) <= 2e-2);
  CHECK(slice_area(0.5, 1.0, 0.2, 1) == 2.0);
  CHECK(slice_area(2.0, 1.0, 1.5, 1) == 1.0);
  CHECK_THROWS(slice_area(-1, 1, 1, 3));
}

TEST_CASE("slice areas integrate to the ball volume") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 4.0);
  for (int i = 0; i < 40; ++i) {
    const double d = u(rng), R = u(rng);
    const double vol = 4.0 * kPi / 3.0 * R * R * R;
    CHECK(std::abs(integrate_slices(d, R) / vol - 1.0) <= 1e-8);
  }
}

TEST_CASE("integrate_ball examples") {
  const auto g = grid3();
  RadialProfile one(g, std::vector<double>(g->size(), 1.0));
  CHECK(std::abs(integrate_ball(one, {0, 1}) / (4 * kPi / 3) - 1) <= 1e-8);
  auto ind = RadialProfile::sample(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  CHECK(integrate_ball(ind, {3, 1}) == 0.0);
  auto sq = RadialProfile::sample(g, [](double r) { return r * r; });
  // frozen from oracle::ball_integral(r^2, d=2, R=0.7, 2e7 samples, seed 11)
  const double frozen = 6.16947925;
  CHECK(std::abs(integrate_ball(sq, {2, 0.7}) / frozen - 1) <= 1e-3);
  const double live = oracle::ball_integral([](double r) { return r * r; }, 2, 0.7, 200000, 1);
  CHECK(std::abs(integrate_ball(sq, {2, 0.7}) / live - 1) <= 1e-2);
}

TEST_CASE("ball integrals in one dimension") {
  const auto g = make_grid(RadialGrid::standard(1));
  auto lin = RadialProfile::sample(g, [](double r) { return 1.0 + r; });
  // interval (0.5, 3.5) of 1 + |x|
  CHECK(integrate_ball(lin, {2.0, 1.5}) == doctest::Approx(3.0 + 6.0).epsilon(1e-12));
  // interval (-1, 3): integral of 1+|x| over (-1,0) and (0,3)
  CHECK(integrate_ball(lin, {1.0, 2.0}) == doctest::Approx(1.5 + 7.5).epsilon(1e-12));
}

TEST_CASE("ball integral is monotone in the integrand") {
  const auto g = grid3();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RadialProfile a = RadialProfile::zeros(g), b = RadialProfile::zeros(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
      a.values[i] = u(rng);
      b.values[i] = a.values[i] + u(rng) * 0.1;
    }
    BallIntegrator ia(a), ib(b);
    for (int k = 0; k < 20; ++k) {
      const double d = 10 * u(rng), R = 1e-3 + 8 * u(rng);
      CHECK(ia.ball(d, R) <= ib.ball(d, R) + 1e-12);
    }
  }
}

TEST_CASE("centred ball equals the direct radial quadrature") {
  const auto g = grid3();
  auto h = RadialProfile::sample(g, [](double r) { return std::exp(-r) * (1 + std::sin(3 * r)); });
  BallIntegrator bi(h);
  for (double R : {0.37, 1.0, 5.5, 19.99}) {
    // direct: omega * sum over whole intervals plus a linear partial interval
    const std::size_t i = g->locate(R);
    double acc = 0.0;
    const auto& x = g->nodes();
    const auto sub = RadialGrid::from_nodes(3, [&] {
      std::vector<double> v(x.begin(), x.begin() + i + 1);
      if (R > v.back()) v.push_back(R);
      return v;
    }());
    for (std::size_t k = 0; k < sub.size(); ++k) acc += sub.weights()[k] * h(sub.node(k));
    const double direct = 4 * kPi * acc;
    CHECK(std::abs(bi.ball(0, R) / direct - 1) <= 1e-10);
  }
}

TEST_CASE("thin lenses agree with the prefix-moment path") {
  const auto g = grid3();
  auto h = RadialProfile::sample(g, [](double r) { return 1.0 / (1 + r * r); });
  BallIntegrator bi(h);
  // sweep d across the switch between local and prefix evaluation
  double prev = bi.ball(1e-9, 2.0);
  CHECK(std::abs(prev / bi.ball(0, 2.0) - 1) <= 1e-8);
  for (double d : {1e-6, 1e-4, 1e-2, 0.05, 0.1, 0.3}) {
    const double v = bi.ball(d, 2.0);
    const double mc = oracle::riemann_ball([](double r) { return 1.0 / (1 + r * r); }, d, 2.0, 120);
    CHECK(std::abs(v / mc - 1) <= 5e-3);
    (void)prev;
  }
}

TEST_CASE("profile extension policies") {
  const auto g = grid3();
  RadialProfile h(g, std::vector<double>(g->size(), 2.0));
  CHECK(h(25.0) == 0.0);
  h.tail = Extension::constant;
  CHECK(h(25.0) == 2.0);
  h.tail = Extension::power;
  h.tail_exponent = -1.0;
  CHECK(h(40.0) == doctest::Approx(1.0));
  // constant tail lets balls reach past r_max exactly
  h.tail = Extension::constant;
  CHECK(std::abs(integrate_ball(h, {15, 10}) / (2 * 4 * kPi / 3 * 1000) - 1) <= 1e-10);
}

TEST_CASE("power-law head integrates singular profiles exactly") {
  const auto g = make_grid(RadialGrid::geometric(1, 2.0, 2000, 1e-30));
  const double b = -0.9;
  auto h = RadialProfile::sample(g, [&](double r) { return r > 0 ? std::pow(r, b) : 0.0; });
  h.head_exponent = b;
  // integral over (-R, R) of |x|^b = 2 R^{b+1} / (b+1)
  const double R = 1.3;
  // linear interpolation between nodes leaves an O(step^2) bias
  CHECK(integrate_ball(h, {0, R}) == doctest::Approx(2 * std::pow(R, b + 1) / (b + 1)).epsilon(5e-4));
  // inside the head interval the integral is closed form
  const double r = 3e-31;
  CHECK(integrate_ball(h, {0, r}) == doctest::Approx(2 * std::pow(r, b + 1) / (b + 1)).epsilon(1e-12));
}

TEST_CASE("cone shell integral") {
  const auto g = grid3();
  const auto tg = TimeGrid::log_spaced(0.01, 2.0, 64);
  RTField z{g, tg, std::vector<double>(g->size() * tg.size(), 0.0)};
  CHECK(integrate_cone_shell(z, 1.0, 1.0, 0.01, 2.0).value == 0.0);
  RTField one{g, tg, std::vector<double>(g->size() * tg.size(), 1.0)};
  const auto r1 = integrate_cone_shell(one, 0.0, 1.0, 0.01, 2.0);
  CHECK(std::abs(r1.value / (4 * kPi / 3 * std::log(200.0)) - 1) <= 1e-8);
  CHECK_FALSE(r1.truncated);

  // generic bump u(r, t) = exp(-(r-1)^2 / (1+t)) against a Cartesian Riemann sum
  RTField bump{g, tg, std::vector<double>(g->size() * tg.size())};
  auto uf = [](double r, double t) { return std::exp(-(r - 1) * (r - 1) / (1 + t)); };
  for (std::size_t j = 0; j < tg.size(); ++j)
    for (std::size_t i = 0; i < g->size(); ++i) bump.data[j * g->size() + i] = uf(g->node(i), tg.node(j));
  const double x = 0.8, alpha = 1.5;
  const double got = integrate_cone_shell(bump, x, alpha, 0.01, 2.0).value;
  double ref = 0.0;
  for (std::size_t j = 0; j < tg.size(); ++j) {
    const double t = tg.node(j);
    const double inner =
        oracle::riemann_ball([&](double r) { return uf(r, t) * uf(r, t); }, x, alpha * t, 60) / (t * t * t);
    ref += tg.weights()[j] * inner;
  }
  CHECK(std::abs(got / ref - 1) <= 1e-2);
}
