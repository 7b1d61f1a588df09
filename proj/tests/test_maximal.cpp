#include <doctest.h>

#include <cmath>

#include "sqlab/maximal.hpp"
#include "sqlab/weights.hpp"

using namespace sqlab;

namespace {

GridPtr grid3() { return make_grid(RadialGrid::geometric(3, 20.0, 512, 1e-3)); }

RadialProfile bump(GridPtr g, double c = 0.0, double w = 1.0) {
  return RadialProfile::sample(g, [&](double r) { return std::exp(-(r - c) * (r - c) / (w * w)); });
}

RadialProfile ones(GridPtr g) {
  RadialProfile f(g, std::vector<double>(g->size(), 1.0));
  f.tail = Extension::constant;
  return f;
}

std::size_t node_near(const GridPtr& g, double r) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < g->size(); ++i)
    if (std::abs(g->node(i) - r) < std::abs(g->node(best) - r)) best = i;
  return best;
}

MaximalSearch search(const GridPtr& g) { return MaximalSearch::for_grid(*g); }

}  // namespace

TEST_CASE("maximal function of a constant is the constant") {
  const auto g = grid3();
  const auto m = hl_maximal(ones(g), search(g));
  for (std::size_t i = 0; i < g->size(); i += 37) CHECK(m.values[i] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("maximal function of a Gaussian bump at |x| = 2") {
  const auto g = make_grid(RadialGrid::standard(3));
  // frozen from an adaptive-quadrature average over on-axis balls, maximised by a
  // dense (u, R) scan followed by simplex refinement; the sup sits at balls with x on
  // the boundary
  const double frozen = 0.32167053;
  const auto f = RadialProfile::sample(g, [](double r) { return std::exp(-r * r); });
  const double x = 2.0;
  const auto m = hl_maximal(f, search(g));
  const double got = m.values(x);
  CHECK(std::abs(got / frozen - 1) <= 2e-4);
}

TEST_CASE("indicator of the unit ball seen from |x| = 2") {
  const auto g = make_grid(RadialGrid::standard(3));
  const auto f = RadialProfile::sample(g, [](double r) { return r < 1.0 ? 1.0 : 0.0; });
  const double v = hl_maximal(f, search(g)).values(2.0);
  // the centred ball of radius 3 alone gives 1/27; the lens-volume sup is 9/25
  CHECK(v > 1.0 / 27.0);
  CHECK(std::abs(v - 0.36) <= 1e-2);
}

TEST_CASE("maximal function dominates the function and is sublinear") {
  const auto g = grid3();
  const auto f = bump(g, 1.5, 0.6), h = bump(g, 0.0, 0.5);
  const auto s = search(g);
  const auto mf = hl_maximal(f, s), mh = hl_maximal(h, s);
  auto sum = f;
  for (std::size_t i = 0; i < sum.size(); ++i) sum.values[i] += h.values[i];
  const auto ms = hl_maximal(sum, s);
  auto scaled = f;
  for (auto& v : scaled.values) v *= -3.0;
  const auto mc = hl_maximal(scaled, s);
  for (std::size_t i = 1; i < g->size(); ++i) {
    CHECK(mf.values[i] >= std::abs(f.values[i]) * (1 - 1e-2));
    CHECK(ms.values[i] <= (mf.values[i] + mh.values[i]) * (1 + 1e-6));
    CHECK(mc.values[i] == doctest::Approx(3.0 * mf.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("adapted maximal function") {
  const auto g = grid3();
  const auto f = bump(g, 3.0, 1.0);
  const auto s = search(g);
  const auto rho = CriticalRadius::from_samples(g, std::vector<double>(g->size(), 0.5));
  const auto m = hl_maximal(f, s);
  const auto m0 = adapted_maximal(f, 0.0, rho, s);
  const auto m1 = adapted_maximal(f, 1.0, rho, s);
  const auto m2 = adapted_maximal(f, 2.0, rho, s);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(m0.values[i] == doctest::Approx(m.values[i]).epsilon(1e-12));
    CHECK(m1.values[i] <= m.values[i] * (1 + 1e-12));
    CHECK(m2.values[i] <= m1.values[i] * (1 + 1e-6));
  }
  // far from the support only large balls see f, and the weight suppresses them
  const auto far = node_near(g, 15.0);
  CHECK(m1.values[far] < 0.5 * m.values[far]);
  CHECK_THROWS(adapted_maximal(f, -1.0, rho, s));
}

TEST_CASE("heat maximal functions") {
  const auto g = grid3();
  const auto one = heat_radial_maximal(ones(g), maximal_taus());
  for (std::size_t i = 0; i < g->size(); i += 41) CHECK(one.values[i] == doctest::Approx(1.0).epsilon(1e-6));

  const auto f = bump(g, 1.5, 0.6);
  const auto R = heat_radial_maximal(f, maximal_taus());
  double prev_sum = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto M = heat_nontangential_maximal(f, alpha, maximal_times());
    double sum = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      CHECK(R.values[i] <= M.values[i] * (1 + 1e-9));
      sum += M.values[i];
    }
    CHECK(sum >= prev_sum);
    prev_sum = sum;
    CHECK(M.truncated > 0);
  }
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(R.values[i] >= f.values[i] * (1 - 5e-3));
  CHECK_THROWS(heat_nontangential_maximal(f, 0.0, maximal_times()));
}

TEST_CASE("truncated heat with a large ball matches the full semigroup") {
  const auto g = make_grid(RadialGrid::standard(3));
  const auto f = bump(g, 1.5, 0.6);
  const BallIntegrator F(f);
  for (double tau : {0.01, 0.3, 2.0}) {
    const auto u = gaussian_apply(f, tau);
    for (double r : {0.0, 0.7, 1.5, 4.0}) {
      CHECK(std::abs(truncated_heat_on_axis(F, r, 40.0, r, tau) - u(r)) <= 5e-5);
      // off-centre evaluation point on the same axis, both signs
      CHECK(std::abs(truncated_heat_on_axis(F, r, 40.0, r - 0.5, tau) - u(std::abs(r - 0.5))) <= 5e-5);
    }
  }
  const auto g1 = make_grid(RadialGrid::standard(1));
  const auto f1 = bump(g1, 1.0, 0.7);
  const BallIntegrator F1(f1);
  const auto u1 = gaussian_apply(f1, 0.5);
  for (double r : {0.0, 1.0, 2.5}) CHECK(std::abs(truncated_heat_on_axis(F1, r, 40.0, r, 0.5) - u1(r)) <= 5e-5);
}

TEST_CASE("localized heat maximal functions") {
  const auto g = grid3();
  const auto f = bump(g, 1.5, 0.6);
  const auto taus = TimeGrid::log_spaced(1e-3, 1e2, 24);
  const auto times = TimeGrid::log_spaced(3e-2, 10.0, 16);

  const auto inf = localized_maximals(f, CriticalRadius::infinite(g), 1.0, taus, times);
  const auto R = heat_radial_maximal(f, taus);
  for (std::size_t i = 0; i < g->size(); i += 17) CHECK(inf.radial.values[i] == R.values[i]);

  const auto rho = CriticalRadius::from_samples(g, std::vector<double>(g->size(), 0.5));
  const auto loc = localized_maximals(f, rho, 1.0, taus, times);
  const auto M = heat_nontangential_maximal(f, 1.0, times);
  // the two quadratures of the interpolant agree to the grid resolution, about 1e-3 here
  for (std::size_t i = 0; i < g->size(); i += 7) {
    CHECK(loc.radial.values[i] <= R.values[i] * (1 + 2e-3) + 1e-12);
    CHECK(loc.nontangential.values[i] <= M.values[i] * (1 + 2e-3) + 1e-12);
  }
  // support of f outside every localizing ball
  const auto far = RadialProfile::sample(g, [](double r) { return r > 5.0 && r < 6.0 ? 1.0 : 0.0; });
  const auto lf = localized_maximals(far, rho, 1.0, taus, times);
  const auto i1 = node_near(g, 1.0);
  CHECK(lf.radial.values[i1] == 0.0);
  CHECK(lf.nontangential.values[i1] == 0.0);
}

TEST_CASE("serial and parallel maximal functions agree") {
  const auto g = grid3();
  const auto f = bump(g, 1.5, 0.6);
  const auto s = search(g);
  const auto rho = CriticalRadius::from_samples(g, std::vector<double>(g->size(), 0.5));
  CHECK(hl_maximal(f, s, Exec::serial).values.values == hl_maximal(f, s, Exec::parallel).values.values);
  CHECK(adapted_maximal(f, 1.0, rho, s, Exec::serial).values.values ==
        adapted_maximal(f, 1.0, rho, s, Exec::parallel).values.values);
  const auto times = TimeGrid::log_spaced(0.1, 10.0, 8);
  CHECK(heat_nontangential_maximal(f, 1.0, times, Exec::serial).values.values ==
        heat_nontangential_maximal(f, 1.0, times, Exec::parallel).values.values);
  const auto a = localized_maximals(f, rho, 1.0, times, times, Exec::serial);
  const auto b = localized_maximals(f, rho, 1.0, times, times, Exec::parallel);
  CHECK(a.nontangential.values.values == b.nontangential.values.values);
}
