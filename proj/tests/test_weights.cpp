#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sqlab/weights.hpp"

using namespace sqlab;

namespace {

GridPtr grid(int n) { return make_grid(RadialGrid::standard(n)); }

BallFamily family() { return BallFamily::tensor(0.01, 5.0, 40, 0.01, 10.0, 40, 20.0); }

WeightProfile unit_weight(GridPtr g) { return make_weight_family("power", {0.0}, g, 2.0).front(); }

CriticalRadius flat_rho(GridPtr g) {
  RadialProfile V(g, std::vector<double>(g->size(), 1.0));
  V.tail = Extension::constant;
  return critical_radius_profile(V);
}

// frozen from oracle::power_ap_1d_sup(0.5, 2)
constexpr double kPowerHalfA2 = 1.4999999988;

}  // namespace

TEST_CASE("psi factor") {
  const auto g = grid(3);
  const auto rho = flat_rho(g);
  const double r0 = std::sqrt(3 / (4 * kPi));
  CHECK(psi_theta({0.0, 1.0}, rho, 0.0) == 1.0);
  CHECK(psi_theta({1.0, rho.at(1.0)}, rho, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(psi_theta({0.0, 1.0}, rho, 2.0) == doctest::Approx(std::pow(1 + 1 / r0, 2)).epsilon(1e-7));
  CHECK(psi_theta({0.0, 1.0}, CriticalRadius::infinite(g), 3.0) == 1.0);
  CHECK_THROWS_AS(psi_theta({0.0, 1.0}, rho, -1.0), std::domain_error);
}

TEST_CASE("unit weight has constant one") {
  const auto g = grid(3);
  const auto w = unit_weight(g);
  const auto rho = flat_rho(g);
  for (double p : {1.5, 2.0, 4.0}) {
    CHECK(ap_constant(w, p, family()).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ap_rho_theta_constant(w, p, 0.7, rho, family()).value <= 1.0 + 1e-12);
    CHECK(ap_rho_loc_constant(w, p, rho, 1.0, family()).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(duality_check(w, 2.5, 0.5, rho, family()).residual <= 1e-12);
}

TEST_CASE("power weight on the line against the closed-form scan") {
  const auto g = grid(1);
  const auto w = power_weight(g, 0.5);
  const ApBall ab(w.w, 2.0);
  for (double c : {0.0, 0.3, 1.0, 4.0})
    for (double R : {0.05, 0.7, 3.0})
      CHECK(ab.quantity(c, R, 1.0) == doctest::Approx(oracle::power_ap_1d(0.5, 2.0, c, R)).epsilon(2e-3));
  const auto rep = ap_constant(w, 2.0, family());
  CHECK(rep.in_class);
  CHECK(std::abs(rep.value / kPowerHalfA2 - 1) <= 2e-3);
  CHECK(rep.value <= kPowerHalfA2 * (1 + 2e-3));
}

TEST_CASE("constant is nonincreasing in theta") {
  const auto g = grid(3);
  const auto rho = flat_rho(g);
  const auto w = shifted_power_weight(g, 1.5);
  const std::vector<double> thetas{0.0, 0.25, 0.5, 1.0, 2.0};
  const auto reps = ap_rho_theta_scan(w, 2.0, thetas, rho, family());
  for (std::size_t i = 1; i < reps.size(); ++i) CHECK(reps[i].value <= reps[i - 1].value);
  // per ball as well
  const ApBall ab(w.w, 2.0);
  for (double d : {0.0, 1.0, 5.0})
    for (double R : {0.1, 1.0, 8.0}) {
      double prev = INFINITY;
      for (double th : thetas) {
        const double q = ab.quantity(d, R, psi_theta({d, R}, rho, th));
        CHECK(q <= prev);
        prev = q;
      }
    }
}

TEST_CASE("every ball quantity is at least one") {
  const auto g = grid(3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(0.0, 6.0), uR(-3.0, 2.0);
  for (double a : {-2.0, 1.0, 2.5}) {
    const ApBall ab(power_weight(g, a).w, 2.0);
    for (int i = 0; i < 100; ++i) CHECK(ab.quantity(ud(rng), std::pow(10.0, uR(rng)), 1.0) >= 1.0 - 1e-9);
    CHECK(ap_constant(power_weight(g, a), 2.0, family()).value >= 1.0);
  }
}

TEST_CASE("search refinement is stable") {
  const auto g = grid(3);
  const auto rho = flat_rho(g);
  for (const auto& w : {power_weight(g, 1.0), shifted_power_weight(g, 2.0), power_weight(g, -1.5)}) {
    const auto fam = family();
    const double a = ap_rho_theta_constant(w, 2.0, 0.5, rho, fam).value;
    const double b = ap_rho_theta_constant(w, 2.0, 0.5, rho, fam.refined()).value;
    CHECK(b >= a * (1 - 1e-12));
    CHECK(b <= a * 1.05);
  }
}

TEST_CASE("local constant") {
  const auto g = grid(3);
  const auto rho = flat_rho(g);
  std::vector<double> ratios;
  for (double a : {1.0, 2.0, 4.0}) {
    const auto w = shifted_power_weight(g, a);
    const double full = ap_constant(w, 2.0, family()).value;
    const double l1 = ap_rho_loc_constant(w, 2.0, rho, 1.0, family()).value;
    const double l4 = ap_rho_loc_constant(w, 2.0, rho, 4.0, family()).value;
    CHECK(l1 <= full);
    CHECK(l1 <= l4);
    CHECK(l4 <= full);
    ratios.push_back(l4 / l1);
  }
  // the two local constants stay within a bounded factor along the family
  for (double r : ratios) CHECK(r < 10.0);
  CHECK_THROWS_AS(ap_rho_loc_constant(unit_weight(g), 2.0, rho, 0.5, family()), std::domain_error);
}

TEST_CASE("duality") {
  const auto g3 = grid(3);
  const auto rho = flat_rho(g3);
  CHECK(duality_check(shifted_power_weight(g3, 0.4), 2.0, 0.5, rho, family()).residual <= 2e-2);
  const auto g1 = grid(1);
  const auto rep = duality_check(power_weight(g1, 0.5), 3.0, 0.0, CriticalRadius::infinite(g1), family());
  CHECK(rep.residual <= 2e-2);
  CHECK(rep.lhs == doctest::Approx(oracle::power_ap_1d_sup(0.5, 3.0)).epsilon(2e-3));
}

TEST_CASE("growth of weighted balls") {
  const auto g = grid(3);
  const auto rho = flat_rho(g);
  const ApBall one(unit_weight(g).w, 2.0);
  const auto inf = CriticalRadius::infinite(g);
  for (double l : {1.0, 2.0, 4.0})
    CHECK(weight_growth_ratio(one, {1.0, 0.5}, l, 0.0, inf) == doctest::Approx(std::pow(l, 3 - 6)).epsilon(1e-8));
  const ApBall ab(shifted_power_weight(g, 1.0).w, 2.0);
  CHECK(weight_growth_ratio(ab, {2.0, 0.5}, 1.0, 0.5, rho) ==
        doctest::Approx(std::pow(1 + 0.5 / rho.at(2.0), -2.0)).epsilon(1e-8));

  const auto w = shifted_power_weight(g, 1.0);
  const double c = ap_rho_theta_constant(w, 2.0, 0.5, rho, family()).value;
  auto balls = [](int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 2.0), uR(-2.0, 0.0);
    std::vector<BallSpec> out;
    for (int i = 0; i < n; ++i) out.push_back({ud(rng), std::pow(10.0, uR(rng))});
    return out;
  };
  const std::vector<double> lambdas{1, 2, 4, 8};
  const auto r1 = weight_growth_check(w, 2.0, 0.5, rho, balls(50, 1), lambdas, c);
  const auto r2 = weight_growth_check(w, 2.0, 0.5, rho, balls(100, 2), lambdas, c);
  CHECK(r1.samples == 200);
  CHECK(r1.sup_ratio <= r1.fitted_C * c * c * (1 + 1e-12));
  CHECK(std::abs(r2.fitted_C / r1.fitted_C - 1) <= 0.20);
}

TEST_CASE("weight families") {
  const auto g1 = grid(1);
  double prev = 0.0;
  for (double a : {0.5, 0.8, 0.9, 0.95}) {
    const double c = ap_constant(make_weight_family("power", {a}, g1, 2.0).front(), 2.0, family()).value;
    CHECK(c > prev);
    prev = c;
  }
  CHECK_THROWS_AS(make_weight_family("power", {1.0}, g1, 2.0), std::domain_error);
  CHECK_THROWS_AS(make_weight_family("power", {-1.0}, g1, 2.0), std::domain_error);
  CHECK_THROWS_AS(make_weight_family("near-extremal", {0.0}, g1, 2.0), std::domain_error);
  CHECK_THROWS_AS(make_weight_family("cosine", {0.0}, g1, 2.0), std::domain_error);
  const auto ne = make_weight_family("near-extremal", {0.5}, g1, 2.0).front();
  CHECK(ne.w.tail_exponent == doctest::Approx(0.5));

  // beyond the classical range the adapted constant stays finite while the classical one grows with radius
  const auto g3 = grid(3);
  const auto rho = flat_rho(g3);
  CHECK_THROWS_AS(make_weight_family("shifted-power", {4.0}, g3, 2.0), std::domain_error);
  const auto w = make_weight_family("shifted-power", {4.0}, g3, 2.0, 1.0, true).front();
  double last = 0.0;
  for (double R : {2.0, 4.0, 8.0}) {
    const auto fam = BallFamily::tensor(0.01, 5.0, 20, 0.01, R, 30, 20.0);
    const double cl = ap_constant(w, 2.0, fam).value;
    CHECK(cl > last * 1.2);
    last = cl;
    CHECK(ap_rho_theta_constant(w, 2.0, 1.0, rho, fam).value < 20.0);
  }
}

TEST_CASE("divergent dual weight is reported outside the class") {
  const auto g1 = grid(1);
  const auto rep = ap_constant(power_weight(g1, 1.5), 2.0, family());
  CHECK_FALSE(rep.in_class);
  CHECK(std::isinf(rep.value));
}

TEST_CASE("serial and parallel searches agree") {
  const auto g = grid(3);
  const auto rho = flat_rho(g);
  const auto w = shifted_power_weight(g, 1.5);
  const auto a = ap_rho_theta_constant(w, 2.0, 0.5, rho, family(), Exec::serial);
  const auto b = ap_rho_theta_constant(w, 2.0, 0.5, rho, family(), Exec::parallel);
  CHECK(a.value == b.value);
  CHECK(a.arg.d == b.arg.d);
  CHECK(a.arg.R == b.arg.R);
}
