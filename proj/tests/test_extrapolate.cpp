#include <doctest.h>

#include <cmath>

#include "sqlab/extrapolate.hpp"

using namespace sqlab;

namespace {

GridPtr grid() {
  static const GridPtr g = make_grid(RadialGrid::geometric(3, 20.0, 128, 1e-3));
  return g;
}

RadialProfile constant(double c) {
  RadialProfile v(grid(), std::vector<double>(grid()->size(), c));
  v.tail = Extension::constant;
  return v;
}

RadialProfile bump(double c, double w) {
  return RadialProfile::sample(grid(), [&](double r) { return std::exp(-(r - c) * (r - c) / (w * w)); });
}

RdFConfig config(double r, double r0, double theta) {
  RdFConfig cfg;
  cfg.r = r;
  cfg.r0 = r0;
  cfg.theta = theta;
  cfg.search = MaximalSearch::geometric(1e-3, 80.0, 36, 11);
  return cfg;
}

const CriticalRadius& unit_rho() {
  static const CriticalRadius rho = critical_radius_profile(constant(1.0));
  return rho;
}

}  // namespace

TEST_CASE("configuration") {
  const auto cfg = config(3.0, 2.0, 0.5);
  CHECK(cfg.s() == doctest::Approx(0.5));
  CHECK(cfg.gamma() == 1.5);
  CHECK(cfg.q() == doctest::Approx(3.0));
  CHECK_THROWS(config(1.0, 1.0, 0.0).validate());
  CHECK_THROWS(config(3.0, 3.0, 0.0).validate());
  CHECK_THROWS(config(3.0, 0.5, 0.0).validate());
  CHECK_THROWS(config(3.0, 2.0, -1.0).validate());
  CHECK(extrapolation_theta(2.0, 3.0, 4.0) == doctest::Approx(2.0 / 1.5));
  CHECK(extrapolation_theta(2.0, 3.0, 2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(extrapolation_theta(2.0, 3.0, 3.0) == 2.0);
}

TEST_CASE("one iteration step") {
  const auto cfg = config(3.0, 2.0, 0.5);
  const auto w = shifted_power_weight(grid(), 0.8).w;
  const auto zero = rdf_step(RadialProfile::zeros(grid()), w, unit_rho(), cfg);
  for (double v : zero.values) CHECK(v == 0.0);

  const auto g = bump(1.0, 0.7);
  const auto Rg = rdf_step(g, w, unit_rho(), cfg);
  for (double c : {1e-3, 7.0, 1e-200, 1e150}) {
    RadialProfile cg = g;
    for (auto& v : cg.values) v *= c;
    const auto Rcg = rdf_step(cg, w, unit_rho(), cfg);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(Rcg.values[i] - c * Rg.values[i]) <= 1e-12 * c * Rg.values[i]);
  }
  for (double v : Rg.values) CHECK(v > 0.0);
  CHECK_THROWS(rdf_step(RadialProfile::sample(grid(), [](double r) { return r - 1.0; }), w, unit_rho(), cfg));

  // w = 1, gamma = 0, s = 1: the step is the maximal function
  const auto c1 = config(3.0, 1.0, 0.0);
  const auto M = hl_maximal(g, c1.search);
  const auto R1 = rdf_step(g, constant(1.0), unit_rho(), c1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(R1.values[i] == doctest::Approx(M.values.values[i]).epsilon(1e-12));
}

TEST_CASE("majorant with the unit weight") {
  auto cfg = config(3.0, 2.0, 0.0);
  cfg.early_exit = 0.0;
  const auto w = constant(1.0);
  const auto rho = CriticalRadius::infinite(grid());
  const auto est = estimate_rdf_norm(rdf_panel(grid()), w, rho, cfg);
  CHECK(est.measured >= 1.0);
  CHECK(est.value == doctest::Approx(1.5 * est.measured));
  const auto g = bump(1.0, 0.7);
  const auto res = rdf_majorant(g, w, rho, cfg, est);
  const auto& rep = res.report;
  CHECK(rep.terms == 40);
  CHECK(rep.margin >= -1e-12);
  CHECK(rep.norm_ratio <= 2.0);
  CHECK(rep.residual < 1e-6);
  CHECK(rep.fixed_point <= 1.0 + 1e-6);
  CHECK(rep.restarts == 0);
  CHECK(std::isnan(rep.transfer_ratio));

  const auto none = rdf_majorant(RadialProfile::zeros(grid()), w, rho, cfg, est);
  for (double v : none.G.values) CHECK(v == 0.0);
  CHECK(none.report.norm_ratio == 1.0);
}

TEST_CASE("an underestimated norm is doubled until the growth fits") {
  const auto cfg = config(3.0, 2.0, 0.0);
  const auto w = constant(1.0);
  const auto rho = CriticalRadius::infinite(grid());
  NormEstimate low{0.3, 0.3, "manual"};
  const auto res = rdf_majorant(bump(1.0, 0.7), w, rho, cfg, low);
  CHECK(res.report.restarts >= 1);
  CHECK(res.report.norm.value >= res.report.max_step_growth);
  CHECK_FALSE(res.report.warnings.items.empty());
  CHECK(res.report.norm_ratio <= 2.0);

  auto strict = cfg;
  strict.restarts = 0;
  CHECK_THROWS_AS(rdf_majorant(bump(1.0, 0.7), w, rho, strict, NormEstimate{0.01, 0.01, "manual"}),
                  std::runtime_error);
}

TEST_CASE("class transfer over shifted powers") {
  const auto cfg = config(3.0, 2.0, 0.5);
  const auto fam = BallFamily::tensor(0.01, 5.0, 12, 0.01, 10.0, 12, 20.0);
  const auto g = bump(1.0, 0.7);
  double lo = 1e300, hi = 0.0;
  for (double a : {0.0, 0.8, 1.6}) {
    const auto w = shifted_power_weight(grid(), a).w;
    const auto est = estimate_rdf_norm(rdf_panel(grid()), w, unit_rho(), cfg);
    auto res = rdf_majorant(g, w, unit_rho(), cfg, est);
    rdf_transfer(res, w, unit_rho(), cfg, fam);
    const auto& rep = res.report;
    CHECK(rep.margin >= -1e-12);
    CHECK(rep.norm_ratio <= 2.0);
    CHECK(std::isfinite(rep.transfer_ratio));
    lo = std::min(lo, rep.transfer_ratio);
    hi = std::max(hi, rep.transfer_ratio);
  }
  CHECK(hi / lo <= 3.0);

  auto r1 = config(3.0, 1.0, 0.0);
  const auto w = constant(1.0);
  auto res = rdf_majorant(g, w, unit_rho(), r1, NormEstimate{4.0, 4.0, "manual"});
  rdf_transfer(res, w, unit_rho(), r1, fam);
  CHECK(std::isnan(res.report.transfer_ratio));
}

TEST_CASE("extrapolation probe bookkeeping") {
  const auto g1 = make_grid(RadialGrid::geometric(1, 20.0, 256, 1e-3));
  const auto fam = BallFamily::tensor(0.01, 5.0, 10, 0.01, 10.0, 10, 20.0);
  const std::vector<RadialProfile> panel{
      RadialProfile::sample(g1, [](double r) { return std::exp(-r * r); }),
      RadialProfile::sample(g1, [](double r) { return std::exp(-(r - 2) * (r - 2)); })};
  auto family = [&](double p) { return make_weight_family("power", {-0.5, -0.2, 0.0, 0.3, 0.6}, g1, p); };
  const auto id = [](const RadialProfile& f) { return f; };
  const auto fits = extrapolation_probe(id, 2.0, 1.0, 0.0, {2.0, 3.0}, family, panel,
                                        CriticalRadius::infinite(g1), fam);
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].predicted == 1.0);
  CHECK(fits[1].predicted == 1.0);
  for (const auto& f : fits) {
    CHECK(f.rows.size() == 5);
    for (const auto& r : f.rows) CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f.fit.slope) <= 1e-9);
  }
  const auto fits2 = extrapolation_probe(id, 3.0, 0.5, 0.0, {2.0}, family, panel, CriticalRadius::infinite(g1), fam);
  CHECK(fits2[0].predicted == doctest::Approx(1.0));
  auto short_family = [&](double p) { return make_weight_family("power", {0.0, 0.3}, g1, p); };
  CHECK_THROWS(extrapolation_probe(id, 2.0, 1.0, 0.0, {2.0}, short_family, panel, CriticalRadius::infinite(g1), fam));
}

TEST_CASE("serial and parallel steps agree") {
  const auto cfg = config(3.0, 2.0, 0.5);
  const auto w = shifted_power_weight(grid(), 0.8).w;
  const auto g = bump(1.0, 0.7);
  CHECK(rdf_step(g, w, unit_rho(), cfg, Exec::serial).values == rdf_step(g, w, unit_rho(), cfg, Exec::parallel).values);
}
