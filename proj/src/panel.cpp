#include <cmath>

#include "sqlab/lab.hpp"

namespace sqlab::lab {

namespace {

struct Bump {
  double centre, width;
};

// panel-v1; changing any entry requires a new panel version
constexpr Bump kBumps[5] = {{0.0, 1.0}, {0.0, 0.4}, {1.5, 0.6}, {3.0, 1.0}, {0.8, 2.0}};
constexpr double kFrequencies[2] = {3.0, 6.0};
constexpr double kWindow = 2.0;

}  // namespace

std::vector<RadialProfile> test_panel(GridPtr grid) {
  std::vector<RadialProfile> out;
  for (const auto& b : kBumps)
    out.push_back(RadialProfile::sample(
        grid, [&](double r) { return std::exp(-(r - b.centre) * (r - b.centre) / (b.width * b.width)); }));
  for (double xi : kFrequencies)
    out.push_back(RadialProfile::sample(
        grid, [&](double r) { return std::cos(xi * r) * std::exp(-r * r / (2.0 * kWindow * kWindow)); }));
  return out;
}

std::vector<std::string> panel_labels() {
  std::vector<std::string> out;
  for (const auto& b : kBumps)
    out.push_back("bump(c=" + std::to_string(b.centre).substr(0, 4) + ",w=" + std::to_string(b.width).substr(0, 4) + ")");
  for (double xi : kFrequencies) out.push_back("window(xi=" + std::to_string(xi).substr(0, 4) + ")");
  return out;
}

RadialProfile dual_indicator(const WeightProfile& w, double p) {
  const auto sigma = dual_weight(w.w, p);
  RadialProfile out(w.w.grid, std::vector<double>(w.w.size(), 0.0));
  const auto& x = w.w.grid->nodes();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] <= 1.0) out.values[i] = sigma.values[i];
  out.head_exponent = sigma.head_exponent;
  return out;
}

}  // namespace sqlab::lab
