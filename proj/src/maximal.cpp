#include "sqlab/maximal.hpp"
#include "sqlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace sqlab {

namespace {

RadialProfile abs_profile(const RadialProfile& f) {
  RadialProfile a = f;
  for (auto& v : a.values) v = std::abs(v);
  return a;
}

template <class Body>
void for_nodes(std::size_t K, Exec exec, const Body& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < K; ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < long(K); ++i) body(std::size_t(i));
  }
}

using BallWeight = std::function<double(double d, double R)>;

MaximalField ball_maximal(const RadialProfile& f, const MaximalSearch& search, Exec exec, const BallWeight& psi,
                          std::string op) {
  if (search.R.empty() || search.offsets < 1) throw std::domain_error("maximal search: empty family");
  const BallIntegrator I(abs_profile(f));
  const auto& x = f.grid->nodes();
  MaximalField mf;
  mf.op = std::move(op);
  mf.search = search.describe();
  mf.values = RadialProfile(f.grid, std::vector<double>(x.size(), 0.0));
  const double R_lo = search.R.front(), R_hi = search.R.back();
  const double lim = 1.0 - 1e-9;
  for_nodes(x.size(), exec, [&](std::size_t i) {
    const double r = x[i];
    auto value = [&](double u, double R) {
      const double d = std::abs(r + u * R);
      return I.average(d, R) / psi(d, R);
    };
    double best = -1.0, bu = 0.0, bR = search.R.front();
    for (double R : search.R)
      for (int j = 0; j < search.offsets; ++j) {
        const double u = -1.0 + (2.0 * j + 1.0) / search.offsets;
        const double v = value(u, R);
        if (v > best) {
          best = v;
          bu = u;
          bR = R;
        }
      }
    if (search.refine) {
      double su = 1.0 / search.offsets;
      double sl = search.R.size() > 1 ? std::log(search.R[1] / search.R[0]) : 0.1;
      for (int it = 0; it < 400 && (su > 1e-7 || sl > 1e-7); ++it) {
        bool moved = false;
        const double cand[4][2] = {{bu + su, bR}, {bu - su, bR}, {bu, bR * std::exp(sl)}, {bu, bR * std::exp(-sl)}};
        for (const auto& c : cand) {
          if (std::abs(c[0]) > lim || c[1] < R_lo || c[1] > R_hi) continue;
          const double v = value(c[0], c[1]);
          if (v > best) {
            best = v;
            bu = c[0];
            bR = c[1];
            moved = true;
          }
        }
        if (!moved) {
          su *= 0.5;
          sl *= 0.5;
        }
      }
    }
    mf.values.values[i] = best;
  });
  return mf;
}

}  // namespace

MaximalSearch MaximalSearch::geometric(double R_min, double R_max, std::size_t nR, int offsets) {
  if (!(R_min > 0.0 && R_max > R_min) || nR < 2) throw std::domain_error("maximal search: bad radii");
  MaximalSearch s;
  s.offsets = offsets;
  const double q = std::log(R_max / R_min) / double(nR - 1);
  for (std::size_t i = 0; i < nR; ++i) s.R.push_back(R_min * std::exp(q * double(i)));
  return s;
}

MaximalSearch MaximalSearch::for_grid(const RadialGrid& g) {
  const double lo = 0.5 * g.node(1), hi = 4.0 * g.r_max();
  const auto n = std::size_t(std::ceil(12.0 * std::log10(hi / lo))) + 1;
  return geometric(lo, hi, n);
}

std::string MaximalSearch::describe() const {
  std::ostringstream os;
  os << "node-balls(nR=" << R.size() << ",R=[" << R.front() << "," << R.back() << "],offsets=" << offsets
     << (refine ? ",refined" : "") << ")";
  return os.str();
}

MaximalField hl_maximal(const RadialProfile& f, const MaximalSearch& search, Exec exec) {
  return ball_maximal(f, search, exec, [](double, double) { return 1.0; }, "M");
}

MaximalField adapted_maximal(const RadialProfile& f, double theta, const CriticalRadius& rho,
                             const MaximalSearch& search, Exec exec) {
  if (theta < 0.0) throw std::domain_error("adapted maximal: theta must be nonnegative");
  std::ostringstream op;
  op << "M_theta(theta=" << theta << ")";
  return ball_maximal(f, search, exec, [&](double d, double R) { return psi_theta({d, R}, rho, theta); },
                      op.str());
}

TimeGrid maximal_taus() { return TimeGrid::log_spaced(1e-4, 1e4, 97); }
TimeGrid maximal_times() { return TimeGrid::log_spaced(1e-2, 1e2, 97); }

MaximalField heat_radial_maximal(const RadialProfile& f, const TimeGrid& taus, Exec exec) {
  MaximalField mf;
  mf.op = "R_heat";
  mf.search = taus.describe();
  mf.values = RadialProfile(f.grid, std::vector<double>(f.size(), 0.0));
  for (double tau : taus.nodes()) {
    const auto u = gaussian_apply(f, tau, 0.0, exec);
    for (std::size_t i = 0; i < f.size(); ++i) mf.values.values[i] = std::max(mf.values.values[i], std::abs(u[i]));
  }
  return mf;
}

MaximalField heat_nontangential_maximal(const RadialProfile& f, double alpha, const TimeGrid& times, Exec exec) {
  if (!(alpha > 0.0)) throw std::domain_error("nontangential maximal: alpha must be positive");
  const auto& x = f.grid->nodes();
  const std::size_t K = x.size();
  MaximalField mf;
  std::ostringstream op;
  op << "M*_heat(alpha=" << alpha << ")";
  mf.op = op.str();
  mf.search = times.describe();
  mf.values = RadialProfile(f.grid, std::vector<double>(K, 0.0));
  std::vector<char> cut(K, 0);
  auto& out = mf.values.values;
  for (double t : times.nodes()) {
    const auto u = gaussian_apply(f, t * t, 0.0, exec);
    const double a = alpha * t;
    std::deque<std::size_t> dq;  // indices with decreasing |u|
    std::size_t hi = 0;
    for (std::size_t i = 0; i < K; ++i) {
      while (hi < K && x[hi] < x[i] + a) {
        while (!dq.empty() && std::abs(u[dq.back()]) <= std::abs(u[hi])) dq.pop_back();
        dq.push_back(hi++);
      }
      while (!dq.empty() && x[dq.front()] <= x[i] - a) dq.pop_front();
      double v = dq.empty() ? 0.0 : std::abs(u[dq.front()]);
      if (x[i] - a > 0.0) v = std::max(v, std::abs(u(x[i] - a)));
      if (x[i] + a <= x.back()) {
        v = std::max(v, std::abs(u(x[i] + a)));
      } else {
        cut[i] = 1;
      }
      out[i] = std::max(out[i], v);
    }
  }
  mf.truncated = std::size_t(std::count(cut.begin(), cut.end(), 1));
  return mf;
}

double truncated_heat_on_axis(const BallIntegrator& F, double r, double b, double lambda, double tau) {
  const double n = F.profile().grid->dim();
  const double norm = std::pow(4.0 * kPi * tau, -0.5 * n);
  return truncated_convolution_on_axis(
      F, r, b, lambda, [&](double q) { return norm * std::exp(-q * q / (4.0 * tau)); }, 13.0 * std::sqrt(tau),
      std::sqrt(tau));
}

LocalizedMaximals localized_maximals(const RadialProfile& f, const CriticalRadius& rho, double alpha,
                                     const TimeGrid& taus, const TimeGrid& times, Exec exec) {
  LocalizedMaximals out;
  if (rho.is_infinite()) {
    out.radial = heat_radial_maximal(f, taus, exec);
    out.nontangential = heat_nontangential_maximal(f, alpha, times, exec);
    out.radial.op += "^loc";
    out.nontangential.op += "^loc";
    return out;
  }
  const BallIntegrator F(f);
  const auto& x = f.grid->nodes();
  out.radial.values = RadialProfile(f.grid, std::vector<double>(x.size(), 0.0));
  out.nontangential.values = out.radial.values;
  out.radial.op = "R_heat^loc";
  std::ostringstream op;
  op << "M*_heat^loc(alpha=" << alpha << ",axis)";
  out.nontangential.op = op.str();
  out.radial.search = taus.describe();
  out.nontangential.search = times.describe() + ",axis-samples=17";
  for_nodes(x.size(), exec, [&](std::size_t i) {
    const double r = x[i], b = rho.at(r);
    double vr = 0.0, vn = 0.0;
    for (double tau : taus.nodes()) vr = std::max(vr, std::abs(truncated_heat_on_axis(F, r, b, r, tau)));
    for (double t : times.nodes()) {
      const double a = alpha * t * (1.0 - 1e-9);
      for (int k = 0; k <= 16; ++k)
        vn = std::max(vn, std::abs(truncated_heat_on_axis(F, r, 2.0 * b, r - a + 2.0 * a * k / 16.0, t * t)));
    }
    out.radial.values.values[i] = vr;
    out.nontangential.values.values[i] = vn;
  });
  return out;
}

}  // namespace sqlab
