#include "sqlab/squarefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sqlab/heat.hpp"

namespace sqlab {

namespace {

template <class Body>
void for_nodes(std::size_t K, Exec exec, const Body& body) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < K; ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < long(K); ++i) body(std::size_t(i));
  }
}

SquareFunctionField empty_like(const RTField& u, std::string op) {
  SquareFunctionField s;
  s.values = RadialProfile(u.grid, std::vector<double>(u.grid->size(), 0.0));
  s.op = std::move(op);
  s.quadrature = u.times.describe();
  return s;
}

double relative_tail(double value_sq, double tail_sq) {
  if (!(value_sq > 0.0)) return 0.0;
  return std::sqrt(1.0 + tail_sq / value_sq) - 1.0;
}

void warn_tail(SquareFunctionField& s) {
  if (s.tail > 0.05) {
    std::ostringstream os;
    os << s.op << ": estimated truncation tail " << s.tail << " of the value exceeds 5%";
    s.warnings.add(os.str());
  }
}

// 4-point Gauss-Legendre on [-1, 1]
constexpr double kG4x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kG4w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

// antiderivative of (v - t) v^{-a}
double gstar_antiderivative(double a, double t, double v) {
  if (std::abs(a - 1.0) < 1e-12) return v - t * std::log(v);
  if (std::abs(a - 2.0) < 1e-12) return std::log(v) + t / v;
  return std::pow(v, 2.0 - a) / (2.0 - a) - t * std::pow(v, 1.0 - a) / (1.0 - a);
}

bool constant_potential(const EigenSystem& sys, double& c) {
  if (sys.potential.empty()) return false;
  c = sys.potential.front();
  for (double v : sys.potential)
    if (std::abs(v - c) > 1e-12 * std::max(1.0, std::abs(c))) return false;
  return true;
}

}  // namespace

double gstar_shell_weight(int n, double a, double t, double r, double s) {
  if (n == 1) return std::pow(t / (t + std::abs(r - s)), a) + std::pow(t / (t + r + s), a);
  if (n != 3) throw std::domain_error("g* weight: n must be 1 or 3");
  if (s <= 0.0) return 0.0;
  if (r <= 0.0) return 4.0 * kPi * s * s * std::pow(t / (t + s), a);
  const double lo = std::abs(r - s), hi = r + s;
  double integral;
  if (hi - lo < 0.1 * (t + lo)) {
    // short range: the closed form would cancel
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    integral = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double rho = mid + half * kG4x[k];
      integral += half * kG4w[k] * rho * std::pow(t / (t + rho), a);
    }
  } else {
    integral = std::pow(t, a) * (gstar_antiderivative(a, t, t + hi) - gstar_antiderivative(a, t, t + lo));
  }
  return 2.0 * kPi * s / r * integral;
}

SquareFunctionField square_g(const RTField& u, double factor, int decay, double lambda1) {
  auto out = empty_like(u, "g");
  const std::size_t K = u.grid->size(), M = u.times.size();
  const auto& w = u.times.weights();
  for (std::size_t i = 0; i < K; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) acc += w[j] * u.at(i, j) * u.at(i, j);
    double tail = u.at(i, 0) * u.at(i, 0) / (2.0 * decay);
    if (lambda1 > 0.0) {
      const double a = lambda1 * std::pow(u.times.node(M - 1), decay);
      tail += u.at(i, M - 1) * u.at(i, M - 1) * (1.0 / (2.0 * a) + 1.0 / (4.0 * a * a)) / decay;
    }
    out.values.values[i] = std::sqrt(factor * acc);
    out.tail = std::max(out.tail, relative_tail(acc, tail));
  }
  warn_tail(out);
  return out;
}

SquareFunctionField square_cone(const RTField& u, double alpha, Exec exec,
                                const std::function<double(double, double)>& weight) {
  if (!(alpha > 0.0)) throw std::domain_error("cone aperture must be positive");
  std::ostringstream op;
  op << "S(alpha=" << alpha << ")";
  auto out = empty_like(u, op.str());
  const auto& grid = *u.grid;
  const int n = grid.dim();
  const std::size_t K = grid.size(), M = u.times.size();
  const auto& x = grid.nodes();
  std::vector<BallIntegrator> slices;
  std::vector<double> edge(M);
  slices.reserve(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double t = u.times.node(j);
    RadialProfile sq(u.grid, std::vector<double>(K));
    for (std::size_t i = 0; i < K; ++i) {
      sq.values[i] = u.at(i, j) * u.at(i, j);
      if (weight) sq.values[i] *= weight(x[i], t);
    }
    edge[j] = sq.values.back();
    slices.emplace_back(sq);
  }
  const BallIntegrator ones(RadialProfile(u.grid, std::vector<double>(K, 1.0)));
  const auto& w = u.times.weights();
  std::vector<double> tails(K, 0.0);
  std::vector<char> cut(K, 0);
  for_nodes(K, exec, [&](std::size_t i) {
    double acc = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double t = u.times.node(j), R = alpha * t, tn = std::pow(t, n);
      acc += w[j] * slices[j].ball(x[i], R) / tn;
      if (x[i] + R > grid.r_max()) {
        cut[i] = 1;
        tail += w[j] * edge[j] * std::max(0.0, grid.ball_volume(R) - ones.ball(x[i], R)) / tn;
      }
    }
    out.values.values[i] = std::sqrt(acc);
    tails[i] = relative_tail(acc, tail);
  });
  out.truncated = std::find(cut.begin(), cut.end(), 1) != cut.end();
  out.tail = *std::max_element(tails.begin(), tails.end());
  if (out.truncated) out.quadrature += ",cone-truncated-at-r_max";
  warn_tail(out);
  return out;
}

SquareFunctionField square_gstar(const RTField& u, double lambda, Exec exec) {
  if (!(lambda > 0.0)) throw std::domain_error("g*: lambda must be positive");
  std::ostringstream op;
  op << "g*(lambda=" << lambda << ")";
  auto out = empty_like(u, op.str());
  out.quadrature += ",space-truncated-at-r_max";
  const auto& grid = *u.grid;
  const int n = grid.dim();
  const double a = lambda * n;
  const std::size_t K = grid.size(), M = u.times.size();
  const auto& x = grid.nodes();
  const auto& w = u.times.weights();
  const double g2 = 1.0 / std::sqrt(3.0);
  for_nodes(K, exec, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double t = u.times.node(j);
      double inner = 0.0;
      for (std::size_t k = 0; k + 1 < K; ++k) {
        const double q0 = u.at(k, j) * u.at(k, j), q1 = u.at(k + 1, j) * u.at(k + 1, j);
        const double mid = 0.5 * (x[k] + x[k + 1]), half = 0.5 * (x[k + 1] - x[k]);
        for (double e : {-g2, g2}) {
          const double s = mid + half * e, lin = 0.5 * ((1 - e) * q0 + (1 + e) * q1);
          inner += half * lin * gstar_shell_weight(n, a, t, x[i], s);
        }
      }
      acc += w[j] * inner / std::pow(t, n);
    }
    out.values.values[i] = std::sqrt(acc);
  });
  return out;
}

SquareFunctionField g_schrodinger(const EigenSystem& sys, const RadialProfile& f, const TimeGrid& times,
                                  Exec exec) {
  const auto hf = schrodinger_field(sys, f, times, Multiplier::g_integrand, exec);
  auto out = square_g(hf.field, 1.0, 1, sys.lambda.front());
  out.op = "g_L";
  for (const auto& s : hf.warnings.items) out.warnings.add(s);
  return out;
}

SquareFunctionField s_schrodinger(const EigenSystem& sys, const RadialProfile& f, double alpha,
                                  const TimeGrid& times, Exec exec) {
  const auto hf = schrodinger_field(sys, f, times, Multiplier::s_integrand, exec);
  auto out = square_cone(hf.field, alpha, exec);
  out.op = "S_L" + out.op.substr(1);
  for (const auto& s : hf.warnings.items) out.warnings.add(s);
  return out;
}

SquareFunctionField gstar_schrodinger(const EigenSystem& sys, const RadialProfile& f, double lambda,
                                      const TimeGrid& times, Exec exec) {
  const auto hf = schrodinger_field(sys, f, times, Multiplier::s_integrand, exec);
  auto out = square_gstar(hf.field, lambda, exec);
  out.op = "g*_L" + out.op.substr(2);
  for (const auto& s : hf.warnings.items) out.warnings.add(s);
  return out;
}

SquareFunctionField stilde_schrodinger(const EigenSystem& sys, const RadialProfile& f, double mu,
                                       const CriticalRadius& rho, const TimeGrid& times, Exec exec) {
  if (!(mu >= 0.0)) throw std::domain_error("S~: mu must be nonnegative");
  const auto hf = schrodinger_field(sys, f, times, Multiplier::s_integrand, exec);
  SquareFunctionField out;
  if (rho.is_infinite()) {
    out = square_cone(hf.field, 1.0, exec);
  } else {
    out = square_cone(hf.field, 1.0, exec, [&](double s, double t) { return std::pow(1.0 + t / rho.at(s), mu); });
  }
  std::ostringstream op;
  op << "S~_L(mu=" << mu << ")";
  out.op = op.str();
  for (const auto& s : hf.warnings.items) out.warnings.add(s);
  return out;
}

RTField psi_field(const RadialProfile& f, const TimeGrid& times, Exec exec) {
  const std::size_t K = f.size();
  RTField u{f.grid, times, std::vector<double>(K * times.size())};
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto v = psi_apply(f, times.node(j), 0.0, exec);
    std::copy(v.values.begin(), v.values.end(), u.data.begin() + j * K);
  }
  return u;
}

SquareFunctionField g_classical(const RadialProfile& f, const TimeGrid& times, Exec exec) {
  auto out = square_g(psi_field(f, times, exec), 2.0, 2);
  out.op = "g_{-Delta}";
  return out;
}

SquareFunctionField s_classical(const RadialProfile& f, double alpha, const TimeGrid& times, Exec exec) {
  auto out = square_cone(psi_field(f, times, exec), alpha, exec);
  out.op = "S_{-Delta}" + out.op.substr(1);
  return out;
}

SquareFunctionField g_intrinsic(const RTField& A) {
  auto out = square_g(A);
  out.op = "g_beta";
  return out;
}

SquareFunctionField G_intrinsic(const RTField& A, double alpha, Exec exec) {
  auto out = square_cone(A, alpha, exec);
  out.op = "G_beta" + out.op.substr(1);
  return out;
}

SquareFunctionField gstar_intrinsic(const RTField& A, double lambda, Exec exec) {
  auto out = square_gstar(A, lambda, exec);
  out.op = "g*_beta" + out.op.substr(2);
  return out;
}

AnnulusReport dyadic_annulus_check(const RTField& u, double lambda, int J, Exec exec) {
  if (J < 0) throw std::domain_error("annulus check: J must be nonnegative");
  const int n = u.grid->dim();
  const auto gs = square_gstar(u, lambda, exec);
  std::vector<SquareFunctionField> S;
  for (int j = 0; j <= J; ++j) S.push_back(square_cone(u, std::ldexp(1.0, j), exec));
  AnnulusReport rep;
  rep.J = J;
  const double top = *std::max_element(gs.values.values.begin(), gs.values.values.end());
  for (std::size_t i = 0; i < gs.values.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j <= J; ++j) sum += std::pow(2.0, -j * lambda * n / 2.0) * S[j].values[i];
    const double g = gs.values[i];
    if (sum > 0.0) rep.C = std::max(rep.C, g / sum);
    if (g > 1e-12 * top) rep.reverse_worst = std::max(rep.reverse_worst, S[0].values[i] / (std::pow(2.0, lambda * n / 2.0) * g));
  }
  return rep;
}

LocalizedSquareFunctions localized_squarefns(const RadialProfile& f, const CriticalRadius& rho, double alpha,
                                             const TimeGrid& times, const EigenSystem* sys, Exec exec) {
  if (!(alpha > 0.0)) throw std::domain_error("localized S: alpha must be positive");
  LocalizedSquareFunctions out;
  const int n = f.grid->dim();
  double c = 0.0;
  out.has_gL = sys != nullptr && n == 3 && constant_potential(*sys, c);
  const std::size_t K = f.size(), M = times.size();
  auto blank = [&](const std::string& op) {
    SquareFunctionField s;
    s.values = RadialProfile(f.grid, std::vector<double>(K, 0.0));
    s.op = op;
    s.quadrature = times.describe();
    return s;
  };
  if (rho.is_infinite()) {
    out.g_loc = g_classical(f, times, exec);
    out.s_loc = s_classical(f, alpha, times, exec);
    if (out.has_gL) {
      out.gL_loc = g_schrodinger(*sys, f, times, exec);
      out.gL_glob = blank("g_L^glob");
    }
  } else {
    out.g_loc = blank("g_{-Delta}^loc");
    std::ostringstream op;
    op << "S_{-Delta}^loc(alpha=" << alpha << (n == 3 ? ",axis-sections)" : ")");
    out.s_loc = blank(op.str());
    out.gL_loc = blank("g_L^loc");
    out.gL_glob = blank("g_L^glob");
    const BallIntegrator F(f);
    const auto& x = f.grid->nodes();
    const auto& w = times.weights();
    for_nodes(K, exec, [&](std::size_t i) {
      const double r = x[i], b = rho.at(r);
      double g2 = 0.0, s2 = 0.0, l2 = 0.0, o2 = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        const double t = times.node(j), tn = std::pow(t, n);
        auto psi_t = [&](double q) {
          const double z = q * q / (t * t);
          return (0.5 * z - n) * std::exp(-0.25 * z) / tn;
        };
        const double v = truncated_convolution_on_axis(F, r, b, r, psi_t, 14.0 * t, t);
        g2 += w[j] * v * v;
        // cone section |y - x| < alpha t along the axis
        const double R = alpha * t;
        double sec = 0.0;
        for (int k = 0; k < 4; ++k)
          for (int h = 0; h < 3; ++h) {
            const double lo = -R + 2.0 * R * h / 3.0, half = R / 3.0, e = lo + half * (1.0 + kG4x[k]);
            const double u = truncated_convolution_on_axis(F, r, 2.0 * b, r + e, psi_t, 14.0 * t, t);
            const double area = n == 3 ? kPi * (R * R - e * e) : 1.0;
            sec += half * kG4w[k] * u * u * area;
          }
        s2 += w[j] * sec / tn;
        if (out.has_gL) {
          const double gn = std::pow(4.0 * kPi * t, -0.5 * n), damp = std::exp(-c * t);
          auto kern = [&](double q) {
            return damp * gn * std::exp(-q * q / (4.0 * t)) * (c * t - q * q / (4.0 * t) + 0.5 * n);
          };
          const double st = std::sqrt(t);
          const double loc = truncated_convolution_on_axis(F, r, b, r, kern, 13.0 * st, st);
          const double glob = truncated_convolution_on_axis(F, r, b, r, kern, 13.0 * st, st, true);
          l2 += w[j] * loc * loc;
          o2 += w[j] * glob * glob;
        }
      }
      out.g_loc.values.values[i] = std::sqrt(2.0 * g2);
      out.s_loc.values.values[i] = std::sqrt(s2);
      out.gL_loc.values.values[i] = std::sqrt(l2);
      out.gL_glob.values.values[i] = std::sqrt(o2);
    });
  }
  if (!out.has_gL) {
    out.gL_loc = blank("g_L^loc(unavailable)");
    out.gL_glob = blank("g_L^glob(unavailable)");
  }
  return out;
}

}  // namespace sqlab
