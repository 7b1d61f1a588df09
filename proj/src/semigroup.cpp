#include "sqlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <lapacke.h>

namespace sqlab {

namespace {

using Mat = Eigen::Map<const Eigen::MatrixXd>;
using Vec = Eigen::Map<const Eigen::VectorXd>;

Mat basis(const EigenSystem& sys) { return Mat(sys.vectors.data(), long(sys.points()), long(sys.kmax())); }

// Catmull-Rom weights on the extended node array U_0..U_{N+1} at spacing h, where
// U_0 is the value at r = 0 and U_{N+1} the value at r_max. The ghost below 0 mirrors
// U_1 (even extension of a radial function); the ghost above r_max is linear.
struct Stencil {
  long j = 0;  // U_{j-1..j+2}
  double w[4] = {0, 0, 0, 0};
};

Stencil stencil(double r, double h, std::size_t N) {
  Stencil st;
  const double x = r / h;
  long j = long(std::floor(x));
  j = std::clamp(j, 0L, long(N));
  const double u = x - double(j);
  st.j = j;
  st.w[0] = 0.5 * (-u + 2 * u * u - u * u * u);
  st.w[1] = 0.5 * (2 - 5 * u * u + 3 * u * u * u);
  st.w[2] = 0.5 * (u + 4 * u * u - 3 * u * u * u);
  st.w[3] = 0.5 * (-u * u + u * u * u);
  return st;
}

// U from the interior values u_1..u_N (radial function, even at 0, zero at r_max)
std::vector<double> extend(const double* u, std::size_t N) {
  std::vector<double> U(N + 2);
  for (std::size_t i = 0; i < N; ++i) U[i + 1] = u[i];
  U[0] = (4.0 * u[0] - u[1]) / 3.0;
  U[N + 1] = 0.0;
  return U;
}

double eval(const std::vector<double>& U, const Stencil& st) {
  const long N1 = long(U.size()) - 1;
  auto at = [&](long j) {
    if (j < 0) return U[1];
    if (j > N1) return 2.0 * U[N1] - U[N1 - 1];
    return U[std::size_t(j)];
  };
  return st.w[0] * at(st.j - 1) + st.w[1] * at(st.j) + st.w[2] * at(st.j + 1) + st.w[3] * at(st.j + 2);
}

std::vector<double> coefficients(const EigenSystem& sys, const std::vector<double>& u) {
  const std::size_t N = sys.points(), K = sys.kmax();
  std::vector<double> g(N), c(K);
  for (std::size_t i = 0; i < N; ++i) g[i] = sys.r[i] * u[i];
  Eigen::Map<Eigen::VectorXd>(c.data(), long(K)).noalias() = basis(sys).transpose() * Vec(g.data(), long(N));
  return c;
}

std::vector<double> sample_nodes(const EigenSystem& sys, const RadialProfile& f) {
  std::vector<double> u(sys.points());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(sys.r[i]);
  return u;
}

double tail_of(const EigenSystem& sys, const std::vector<double>& u, const std::vector<double>& c) {
  double total = 0.0, kept = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += sys.r[i] * sys.r[i] * u[i] * u[i];
  for (double x : c) kept += x * x;
  if (total <= 0.0) return 0.0;
  return std::max(0.0, 1.0 - kept / total);
}

}  // namespace

double EigenSystem::orthonormality_defect() const {
  const std::size_t N = points(), K = kmax();
  const Mat Q(vectors.data(), long(N), long(K));
  const Eigen::MatrixXd G = Q.transpose() * Q;
  return (G - Eigen::MatrixXd::Identity(long(K), long(K))).cwiseAbs().maxCoeff();
}

double EigenSystem::eigenfunction(std::size_t k, double rr) const {
  if (rr >= r_max) return 0.0;
  const std::size_t N = points();
  const double norm = 1.0 / std::sqrt(4.0 * kPi * h);
  const double* q = vec(k);
  const auto st = stencil(rr, h, N);
  const long N1 = long(N) + 1;
  auto U = [&](long j) -> double {
    if (j < 0) j = 1;
    if (j == 0) return norm * (4.0 * q[0] / r[0] - q[1] / r[1]) / 3.0;
    if (j >= N1) return j == N1 ? 0.0 : -(norm * q[N - 1] / r[N - 1]);
    return norm * q[j - 1] / r[j - 1];
  };
  return st.w[0] * U(st.j - 1) + st.w[1] * U(st.j) + st.w[2] * U(st.j + 1) + st.w[3] * U(st.j + 2);
}

RadialProfile EigenSystem::eigenfunction_profile(std::size_t k, GridPtr grid) const {
  return RadialProfile::sample(grid, [&](double rr) { return eigenfunction(k, rr); });
}

std::string EigenSystem::describe() const {
  std::ostringstream os;
  os << "fd2-dirichlet(r_max=" << r_max << ",points=" << points() << ",kmax=" << kmax()
     << ",eig-correction=h2/12,V=" << potential_tag << ")";
  return os.str();
}

EigenSystem build_eigensystem(const RadialProfile& V, double r_max, std::size_t points, std::size_t kmax) {
  if (V.grid->dim() != 3) throw std::domain_error("eigensystem: the radial reduction needs n = 3");
  if (points < 16 || !(r_max > 0.0)) throw std::domain_error("eigensystem: bad discretisation");
  if (kmax == 0 || kmax > points / 4)
    throw std::domain_error("eigensystem: spectral-resolution error, kmax must not exceed points / 4");
  EigenSystem sys;
  sys.r_max = r_max;
  sys.h = r_max / double(points + 1);
  const double h = sys.h, ih2 = 1.0 / (h * h);
  sys.r.resize(points);
  sys.potential.resize(points);
  std::vector<double> d(points), e(points, -ih2);
  for (std::size_t i = 0; i < points; ++i) {
    sys.r[i] = h * double(i + 1);
    sys.potential[i] = V(sys.r[i]);
    if (sys.potential[i] < 0.0) throw std::domain_error("eigensystem: potential must be nonnegative");
    d[i] = 2.0 * ih2 + sys.potential[i];
  }
  std::vector<double> w(points);
  sys.vectors.assign(points * kmax, 0.0);
  std::vector<lapack_int> support(2 * kmax);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', lapack_int(points), d.data(), e.data(), 0.0,
                                         0.0, 1, lapack_int(kmax), &found, w.data(), sys.vectors.data(),
                                         lapack_int(points), lapack_int(kmax), support.data(), &tryrac);
  if (info != 0 || std::size_t(found) != kmax) throw std::runtime_error("eigensystem: dstemr failed");
  sys.raw_lambda.assign(w.begin(), w.begin() + long(kmax));
  sys.lambda.resize(kmax);
  for (std::size_t k = 0; k < kmax; ++k) {
    double* q = sys.vectors.data() + k * points;
    if (q[0] < 0.0)
      for (std::size_t i = 0; i < points; ++i) q[i] = -q[i];
    double corr = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const double a = sys.potential[i] - sys.raw_lambda[k];
      corr += a * a * q[i] * q[i];
    }
    sys.lambda[k] = sys.raw_lambda[k] + h * h / 12.0 * corr;
  }
  std::ostringstream tag;
  tag << V.grid->describe() << "#" << std::hash<std::string>{}(std::string(
                                            reinterpret_cast<const char*>(V.values.data()),
                                            V.values.size() * sizeof(double)));
  sys.potential_tag = tag.str();
  return sys;
}

std::string to_string(Multiplier m) {
  switch (m) {
    case Multiplier::semigroup: return "e^{-tL}";
    case Multiplier::g_integrand: return "tLe^{-tL}";
    case Multiplier::s_integrand: return "t^2Le^{-t^2L}";
  }
  return "?";
}

double multiplier_value(Multiplier m, double t, double lambda) {
  switch (m) {
    case Multiplier::semigroup: return std::exp(-t * lambda);
    case Multiplier::g_integrand: return t * lambda * std::exp(-t * lambda);
    case Multiplier::s_integrand: return t * t * lambda * std::exp(-t * t * lambda);
  }
  return 0.0;
}

std::vector<double> apply_on_nodes(const EigenSystem& sys, const std::vector<double>& u, double t,
                                   Multiplier m) {
  const std::size_t N = sys.points(), K = sys.kmax();
  if (u.size() != N) throw std::domain_error("apply_on_nodes: size mismatch");
  auto c = coefficients(sys, u);
  for (std::size_t k = 0; k < K; ++k) c[k] *= multiplier_value(m, t, sys.lambda[k]);
  std::vector<double> out(N);
  Eigen::Map<Eigen::VectorXd>(out.data(), long(N)).noalias() = basis(sys) * Vec(c.data(), long(K));
  for (std::size_t i = 0; i < N; ++i) out[i] /= sys.r[i];
  return out;
}

double spectral_tail_mass(const EigenSystem& sys, const RadialProfile& f) {
  const auto u = sample_nodes(sys, f);
  return tail_of(sys, u, coefficients(sys, u));
}

namespace {

RadialProfile to_grid(const EigenSystem& sys, const double* u, GridPtr grid) {
  const auto U = extend(u, sys.points());
  RadialProfile out(grid, std::vector<double>(grid->size(), 0.0));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double rr = grid->node(i);
    if (rr < sys.r_max) out.values[i] = eval(U, stencil(rr, sys.h, sys.points()));
  }
  return out;
}

void warn_tail(double tail, Warnings* warn) {
  if (warn && tail > kSpectralTailTolerance) {
    std::ostringstream os;
    os << "spectral tail mass " << tail << " exceeds " << kSpectralTailTolerance;
    warn->add(os.str());
  }
}

}  // namespace

RadialProfile schrodinger_apply(const EigenSystem& sys, const RadialProfile& f, double t, Multiplier m,
                                Warnings* warn) {
  if (!(t > 0.0)) throw std::domain_error("schrodinger_apply: t must be positive");
  const auto u = sample_nodes(sys, f);
  warn_tail(tail_of(sys, u, coefficients(sys, u)), warn);
  const auto out = apply_on_nodes(sys, u, t, m);
  return to_grid(sys, out.data(), f.grid);
}

HeatField schrodinger_field(const EigenSystem& sys, const RadialProfile& f, const TimeGrid& times, Multiplier m,
                            Exec exec) {
  const std::size_t N = sys.points(), K = sys.kmax(), M = times.size(), G = f.grid->size();
  const auto u = sample_nodes(sys, f);
  const auto c = coefficients(sys, u);
  HeatField hf;
  hf.op = m;
  hf.tail_mass = tail_of(sys, u, c);
  warn_tail(hf.tail_mass, &hf.warnings);
  std::vector<double> B(K * M);
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t k = 0; k < K; ++k) B[j * K + k] = c[k] * multiplier_value(m, times.node(j), sys.lambda[k]);
  std::vector<double> W(N * M, 0.0);
  if (exec == Exec::parallel) {
    Eigen::Map<Eigen::MatrixXd>(W.data(), long(N), long(M)).noalias() = basis(sys) * Mat(B.data(), long(K), long(M));
  } else {
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < K; ++k) {
        const double b = B[j * K + k];
        const double* q = sys.vec(k);
        double* w = W.data() + j * N;
        for (std::size_t i = 0; i < N; ++i) w[i] += q[i] * b;
      }
  }
  std::vector<Stencil> st(G);
  for (std::size_t i = 0; i < G; ++i) st[i] = stencil(f.grid->node(i), sys.h, N);
  hf.field.grid = f.grid;
  hf.field.times = times;
  hf.field.data.assign(G * M, 0.0);
  auto column = [&](std::size_t j) {
    double* w = W.data() + j * N;
    for (std::size_t i = 0; i < N; ++i) w[i] /= sys.r[i];
    const auto U = extend(w, N);
    for (std::size_t i = 0; i < G; ++i)
      if (f.grid->node(i) < sys.r_max) hf.field.data[j * G + i] = eval(U, st[i]);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long j = 0; j < long(M); ++j) column(std::size_t(j));
  } else {
    for (std::size_t j = 0; j < M; ++j) column(j);
  }
  return hf;
}

double radial_kernel(const EigenSystem& sys, double t, double r, double s, Multiplier m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < sys.kmax(); ++k)
    acc += multiplier_value(m, t, sys.lambda[k]) * sys.eigenfunction(k, r) * sys.eigenfunction(k, s);
  return acc;
}

double radial_kernel_dt(const EigenSystem& sys, double t, double r, double s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < sys.kmax(); ++k)
    acc -= sys.lambda[k] * std::exp(-t * sys.lambda[k]) * sys.eigenfunction(k, r) * sys.eigenfunction(k, s);
  return acc;
}

KernelFit kernel_bound_check(const EigenSystem& sys, int k, double N, const CriticalRadius& rho,
                             const std::vector<KernelSample>& samples) {
  if (k != 0 && k != 1) throw std::domain_error("kernel_bound_check: k must be 0 or 1");
  KernelFit fit;
  fit.k = k;
  fit.N = N;
  struct Point {
    double log_a, d2t, log_phi;
    KernelSample at;
  };
  std::vector<Point> pts;
  std::size_t truncated = 0, negative = 0, floor = 0;
  const double lmax = sys.lambda.back();
  for (const auto& sm : samples) {
    if (sm.t * lmax < 30.0) {
      ++truncated;
      continue;
    }
    const double K = k == 0 ? radial_kernel(sys, sm.t, sm.r, sm.s) : radial_kernel_dt(sys, sm.t, sm.r, sm.s);
    const double unit = std::pow(4.0 * kPi * sm.t, -1.5) * std::pow(sm.t, -k);
    if (k == 0 && K < -1e-10 * unit) {
      ++negative;
      continue;
    }
    // below this the eigen-sum is rounding noise and says nothing about decay
    if (std::abs(K) < 1e-8 * unit) {
      ++floor;
      continue;
    }
    double phi = 1.0;
    if (!rho.is_infinite()) phi += std::sqrt(sm.t) / rho.at(sm.r) + std::sqrt(sm.t) / rho.at(sm.s);
    pts.push_back({std::log(std::abs(K) / unit), (sm.r - sm.s) * (sm.r - sm.s) / sm.t, std::log(phi), sm});
  }
  fit.used = pts.size();
  fit.excluded = truncated + negative + floor;
  if (floor) fit.warnings.add(std::to_string(floor) + " samples excluded: kernel below the reconstruction floor");
  if (truncated) fit.warnings.add(std::to_string(truncated) + " samples excluded: spectral truncation at small t");
  if (negative) fit.warnings.add(std::to_string(negative) + " samples excluded: negative reconstructed kernel");
  if (pts.empty()) return fit;
  auto logC = [&](double c, std::size_t* arg) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double v = pts[i].log_a + c * pts[i].d2t + N * pts[i].log_phi;
      if (v > best) {
        best = v;
        if (arg) *arg = i;
      }
    }
    return best;
  };
  const double base = logC(0.0, nullptr);
  double c_fit = 0.0;
  for (int j = 1; j <= 128; ++j) {
    const double c = j / 256.0;
    if (logC(c, nullptr) <= base + 1e-3) c_fit = c;
  }
  std::size_t arg = 0;
  fit.c = c_fit;
  fit.C = std::exp(logC(c_fit, &arg));
  fit.worst = pts[arg].at;
  return fit;
}

}  // namespace sqlab
