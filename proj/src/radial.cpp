#include "sqlab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sqlab {

namespace {

// 3-point Gauss-Legendre on [-1, 1]; exact through degree 5
constexpr double kG3x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kG3w[3] = {0.5555555555555556, 0.8888888888888888, 0.5555555555555556};

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// integral of c u^e over [a, b] with a >= 0
double power_integral(double c, double e, double a, double b) {
  if (c == 0.0 || b <= a) return 0.0;
  const double q = e + 1.0;
  if (std::abs(q) < 1e-14) {
    if (a <= 0.0) throw std::domain_error("divergent integral at the origin");
    return c * std::log(b / a);
  }
  if (q < 0.0 && a <= 0.0) throw std::domain_error("divergent integral at the origin");
  return c * (std::pow(b, q) - std::pow(a, q)) / q;
}

}  // namespace

RadialGrid::RadialGrid(int dim, std::vector<double> r) : dim_(dim), r_(std::move(r)) {
  if (dim_ != 1 && dim_ != 3) throw std::domain_error("grid dimension must be 1 or 3");
  if (r_.size() < 3) throw std::domain_error("grid needs at least 3 nodes");
  if (r_[0] != 0.0) throw std::domain_error("first node must be 0");
  for (std::size_t i = 1; i < r_.size(); ++i)
    if (!(r_[i] > r_[i - 1])) throw std::domain_error("grid nodes must increase");
  w_.assign(r_.size(), 0.0);
  const int k = dim_ - 1;
  for (std::size_t i = 0; i + 1 < r_.size(); ++i) {
    const double a = r_[i], b = r_[i + 1], hw = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int g = 0; g < 3; ++g) {
      const double u = c + hw * kG3x[g];
      const double wt = hw * kG3w[g] * ipow(u, k);
      w_[i] += wt * (b - u) / (b - a);
      w_[i + 1] += wt * (u - a) / (b - a);
    }
  }
}

RadialGrid RadialGrid::geometric(int dim, double r_max, std::size_t K, double r_first) {
  if (!(r_first > 0.0 && r_first < r_max)) throw std::domain_error("need 0 < r_first < r_max");
  if (K < 3) throw std::domain_error("grid needs at least 3 nodes");
  std::vector<double> r(K);
  r[0] = 0.0;
  const double q = std::log(r_max / r_first) / double(K - 2);
  for (std::size_t i = 1; i < K; ++i) r[i] = r_first * std::exp(q * double(i - 1));
  r[K - 1] = r_max;
  RadialGrid g(dim, std::move(r));
  std::ostringstream os;
  os << "geometric(n=" << dim << ",r_max=" << r_max << ",K=" << K << ",r1=" << r_first << ")";
  g.kind_ = os.str();
  return g;
}

RadialGrid RadialGrid::uniform(int dim, double r_max, std::size_t K) {
  std::vector<double> r(K);
  for (std::size_t i = 0; i < K; ++i) r[i] = r_max * double(i) / double(K - 1);
  RadialGrid g(dim, std::move(r));
  std::ostringstream os;
  os << "uniform(n=" << dim << ",r_max=" << r_max << ",K=" << K << ")";
  g.kind_ = os.str();
  return g;
}

RadialGrid RadialGrid::from_nodes(int dim, std::vector<double> nodes) {
  RadialGrid g(dim, std::move(nodes));
  g.kind_ = "nodes(K=" + std::to_string(g.size()) + ")";
  return g;
}

RadialGrid RadialGrid::standard(int dim) { return geometric(dim, 20.0, 2048, 1e-3); }

double RadialGrid::surface() const { return dim_ == 1 ? 2.0 : 4.0 * kPi; }

double RadialGrid::ball_volume(double R) const {
  return dim_ == 1 ? 2.0 * R : 4.0 * kPi / 3.0 * R * R * R;
}

std::size_t RadialGrid::locate(double r) const {
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  std::size_t i = it == r_.begin() ? 0 : std::size_t(it - r_.begin()) - 1;
  return std::min(i, r_.size() - 2);
}

std::string RadialGrid::describe() const { return kind_; }

GridPtr make_grid(RadialGrid g) { return std::make_shared<const RadialGrid>(std::move(g)); }

RadialProfile::RadialProfile(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) throw std::domain_error("profile size does not match grid");
}

RadialProfile RadialProfile::sample(GridPtr g, const std::function<double(double)>& f) {
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g->node(i));
  return RadialProfile(std::move(g), std::move(v));
}

RadialProfile RadialProfile::zeros(GridPtr g) {
  std::vector<double> v(g->size(), 0.0);
  return RadialProfile(std::move(g), std::move(v));
}

double RadialProfile::operator()(double r) const {
  const auto& x = grid->nodes();
  const std::size_t K = x.size();
  if (r > x[K - 1]) {
    switch (tail) {
      case Extension::zero: return 0.0;
      case Extension::constant: return values[K - 1];
      case Extension::power: return values[K - 1] * std::pow(r / x[K - 1], tail_exponent);
    }
  }
  if (head_exponent && r < x[1]) return values[1] * std::pow(r / x[1], *head_exponent);
  const std::size_t i = grid->locate(r);
  const double s = (r - x[i]) / (x[i + 1] - x[i]);
  return values[i] + s * (values[i + 1] - values[i]);
}

double estimate_head_exponent(const RadialProfile& h) {
  const auto& x = h.grid->nodes();
  const double a = h.values[1], b = h.values[2];
  if (!(a > 0.0 && b > 0.0)) return 0.0;
  return std::log(b / a) / std::log(x[2] / x[1]);
}

double slice_area(double d, double R, double s, int n) {
  if (d < 0.0 || s < 0.0 || !(R > 0.0)) throw std::domain_error("slice_area: negative input");
  if (n == 1) {
    double c = 0.0;
    if (std::abs(s - d) < R) c += 1.0;
    if (std::abs(-s - d) < R) c += 1.0;
    return c;
  }
  if (n != 3) throw std::domain_error("slice_area: n must be 1 or 3");
  if (s == 0.0) return 0.0;
  if (d == 0.0) return s < R ? 4.0 * kPi * s * s : 0.0;
  const double c = std::clamp((s * s + d * d - R * R) / (2.0 * s * d), -1.0, 1.0);
  return 2.0 * kPi * s * s * (1.0 - c);
}

BallIntegrator::BallIntegrator(const RadialProfile& h) : h_(h) {
  const auto& x = h_.grid->nodes();
  const std::size_t K = x.size();
  r1_ = x[1];
  for (int k = 0; k < 4; ++k) {
    auto& c = cum_[k];
    c.assign(K, 0.0);
    for (std::size_t i = 1; i + 1 < K; ++i) {
      const double a = x[i], b = x[i + 1], hw = 0.5 * (b - a), m = 0.5 * (a + b);
      double acc = 0.0;
      for (int g = 0; g < 3; ++g) {
        const double u = m + hw * kG3x[g];
        const double hv = h_.values[i] + (u - a) / (b - a) * (h_.values[i + 1] - h_.values[i]);
        acc += kG3w[g] * hv * ipow(u, k);
      }
      c[i + 1] = c[i] + hw * acc;
    }
  }
}

double BallIntegrator::head_part(int k, double a, double b) const {
  if (b <= a) return 0.0;
  if (h_.head_exponent) {
    const double c = h_.values[1] / std::pow(r1_, *h_.head_exponent);
    return power_integral(c, *h_.head_exponent + k, a, b);
  }
  const double h0 = h_.values[0], h1 = h_.values[1];
  const double hw = 0.5 * (b - a), m = 0.5 * (a + b);
  double acc = 0.0;
  for (int g = 0; g < 3; ++g) {
    const double u = m + hw * kG3x[g];
    acc += kG3w[g] * (h0 + u / r1_ * (h1 - h0)) * ipow(u, k);
  }
  return hw * acc;
}

double BallIntegrator::tail_part(int k, double a, double b) const {
  if (b <= a) return 0.0;
  const double rm = h_.grid->r_max(), hl = h_.values.back();
  switch (h_.tail) {
    case Extension::zero: return 0.0;
    case Extension::constant: return power_integral(hl, k, a, b);
    case Extension::power:
      return power_integral(hl / std::pow(rm, h_.tail_exponent), h_.tail_exponent + k, a, b);
  }
  return 0.0;
}

double BallIntegrator::from_first(int k, double s) const {
  const auto& x = h_.grid->nodes();
  const std::size_t K = x.size();
  if (s < r1_) return -head_part(k, s, r1_);
  if (s >= x[K - 1]) return cum_[k][K - 1] + tail_part(k, x[K - 1], s);
  const std::size_t i = h_.grid->locate(s);
  const double a = x[i], b = x[i + 1];
  const double hw = 0.5 * (s - a), m = 0.5 * (s + a);
  double acc = 0.0;
  for (int g = 0; g < 3; ++g) {
    const double u = m + hw * kG3x[g];
    const double hv = h_.values[i] + (u - a) / (b - a) * (h_.values[i + 1] - h_.values[i]);
    acc += kG3w[g] * hv * ipow(u, k);
  }
  return cum_[k][i] + hw * acc;
}

double BallIntegrator::moment(int k, double a, double b) const {
  if (b <= a) return 0.0;
  if (b <= r1_) return head_part(k, a, b);
  return from_first(k, b) - from_first(k, a);
}

// Lens part of an n=3 ball, integrated piece by piece with the pointwise slice
// area, which avoids cancellation between prefix moments for thin lenses.
double BallIntegrator::lens_local(double d, double R, double lo, double hi) const {
  const auto& x = h_.grid->nodes();
  auto area = [&](double s) { return kPi * s / d * (R * R - (s - d) * (s - d)); };
  double total = 0.0;
  double a = lo;
  if (a < r1_) {
    const double b = std::min(hi, r1_);
    const double c1 = -kPi / d * (d * d - R * R), c2 = 2.0 * kPi, c3 = -kPi / d;
    // c1 vanishes when the ball touches the origin, where the first moment may diverge
    if (c1 != 0.0) total += c1 * head_part(1, a, b);
    total += c2 * head_part(2, a, b) + c3 * head_part(3, a, b);
    a = b;
  }
  while (a < hi && a < x.back()) {
    const std::size_t i = h_.grid->locate(a);
    const double b = std::min(hi, x[i + 1]);
    const double hw = 0.5 * (b - a), m = 0.5 * (a + b);
    double acc = 0.0;
    for (int g = 0; g < 3; ++g) {
      const double u = m + hw * kG3x[g];
      const double hv = h_.values[i] + (u - x[i]) / (x[i + 1] - x[i]) * (h_.values[i + 1] - h_.values[i]);
      acc += kG3w[g] * hv * area(u);
    }
    total += hw * acc;
    if (b <= a) break;
    a = b;
  }
  if (hi > x.back()) {
    const double s0 = std::max(lo, x.back());
    const double c1 = -kPi / d * (d * d - R * R), c2 = 2.0 * kPi, c3 = -kPi / d;
    total += c1 * tail_part(1, s0, hi) + c2 * tail_part(2, s0, hi) + c3 * tail_part(3, s0, hi);
  }
  return total;
}

double BallIntegrator::ball(double d, double R) const {
  if (d < 0.0 || !(R > 0.0)) throw std::domain_error("ball: need d >= 0 and R > 0");
  const int n = h_.grid->dim();
  if (n == 1) {
    if (d == 0.0) return 2.0 * moment(0, 0.0, R);
    const double full = R > d ? 2.0 * moment(0, 0.0, R - d) : 0.0;
    return full + moment(0, std::abs(R - d), R + d);
  }
  if (d == 0.0) return 4.0 * kPi * moment(2, 0.0, R);
  const double full = R > d ? 4.0 * kPi * moment(2, 0.0, R - d) : 0.0;
  const double lo = std::abs(R - d), hi = R + d;
  const auto& x = h_.grid->nodes();
  const std::size_t ia = lo < x.back() ? h_.grid->locate(lo) : x.size();
  const std::size_t ib = hi < x.back() ? h_.grid->locate(hi) : x.size();
  double lens;
  if (ib - ia <= 64) {
    lens = lens_local(d, R, lo, hi);
  } else {
    lens = 2.0 * kPi * moment(2, lo, hi) - kPi / d * moment(3, lo, hi);
    if (d != R) lens -= kPi / d * (d * d - R * R) * moment(1, lo, hi);
  }
  return full + lens;
}

double BallIntegrator::average(double d, double R) const {
  return ball(d, R) / h_.grid->ball_volume(R);
}

double integrate_ball(const RadialProfile& h, const BallSpec& B) { return BallIntegrator(h).ball(B); }

double integrate_radial(const RadialProfile& h) {
  const int n = h.grid->dim();
  const double rm = h.grid->r_max();
  BallIntegrator bi(h);
  double v = bi.moment(n - 1, 0.0, rm);
  const double hl = h.values.back();
  if (hl != 0.0) {
    if (h.tail == Extension::constant) return std::numeric_limits<double>::infinity();
    if (h.tail == Extension::power) {
      const double q = h.tail_exponent + n;
      if (q >= 0.0) return std::numeric_limits<double>::infinity();
      v += -hl * rm * std::pow(rm, n - 1) / q;
    }
  }
  return h.grid->surface() * v;
}

double lp_norm(const RadialProfile& f, const RadialProfile& w, double p) {
  RadialProfile g(f.grid, std::vector<double>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) g.values[i] = std::pow(std::abs(f.values[i]), p) * w.values[i];
  if (f.head_exponent || w.head_exponent)
    g.head_exponent = p * f.head_exponent.value_or(0.0) + w.head_exponent.value_or(0.0);
  if (f.tail != Extension::zero && w.tail != Extension::zero) {
    g.tail = Extension::power;
    g.tail_exponent = p * (f.tail == Extension::power ? f.tail_exponent : 0.0) +
                      (w.tail == Extension::power ? w.tail_exponent : 0.0);
  }
  return std::pow(integrate_radial(g), 1.0 / p);
}

double lp_norm(const RadialProfile& f, double p) {
  RadialProfile one(f.grid, std::vector<double>(f.size(), 1.0));
  one.tail = Extension::constant;
  return lp_norm(f, one, p);
}

TimeGrid TimeGrid::log_spaced(double t0, double t1, std::size_t M) {
  if (!(t0 > 0.0 && t1 > t0) || M < 2) throw std::domain_error("time grid: need 0 < t0 < t1, M >= 2");
  TimeGrid g;
  g.h_ = std::log(t1 / t0) / double(M - 1);
  g.t_.resize(M);
  g.w_.assign(M, g.h_);
  for (std::size_t j = 0; j < M; ++j) g.t_[j] = t0 * std::exp(g.h_ * double(j));
  g.t_[M - 1] = t1;
  g.w_[0] = g.w_[M - 1] = 0.5 * g.h_;
  return g;
}

TimeGrid TimeGrid::standard() { return log_spaced(1e-3, 1e3, 256); }

std::string TimeGrid::describe() const {
  std::ostringstream os;
  os << "log(t0=" << t_.front() << ",t1=" << t_.back() << ",M=" << t_.size() << ")";
  return os.str();
}

RadialProfile RTField::slice(std::size_t j) const {
  const std::size_t K = grid->size();
  return RadialProfile(grid, std::vector<double>(data.begin() + j * K, data.begin() + (j + 1) * K));
}

ConeResult integrate_cone_shell(const RTField& u, double x_dist, double alpha, double t_lo, double t_hi) {
  if (!(alpha > 0.0)) throw std::domain_error("cone aperture must be positive");
  const int n = u.grid->dim();
  const std::size_t K = u.grid->size();
  const auto& t = u.times.nodes();
  const double eps = 1e-12;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < t.size(); ++j)
    if (t[j] >= t_lo * (1 - eps) && t[j] <= t_hi * (1 + eps)) idx.push_back(j);
  ConeResult res;
  if (idx.size() < 2) return res;
  const double h = u.times.log_step();
  for (std::size_t m = 0; m < idx.size(); ++m) {
    const std::size_t j = idx[m];
    RadialProfile sq(u.grid, std::vector<double>(K));
    for (std::size_t i = 0; i < K; ++i) sq.values[i] = u.at(i, j) * u.at(i, j);
    const double R = alpha * t[j];
    if (x_dist + R > u.grid->r_max()) res.truncated = true;
    const double inner = BallIntegrator(sq).ball(x_dist, R) / std::pow(t[j], n);
    const double wt = (m == 0 || m + 1 == idx.size()) ? 0.5 * h : h;
    res.value += wt * inner;
  }
  return res;
}

}  // namespace sqlab
