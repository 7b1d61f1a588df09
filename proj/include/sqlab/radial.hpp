#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sqlab {

// Selects the OpenMP kernel or the serial reference path.
enum class Exec { serial, parallel };

constexpr double kPi = 3.14159265358979323846;

class RadialGrid {
 public:
  static RadialGrid geometric(int dim, double r_max, std::size_t K, double r_first);
  static RadialGrid uniform(int dim, double r_max, std::size_t K);
  static RadialGrid from_nodes(int dim, std::vector<double> nodes);
  // r_max = 20, K = 2048
  static RadialGrid standard(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return r_.size(); }
  const std::vector<double>& nodes() const { return r_; }
  double node(std::size_t i) const { return r_[i]; }
  // weights for the integral of h(r) r^{n-1} dr, exact for piecewise-linear h
  const std::vector<double>& weights() const { return w_; }
  double r_max() const { return r_.back(); }
  double surface() const;
  double ball_volume(double R) const;
  // index i with r_i <= r < r_{i+1}, clamped to [0, K-2]
  std::size_t locate(double r) const;
  std::string describe() const;

 private:
  RadialGrid(int dim, std::vector<double> r);
  int dim_ = 3;
  std::vector<double> r_;
  std::vector<double> w_;
  std::string kind_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(RadialGrid g);

enum class Extension { zero, constant, power };

struct RadialProfile {
  GridPtr grid;
  std::vector<double> values;
  Extension tail = Extension::zero;
  double tail_exponent = 0.0;
  // h(r) = h(r_1) (r / r_1)^b on [0, r_1]; unset means linear to the node at 0
  std::optional<double> head_exponent;

  RadialProfile() = default;
  RadialProfile(GridPtr g, std::vector<double> v);

  static RadialProfile sample(GridPtr g, const std::function<double(double)>& f);
  static RadialProfile zeros(GridPtr g);

  std::size_t size() const { return values.size(); }
  double operator()(double r) const;
  double operator[](std::size_t i) const { return values[i]; }
};

// log-log slope between the first two positive nodes
double estimate_head_exponent(const RadialProfile& h);

struct BallSpec {
  double d = 0.0;  // distance of the centre from the origin
  double R = 1.0;
};

// (n-1)-measure of {|y| = s} inside B(x, R), |x| = d
double slice_area(double d, double R, double s, int n);

// Integrals of a profile over balls via exact piecewise integration.
class BallIntegrator {
 public:
  explicit BallIntegrator(const RadialProfile& h);

  // integral of h(s) s^k over [a, b], k in 0..3
  double moment(int k, double a, double b) const;
  double ball(double d, double R) const;
  double ball(const BallSpec& B) const { return ball(B.d, B.R); }
  double average(double d, double R) const;
  const RadialProfile& profile() const { return h_; }

 private:
  double from_first(int k, double s) const;
  double head_part(int k, double a, double b) const;
  double tail_part(int k, double a, double b) const;
  double lens_local(double d, double R, double lo, double hi) const;

  RadialProfile h_;
  double r1_ = 0.0;
  std::array<std::vector<double>, 4> cum_;
};

double integrate_ball(const RadialProfile& h, const BallSpec& B);

// omega_{n-1} * integral_0^inf h(r) r^{n-1} dr, honouring head and tail extensions
double integrate_radial(const RadialProfile& h);

// (integral |f|^p w dx)^{1/p}; head exponents are combined when both are known
double lp_norm(const RadialProfile& f, const RadialProfile& w, double p);
double lp_norm(const RadialProfile& f, double p);

class TimeGrid {
 public:
  static TimeGrid log_spaced(double t0, double t1, std::size_t M);
  static TimeGrid standard();  // 256 nodes on [1e-3, 1e3]

  std::size_t size() const { return t_.size(); }
  const std::vector<double>& nodes() const { return t_; }
  double node(std::size_t j) const { return t_[j]; }
  // trapezoid weights in log t, i.e. for the measure dt/t
  const std::vector<double>& weights() const { return w_; }
  double log_step() const { return h_; }
  std::string describe() const;

 private:
  std::vector<double> t_, w_;
  double h_ = 0.0;
};

// Values u(r_i, t_j) stored row-major by time: data[j * K + i].
struct RTField {
  GridPtr grid;
  TimeGrid times;
  std::vector<double> data;
  double at(std::size_t i, std::size_t j) const { return data[j * grid->size() + i]; }
  RadialProfile slice(std::size_t j) const;
};

struct ConeResult {
  double value = 0.0;
  bool truncated = false;  // some cone section left the spatial grid
};

// integral over t in [t_lo, t_hi] of the integral over |x - y| < alpha t of
// |u(|y|, t)|^2 dy dt / t^{n+1}, with |x| = x_dist
ConeResult integrate_cone_shell(const RTField& u, double x_dist, double alpha, double t_lo,
                                double t_hi);

}  // namespace sqlab
