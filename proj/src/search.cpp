#include "sqlab/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <omp.h>

namespace sqlab {

namespace {

std::vector<double> geom(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  const double q = std::log(b / a) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = a * std::exp(q * double(i));
  v[n - 1] = b;
  return v;
}

std::vector<double> with_midpoints(const std::vector<double>& v) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
    if (i + 1 < v.size()) out.push_back(v[i] > 0.0 ? std::sqrt(v[i] * v[i + 1]) : 0.5 * v[i + 1]);
  }
  return out;
}

struct Best {
  double v = -std::numeric_limits<double>::infinity();
  std::size_t idx = std::numeric_limits<std::size_t>::max();
};

inline bool better(double v, std::size_t i, const Best& b) {
  return v > b.v || (v == b.v && i < b.idx);
}

}  // namespace

BallFamily BallFamily::tensor(double d_min, double d_max, std::size_t nd, double R_min, double R_max,
                              std::size_t nR, double reach) {
  if (!(d_min > 0.0 && d_max > d_min && R_min > 0.0 && R_max > R_min))
    throw std::domain_error("ball family: bad ranges");
  BallFamily f;
  f.d.push_back(0.0);
  if (nd > 1) {
    auto g = geom(d_min, d_max, nd - 1);
    f.d.insert(f.d.end(), g.begin(), g.end());
  }
  f.R = geom(R_min, R_max, nR);
  f.reach = reach;
  return f;
}

BallFamily BallFamily::refined() const {
  BallFamily f;
  f.d = with_midpoints(d);
  f.R = with_midpoints(R);
  f.reach = reach;
  return f;
}

std::string BallFamily::describe() const {
  std::ostringstream os;
  os << "tensor(nd=" << d.size() << ",d_max=" << d.back() << ",nR=" << R.size() << ",R=[" << R.front()
     << "," << R.back() << "],reach=" << reach << ")";
  return os.str();
}

SupResult ball_sup(const BallFamily& fam, const BallObjective& f, Exec exec, bool refine) {
  const std::size_t nd = fam.d.size(), nR = fam.R.size(), N = nd * nR;
  SupResult res;
  res.family = fam.describe();
  Best best;
  std::size_t evaluated = 0, excluded = 0;
  auto visit = [&](std::size_t k, Best& b, std::size_t& ev, std::size_t& ex) {
    const double d = fam.d[k / nR], R = fam.R[k % nR];
    if (d + R > fam.reach) return;
    const double v = f(d, R);
    if (std::isnan(v)) {
      ++ex;
      return;
    }
    ++ev;
    if (better(v, k, b)) b = {v, k};
  };
  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < N; ++k) visit(k, best, evaluated, excluded);
  } else {
#pragma omp parallel
    {
      Best local;
      std::size_t ev = 0, ex = 0;
#pragma omp for schedule(dynamic, 64) nowait
      for (std::size_t k = 0; k < N; ++k) visit(k, local, ev, ex);
#pragma omp critical
      {
        if (better(local.v, local.idx, best)) best = local;
        evaluated += ev;
        excluded += ex;
      }
    }
  }
  res.evaluated = evaluated;
  res.excluded = excluded;
  if (best.idx == std::numeric_limits<std::size_t>::max()) {
    res.value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  std::size_t id = best.idx / nR, iR = best.idx % nR;
  double d = fam.d[id], R = fam.R[iR], v = best.v;
  res.grid_value = v;
  if (refine) {
    double sd = 0.0;
    if (id + 1 < nd) sd = fam.d[id + 1] - d;
    if (id > 0) sd = std::max(sd, d - fam.d[id - 1]);
    if (sd <= 0.0) sd = 0.1 * R;
    double su = nR > 1 ? std::log(fam.R[1] / fam.R[0]) : 0.1;
    auto eval = [&](double dd, double RR) {
      if (dd < 0.0 || dd > fam.d.back() || RR < fam.R.front() || RR > fam.R.back() || dd + RR > fam.reach)
        return -std::numeric_limits<double>::infinity();
      const double w = f(dd, RR);
      return std::isnan(w) ? -std::numeric_limits<double>::infinity() : w;
    };
    for (int it = 0; it < 600; ++it) {
      bool moved = false;
      const double cand[4][2] = {{d + sd, R}, {std::max(0.0, d - sd), R}, {d, R * std::exp(su)},
                                 {d, R * std::exp(-su)}};
      for (auto& c : cand) {
        const double w = eval(c[0], c[1]);
        if (w > v) {
          v = w;
          d = c[0];
          R = c[1];
          moved = true;
        }
      }
      if (!moved) {
        sd *= 0.5;
        su *= 0.5;
        if (su < 1e-7 && sd < 1e-7 * (R + d)) break;
      }
    }
  }
  res.value = v;
  res.arg = {d, R};
  return res;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::domain_error("fit: need matching samples");
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("fit: entries must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx <= 0.0) throw std::domain_error("fit: abscissae are all equal");
  FitResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.points = n;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    sse += e * e;
  }
  r.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return r;
}

}  // namespace sqlab
