#pragma once

#include <functional>

#include "sqlab/radial.hpp"

namespace sqlab {

// e^{t Delta} f for a radial f (n = 1 or 3) by the exact Gaussian kernel integrated
// over spheres |y| = s. `scale` sets the quadrature resolution (default sqrt(t));
// applications that share a scale use identical quadrature nodes.
RadialProfile gaussian_apply(const RadialProfile& f, double t, double scale = 0.0, Exec exec = Exec::parallel);

// psi_t * f with psi(z) = (|z|^2 / 2 - n) e^{-|z|^2 / 4} and psi_t(z) = t^{-n} psi(z / t).
// Default scale is t.
RadialProfile psi_apply(const RadialProfile& f, double t, double scale = 0.0, Exec exec = Exec::parallel);

// c_n = (4 pi)^{-n/2} / 2, so that t^2 Delta e^{t^2 Delta} f = c_n psi_t * f
double psi_constant(int n);

// t^2 Delta e^{t^2 Delta} f by a five-point difference of gaussian_apply in the time
// parameter tau = t^2, all evaluations on the quadrature of scale t
RadialProfile laplacian_heat_fd(const RadialProfile& f, double t, double rel_step = 1e-2,
                                Exec exec = Exec::parallel);

// Radial kernels: the integral of the kernel over {|y| = s}, evaluated at |x| = r.
double gaussian_shell_kernel(int n, double t, double r, double s);
double psi_shell_kernel(int n, double t, double r, double s);

// (k * (f 1_{B(x, b)}))(y) for a radial kernel k(|y - z|) negligible beyond `reach`,
// with y on the ray through x at signed position lambda (|x| = r). In n = 3 the
// inner sphere integrals are exact through the s f(s) antiderivative; `scale` sets
// the quadrature resolution in |y - z|. With `outside` the ball is replaced by its
// complement.
double truncated_convolution_on_axis(const BallIntegrator& f, double r, double b, double lambda,
                                     const std::function<double(double)>& kernel, double reach, double scale, bool outside = false);

}  // namespace sqlab
