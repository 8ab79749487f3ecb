#pragma once

#include <cstddef>

namespace hmlab::kernels {

// Real dimension mu > 1, annulus [rho, R] and the unit-mass constant c_mu.
struct KernelParams {
  double mu = 2.0;
  double rho = 0.0;
  double R = 1.0;
  double c_mu = 0.0;

  // Validates mu > 1, rho >= 0, R > rho and fills c_mu.
  static KernelParams make(double mu, double rho, double R);
};

// c_mu such that int_0^inf H(r,s,t) s^{mu-1} ds = 1.
//
// At r = 0 the integral is elementary, which gives
//   c_mu = 2^{1-mu} / (sqrt(pi) Gamma((mu-1)/2)).
double normalization_constant(double mu);

// e^{-x} I(x) = int_0^pi exp(x (cos th - 1)) sin^{mu-2} th dth, evaluated without
// forming e^{x}. Substituting y = -cos th turns this into a Gauss-Jacobi integral
// int_{-1}^{1} e^{-x(1+y)} (1-y^2)^{(mu-3)/2} dy, used for x <= 50; above that the
// variable w = x(1+y) gives a generalized Gauss-Laguerre integral.
double eval_I_scaled(double x, double mu);

// Radial heat kernel in real dimension mu:
//   H = c_mu t^{-mu/2} exp(-(r-s)^2 / 4t) eval_I_scaled(rs/2t).
double eval_H(double r, double s, double t, const KernelParams& params);

// H divided by the Gaussian envelope t^{-1/2} (rs+t)^{-(mu-1)/2} exp(-(r-s)^2/4t).
// The Gaussian factors cancel analytically, so the ratio only depends on x = rs/2t.
struct SandwichRatio {
  double ratio = 0.0;
  double x = 0.0;
};
SandwichRatio check_H_sandwich(double r, double s, double t, const KernelParams& params);

struct SandwichSweep {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t samples = 0;
  double spread() const { return max_ratio / min_ratio; }
};
// Log-uniform n^3 sweep of (r, s, t) over [lo, hi]^3.
SandwichSweep sandwich_sweep(const KernelParams& params, double lo, double hi, std::size_t n);

struct WeightExponent {
  double a = 0.0;
};

// w^a(r, t) = (r^2 / (r^2 + t))^{a/2}.
double weight_w(WeightExponent a, double r, double t);

}  // namespace hmlab::kernels
