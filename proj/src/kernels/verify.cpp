#include "hmlab/kernels/verify.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace hmlab::kernels {

namespace {

template <class F>
double gk(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
}

}  // namespace

double free_kernel_apply(const RadialFn& phi, double r, double t, const KernelParams& params, double s_lo,
                         double s_hi) {
  auto f = [&](double s) { return eval_H(r, s, t, params) * phi(s) * std::pow(s, params.mu - 1.0); };
  const double w = std::sqrt(t);
  // Break points: the Gaussian window [r - 40 sqrt t, r + 40 sqrt t] and r itself.
  std::vector<double> cuts{s_lo, std::max(s_lo, r - 40.0 * w), std::clamp(r, s_lo, s_hi),
                           std::min(s_hi, r + 40.0 * w), s_hi};
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    if (cuts[k - 1] == 0.0) {
      // s = u^2 removes the s^{mu-1} endpoint singularity.
      sum += gk([&](double u) { return 2.0 * u * f(u * u); }, 0.0, std::sqrt(cuts[k]));
    } else {
      sum += gk(f, cuts[k - 1], cuts[k]);
    }
  }
  return sum;
}

double mass_integral(double r, double t, const KernelParams& params) {
  const double hi = r + 60.0 * std::sqrt(t);
  return free_kernel_apply([](double) { return 1.0; }, r, t, params, 0.0, hi);
}

double heat_residual_H(double r, double s, double t, const KernelParams& params, double hr, double ht) {
  const double dr = hr * r;
  const double dt = ht * t;
  auto H = [&](double rr, double tt) { return eval_H(rr, s, tt, params); };
  const double h0 = H(r, t);
  const double h_t = (H(r, t + dt) - H(r, t - dt)) / (2.0 * dt);
  const double h_r = (H(r + dr, t) - H(r - dr, t)) / (2.0 * dr);
  const double h_rr = (H(r + dr, t) - 2.0 * h0 + H(r - dr, t)) / (dr * dr);
  return (h_t - h_rr - (params.mu - 1.0) / r * h_r) / h0 * t;
}

double bessel_ode_residual(double x, double mu, double h) {
  // Ratios I(x +- h) / I(x) = e^{+-h} I1(x +- h) / I1(x) avoid forming e^{x}.
  const double i0 = eval_I_scaled(x, mu);
  const double ip = std::exp(h) * eval_I_scaled(x + h, mu) / i0;
  const double im = std::exp(-h) * eval_I_scaled(x - h, mu) / i0;
  const double d1 = (ip - im) / (2.0 * h);
  const double d2 = (ip - 2.0 + im) / (h * h);
  return d2 + (mu - 1.0) / x * d1 - 1.0;
}

}  // namespace hmlab::kernels
