#pragma once

#include "hmlab/kernels/heat_kernel.hpp"
#include "hmlab/kernels/radial_evolution.hpp"

namespace hmlab::kernels {

// Adaptive Gauss-Kronrod value of int_0^inf H(r,s,t) s^{mu-1} ds (should be 1).
double mass_integral(double r, double t, const KernelParams& params);

// int_{s_lo}^{s_hi} H(r,s,t) phi(s) s^{mu-1} ds by adaptive quadrature, with the
// Gaussian window around s = r split out so narrow kernels are resolved.
double free_kernel_apply(const RadialFn& phi, double r, double t, const KernelParams& params, double s_lo,
                         double s_hi);

// (d_t - Delta_mu) H(., s, t) at r by centered differences with relative steps
// hr * r and ht * t, divided by H so the result is scale-free.
double heat_residual_H(double r, double s, double t, const KernelParams& params, double hr, double ht);

// I'' + ((mu-1)/x) I' - I at x for I(x) = e^{x} eval_I_scaled(x), by centered differences
// with step h, divided by I(x).
double bessel_ode_residual(double x, double mu, double h);

}  // namespace hmlab::kernels
