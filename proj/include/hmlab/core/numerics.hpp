#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hmlab {

// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are ignored.
// Inputs are taken by value: the sweep overwrites them.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

// Time levels 0 = t_0 < t_1 < ... < t_m = t_end. Steps start at first_step and grow
// geometrically by `growth` until capped at max_step. growth = 1 gives uniform steps.
struct TimeSchedule {
  double t_end = 1.0;
  double first_step = 1e-3;
  double growth = 1.0;
  double max_step = 1e300;

  std::vector<double> levels() const;
  static TimeSchedule uniform(double t_end, std::size_t steps);
};

// Fourth-order Gregory quadrature weights for n equispaced nodes with unit spacing
// (falls back to trapezoid for n < 6).
std::vector<double> gregory_weights(std::size_t n);

// Trapezoid rule over (possibly non-uniform) abscissae.
double trapezoid(std::span<const double> x, std::span<const double> y);

// Least squares fit y = a + b x; returns {a, b}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hmlab
