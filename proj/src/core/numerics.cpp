#include "hmlab/core/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "hmlab/core/errors.hpp"

namespace hmlab {

std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || n == 0) {
    throw GridError("tridiagonal system has inconsistent sizes");
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

std::vector<double> TimeSchedule::levels() const {
  if (!(t_end > 0.0) || !(first_step > 0.0) || !(growth >= 1.0) || !(max_step > 0.0)) {
    throw DomainError("time schedule needs t_end > 0, first_step > 0, growth >= 1");
  }
  std::vector<double> t{0.0};
  double dt = std::min(first_step, max_step);
  while (t.back() < t_end) {
    double next = t.back() + dt;
    // Absorb a sliver final step into the previous one.
    if (next > t_end || t_end - next < 1e-9 * dt) next = t_end;
    t.push_back(next);
    dt = std::min(dt * growth, max_step);
  }
  return t;
}

TimeSchedule TimeSchedule::uniform(double t_end, std::size_t steps) {
  TimeSchedule s;
  s.t_end = t_end;
  s.first_step = t_end / static_cast<double>(steps);
  s.growth = 1.0;
  s.max_step = s.first_step;
  return s;
}

std::vector<double> gregory_weights(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return std::vector<double>(n, 0.0);
  if (n < 6) {
    w.front() = w.back() = 0.5;
    return w;
  }
  constexpr double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (std::size_t k = 0; k < 3; ++k) {
    w[k] = ends[k];
    w[n - 1 - k] = ends[k];
  }
  return w;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) throw DomainError("line fit needs >= 2 paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("line fit abscissae are degenerate");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

}  // namespace hmlab
