#include "hmlab/kernels/radial_evolution.hpp"

#include <algorithm>

#include "hmlab/core/errors.hpp"
#include "hmlab/core/numerics.hpp"

namespace hmlab::kernels {

namespace {

struct Coeffs {
  double lo, mid, hi;
};

// Row i of L: lo * v_{i-1} + mid * v_i + hi * v_{i+1}.
Coeffs row(const RadialGrid& grid, RadialOperator op, std::size_t i) {
  const double ds = grid.ds();
  const double inv_r2 = 1.0 / (grid.r(i) * grid.r(i));
  const double a = 1.0 / (ds * ds);
  const double b = op.drift / (2.0 * ds);
  return {inv_r2 * (a - b), inv_r2 * (-2.0 * a - op.potential), inv_r2 * (a + b)};
}

}  // namespace

std::vector<double> apply_operator(const RadialGrid& grid, RadialOperator op, std::span<const double> v) {
  const std::size_t n = grid.size();
  if (v.size() != n) throw GridError("operator input does not match grid");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Coeffs c = row(grid, op, i);
    out[i] = c.lo * v[i - 1] + c.mid * v[i] + c.hi * v[i + 1];
  }
  return out;
}

SpaceTimeField evolve(const RadialGrid& grid, std::span<const double> times, const EvolutionProblem& problem) {
  const std::size_t n = grid.size();
  if (n < 3) throw GridError("evolution needs at least 3 radial nodes");
  if (problem.initial.size() != n) throw GridError("initial data does not match grid");
  if (times.size() < 1) throw GridError("evolution needs at least one time level");
  if (!(problem.theta >= 0.0 && problem.theta <= 1.0)) throw DomainError("theta must lie in [0, 1]");

  SpaceTimeField out(grid, std::vector<double>(times.begin(), times.end()));
  auto first = out.slice(0);
  std::copy(problem.initial.begin(), problem.initial.end(), first.begin());

  std::vector<Coeffs> rows(n);
  for (std::size_t i = 1; i + 1 < n; ++i) rows[i] = row(grid, problem.op, i);

  const double theta = problem.theta;
  std::vector<double> f_old(n, 0.0), f_new(n, 0.0);
  auto eval_forcing = [&](double t, std::vector<double>& f) {
    if (!problem.forcing) return;
    for (std::size_t i = 1; i + 1 < n; ++i) f[i] = problem.forcing(grid.r(i), t);
  };
  eval_forcing(times[0], f_old);

  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  for (std::size_t m = 1; m < times.size(); ++m) {
    const double dt = times[m] - times[m - 1];
    if (!(dt > 0.0)) throw GridError("time levels must be strictly increasing");
    auto prev = out.slice(m - 1);
    eval_forcing(times[m], f_new);

    lower[0] = upper[0] = 0.0;
    diag[0] = 1.0;
    rhs[0] = problem.inner(times[m]);
    lower[n - 1] = upper[n - 1] = 0.0;
    diag[n - 1] = 1.0;
    rhs[n - 1] = problem.outer(times[m]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Coeffs& c = rows[i];
      const double explicit_part = c.lo * prev[i - 1] + c.mid * prev[i] + c.hi * prev[i + 1];
      lower[i] = -theta * dt * c.lo;
      diag[i] = 1.0 - theta * dt * c.mid;
      upper[i] = -theta * dt * c.hi;
      rhs[i] = prev[i] + (1.0 - theta) * dt * explicit_part + dt * (theta * f_new[i] + (1.0 - theta) * f_old[i]);
    }
    const auto next = solve_tridiagonal(lower, diag, upper, rhs);
    std::copy(next.begin(), next.end(), out.slice(m).begin());
    std::swap(f_old, f_new);
  }
  return out;
}

}  // namespace hmlab::kernels
