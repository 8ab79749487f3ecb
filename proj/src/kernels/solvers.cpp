#include "hmlab/kernels/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "hmlab/core/errors.hpp"

namespace hmlab::kernels {

namespace {

void require_matching_grid(const RadialGrid& grid, const KernelParams& params) {
  if (!(params.rho > 0.0)) throw DomainError("Dirichlet problem needs rho > 0 (operator singular at origin)");
  const double tol = 1e-12;
  if (std::abs(grid.r_lo() - params.rho) > tol * params.rho || std::abs(grid.r_hi() - params.R) > tol * params.R) {
    throw GridError("grid must span [rho, R]");
  }
}

std::vector<double> time_levels(const RadialGrid& grid, double t_end, const SolverOptions& opts) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  return opts.schedule.value_or(default_schedule(grid, t_end)).levels();
}

RadialOperator heat_operator(const KernelParams& params) { return {params.mu - 2.0, 0.0}; }

}  // namespace

TimeSchedule default_schedule(const RadialGrid& grid, double t_end) {
  TimeSchedule s;
  s.t_end = t_end;
  s.max_step = t_end / 50.0;
  const double cell = grid.r_lo() * grid.ds();
  s.first_step = std::clamp(cell * cell, t_end * 1e-7, s.max_step);
  s.growth = 1.02;
  return s;
}

KernelField solve_ivp(const RadialFn& phi, const KernelParams& params, double t_end, const RadialGrid& grid,
                      const SolverOptions& opts) {
  require_matching_grid(grid, params);
  const auto times = time_levels(grid, t_end, opts);
  EvolutionProblem p;
  p.op = heat_operator(params);
  p.initial.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p.initial[i] = phi(grid.r(i));
  p.inner = [](double) { return 0.0; };
  p.outer = [](double) { return 0.0; };
  p.theta = opts.theta;
  return evolve(grid, times, p);
}

double boundary_profile_h(double r, const KernelParams& params) {
  if (r < params.rho * (1.0 - 1e-12) || r > params.R * (1.0 + 1e-12)) {
    throw DomainError("boundary profile evaluated outside [rho, R]");
  }
  if (std::abs(params.mu - 2.0) < 1e-6) return std::log(params.R / r) / std::log(params.R / params.rho);
  const double e = 2.0 - params.mu;
  // Scaled by rho so that large exponents stay finite.
  const double x = std::pow(r / params.rho, e);
  const double xr = std::pow(params.R / params.rho, e);
  return (x - xr) / (1.0 - xr);
}

KernelField solve_boundary(const RadialFn& psi, const KernelParams& params, const RadialGrid& grid, double t_end,
                           const SolverOptions& opts) {
  require_matching_grid(grid, params);
  const auto times = time_levels(grid, t_end, opts);
  EvolutionProblem p;
  p.op = heat_operator(params);
  p.initial.assign(grid.size(), 0.0);
  p.inner = psi;
  p.outer = [](double) { return 0.0; };
  p.theta = opts.theta;
  return evolve(grid, times, p);
}

KernelField eval_G(const RadialGrid& grid, const KernelParams& params, double t_end, const SolverOptions& opts) {
  const KernelField y1 = solve_boundary([](double) { return 1.0; }, params, grid, t_end, opts);
  const std::size_t m = y1.n_times();
  std::vector<double> times(y1.times().begin() + 1, y1.times().end());
  KernelField G(grid, times);
  for (std::size_t n = 1; n < m; ++n) {
    const double dt = y1.times()[n] - y1.times()[n - 1];
    for (std::size_t i = 0; i < grid.size(); ++i) G(n - 1, i) = (y1(n, i) - y1(n - 1, i)) / dt;
  }
  return G;
}

std::vector<double> integrate_G(const KernelField& G, std::size_t n) {
  std::vector<double> sum(G.n_nodes(), 0.0);
  double t_prev = 0.0;
  for (std::size_t m = 0; m <= n && m < G.n_times(); ++m) {
    const double dt = G.times()[m] - t_prev;
    t_prev = G.times()[m];
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += G(m, i) * dt;
  }
  return sum;
}

std::vector<double> running_l2(const RadialFn& psi, std::span<const double> times) {
  std::vector<double> out(times.size(), 0.0);
  double acc = 0.0;
  double prev = psi(times[0]);
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double cur = psi(times[n]);
    acc += 0.5 * (times[n] - times[n - 1]) * (prev * prev + cur * cur);
    prev = cur;
    out[n] = std::sqrt(acc);
  }
  return out;
}

EnvelopeReport initial_value_envelope(const KernelField& v0, const KernelParams& params, double A, double k,
                                      double t_min) {
  EnvelopeReport rep;
  const auto& grid = v0.grid();
  for (std::size_t n = 0; n < v0.n_times(); ++n) {
    const double t = v0.times()[n];
    if (t < t_min || t <= 0.0) continue;
    const double wR = weight_w({params.mu - k}, params.R, t);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double r = grid.r(i);
      const double env = A * std::pow(r, -k) * weight_w({k}, r, t) * wR;
      const double q = std::abs(v0(n, i)) / env;
      ++rep.samples;
      if (q > rep.constant) rep = {q, r, t, rep.samples};
    }
  }
  return rep;
}

EnvelopeReport boundary_value_envelope(const KernelField& v1, const RadialFn& psi, const KernelParams& params,
                                       double t_min, double max_exponent) {
  EnvelopeReport rep;
  const auto& grid = v1.grid();
  const auto l2 = running_l2(psi, v1.times());
  for (std::size_t n = 1; n < v1.n_times(); ++n) {
    const double t = v1.times()[n];
    if (t < t_min || l2[n] <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double r = grid.r(i);
      if (r < 2.0 * params.rho) continue;
      const double d = r - params.rho;
      const double expo = d * d / (6.0 * t);
      if (expo > max_exponent) continue;
      const double env = std::exp(-expo) * std::pow(params.rho, params.mu - 2.0) * std::pow(r, 1.0 - params.mu) * l2[n];
      const double q = std::abs(v1(n, i)) / env;
      ++rep.samples;
      if (q > rep.constant) rep = {q, r, t, rep.samples};
    }
  }
  return rep;
}

EnvelopeReport g_envelope(const KernelField& G, const KernelParams& params, double t_min, double max_exponent,
                          std::size_t min_cells) {
  EnvelopeReport rep;
  const auto& grid = G.grid();
  const double rho = params.rho;
  for (std::size_t n = 0; n < G.n_times(); ++n) {
    const double t = G.times()[n];
    if (t < t_min) continue;
    for (std::size_t i = min_cells; i + 1 < grid.size(); ++i) {
      const double r = grid.r(i);
      const double d = r - rho;
      const double expo = d * d / (5.0 * t);
      if (expo > max_exponent) continue;
      const double cutoff = t <= 1.0 ? std::min(d / std::sqrt(t), 1.0) : std::min(d, 1.0);
      const double env = std::exp(-expo) * std::pow(rho, params.mu - 2.0) / t *
                         std::pow(t + rho * rho, 1.0 - 0.5 * params.mu) * cutoff;
      const double q = std::abs(G(n, i)) / env;
      ++rep.samples;
      if (q > rep.constant) rep = {q, r, t, rep.samples};
    }
  }
  return rep;
}

}  // namespace hmlab::kernels
