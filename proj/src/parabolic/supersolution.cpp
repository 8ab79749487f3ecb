#include "hmlab/parabolic/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmlab/core/errors.hpp"
#include "hmlab/kernels/heat_kernel.hpp"
#include "hmlab/kernels/solvers.hpp"

namespace hmlab::parabolic {

namespace {

std::vector<double> shifted_levels(const RadialGrid& grid, double t_end, double tau, const BarrierOptions& opts) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  auto t = opts.schedule.value_or(kernels::default_schedule(grid, t_end)).levels();
  for (double& x : t) x += tau;
  return t;
}

kernels::SolverOptions solver_options(const RadialGrid& grid, double t_end, const BarrierOptions& opts) {
  kernels::SolverOptions so;
  so.schedule = opts.schedule.value_or(kernels::default_schedule(grid, t_end));
  return so;
}

// r^nu * field, with the time axis moved to start at tau.
SpaceTimeField conjugate(const KernelField& v, double nu, double tau) {
  const auto& grid = v.grid();
  std::vector<double> t(v.times().begin(), v.times().end());
  for (double& x : t) x += tau;
  SpaceTimeField out(grid, std::move(t));
  for (std::size_t n = 0; n < v.n_times(); ++n)
    for (std::size_t i = 0; i < grid.size(); ++i) out(n, i) = std::pow(grid.r(i), nu) * v(n, i);
  return out;
}

void check_grid_span(const RadialGrid& grid, double lo) {
  if (std::abs(grid.r_lo() - lo) > 1e-12 * lo || std::abs(grid.r_hi() - 1.0) > 1e-12) {
    throw GridError("barrier grid must span [inner radius, 1]");
  }
}

// Smallest value of forcing - box_nu(power) beyond ten times its stencil error.
double forcing_deficit(const RadialGrid& grid, std::span<const double> power, BoxNuParams p,
                       const std::function<double(double)>& forcing, bool tolerant) {
  const auto image = apply_box_nu_static(grid, power, p);
  const auto trunc = spatial_truncation(grid, power, p);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double gap = forcing(grid.r(i)) - image[i] - (tolerant ? 10.0 * trunc[i] : 0.0);
    worst = std::max(worst, gap);
  }
  return worst;
}

// Discrete power rule on the log grid: the centered second difference maps e^{beta s}
// to beta_h^2 e^{beta s} with beta_h^2 = 2 (cosh(beta ds) - 1) / ds^2, so the stencil's
// box_nu image of r^beta is (nu^2 - beta_h^2) r^{beta-2} exactly.
double discrete_square(double beta, double ds) { return 2.0 * (std::cosh(beta * ds) - 1.0) / (ds * ds); }

// Exponent whose discrete square is nu^2 (slightly below nu): r^{+-nu_h} is discretely
// box_nu-harmonic.
double discrete_exponent(double nu, double ds) { return std::acosh(1.0 + 0.5 * nu * nu * ds * ds) / ds; }

SpaceTimeField add_profile(const SpaceTimeField& a, const SpaceTimeField* b, std::span<const double> profile) {
  SpaceTimeField out = a;
  for (std::size_t n = 0; n < out.n_times(); ++n)
    for (std::size_t i = 0; i < out.n_nodes(); ++i) out(n, i) += (b ? (*b)(n, i) : 0.0) + profile[i];
  return out;
}

}  // namespace

void SupersolutionSpec::validate_f() const {
  if (!(nu >= 0.0 && nu <= 1.0)) throw SpecError("nu must lie in [0, 1]");
  if (!(beta0 > -nu && beta0 < nu) || !(beta1 > -nu && beta1 < nu)) throw SpecError("need -nu < beta_i < nu");
  if (!(kappa > 0.0 && kappa <= 0.5)) throw SpecError("kappa must lie in (0, 1/2]");
  if (!(rho > 0.0 && rho < 1.0)) throw SpecError("rho must lie in (0, 1)");
  if (!(A >= 0.0)) throw SpecError("A must be non-negative");
}

void SupersolutionSpec::validate_g() const {
  validate_f();
  if (!(nu > 0.0)) throw SpecError("g-barrier needs nu > 0");
  if (!(gamma0 > -nu && gamma0 < beta0) || !(gamma1 > -nu && gamma1 < beta1)) {
    throw SpecError("need -nu < gamma_i < beta_i");
  }
  if (rho1 < rho) throw SpecError("rho1 < rho");
  if (rho1 > kappa) throw SpecError("rho1 > kappa");
  if (!(B >= 0.0)) throw SpecError("B must be non-negative");
}

double f_trace_bound(const SupersolutionSpec& s, double r) {
  return s.A * (std::pow(s.rho / r, s.beta0) + std::pow(r, s.beta1));
}

double g_trace_bound(const SupersolutionSpec& s, double r) {
  return s.A * (std::pow(s.rho / r, s.gamma0) + std::pow(r, s.gamma1));
}

double g_forcing(const SupersolutionSpec& s, double r) {
  return s.A / (r * r * r) * (std::pow(s.rho / r, s.beta0) + std::pow(r, s.beta1));
}

RadialGrid f_grid(const SupersolutionSpec& s, double nodes_per_decade) {
  return RadialGrid::per_decade(s.rho, 1.0, nodes_per_decade);
}

RadialGrid g_grid(const SupersolutionSpec& s, double nodes_per_decade) {
  return RadialGrid::per_decade(s.rho1, 1.0, nodes_per_decade);
}

Barrier build_supersolution_f(const SupersolutionSpec& spec, const kernels::RadialFn& f_initial,
                              const RadialGrid& grid, double t_end, const BarrierOptions& opts) {
  spec.validate_f();
  check_grid_span(grid, spec.rho);
  const double nu = spec.nu;
  const auto params = kernels::KernelParams::make(2.0 * (nu + 1.0), spec.rho, 1.0);
  auto seed = [&](double r) { return std::pow(r, -nu) * f_initial(r); };
  const auto v0 = kernels::solve_ivp(seed, params, t_end, grid, solver_options(grid, t_end, opts));

  Barrier out;
  out.kernel_part = conjugate(v0, nu, spec.tau);
  const double A = spec.A;
  const double nu_h = discrete_exponent(nu, grid.ds());
  double m = opts.multiplier > 0.0 ? opts.multiplier : 2.0;
  std::vector<double> power(grid.size());
  for (int k = 0;; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.r(i);
      power[i] = m * A * (std::pow(spec.rho / r, nu_h) + std::pow(r, nu_h)) - A * r * r / (4.0 - nu * nu);
    }
    const bool boundary_ok = power.front() >= A && power.back() >= A;
    const bool positive = std::all_of(power.begin(), power.end(), [](double x) { return x >= 0.0; });
    if ((boundary_ok && positive) || k >= opts.max_doublings) {
      out.doublings = k;
      break;
    }
    m *= 2.0;
  }
  out.multiplier = m;
  out.forcing_deficit =
      forcing_deficit(grid, power, BoxNuParams::make(nu), [A](double) { return A; }, false);
  out.value = add_profile(out.kernel_part, nullptr, power);
  return out;
}

Barrier build_supersolution_g(const SupersolutionSpec& spec, const kernels::RadialFn& g_initial,
                              const kernels::RadialFn& g_inner, const RadialGrid& grid, double t_end,
                              const BarrierOptions& opts) {
  spec.validate_g();
  check_grid_span(grid, spec.rho1);
  const double nu = spec.nu;
  const auto params = kernels::KernelParams::make(2.0 * (nu + 1.0), spec.rho1, 1.0);
  const auto so = solver_options(grid, t_end, opts);
  auto seed = [&](double r) { return std::pow(r, -nu - 1.0) * g_initial(r); };
  const auto v1 = kernels::solve_ivp(seed, params, t_end, grid, so);
  const double scale = std::pow(spec.rho1, -nu - 1.0);
  const double tau = spec.tau;
  const auto v2 = kernels::solve_boundary([&](double t) { return scale * g_inner(tau + t); }, params, grid, t_end, so);

  Barrier out;
  out.kernel_part = conjugate(v1, nu, tau);
  out.boundary_part = conjugate(v2, nu, tau);

  struct Term {
    double a, e;
  };
  const Term terms[2] = {{spec.A * std::pow(spec.rho, spec.beta0), -3.0 - spec.beta0}, {spec.A, spec.beta1 - 3.0}};
  const auto p = BoxNuParams::make(nu);
  auto forcing = [&](double r) { return g_forcing(spec, r); };

  const double ds = grid.ds();
  const double nu_h = discrete_exponent(nu, ds);
  double m = opts.multiplier > 0.0 ? opts.multiplier : 4.0;
  std::vector<double> power(grid.size());
  for (int k = 0;; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.r(i);
      double v = spec.A * std::pow(r, nu_h);
      for (const auto& term : terms) {
        const double beta = term.e + 2.0;
        const double d = nu * nu - discrete_square(beta, ds);
        if (std::abs(d) < 1e-12) {
          v += m * term.a / (2.0 * nu) * std::pow(r, -nu) * std::log(r / spec.rho1);
        } else if (d > 0.0) {
          v += m * term.a / d * std::pow(r, beta);
        } else {
          v += m * term.a / -d * (std::pow(spec.rho1, beta + nu_h) * std::pow(r, -nu_h) - std::pow(r, beta));
        }
      }
      power[i] = v;
    }
    const double deficit = forcing_deficit(grid, power, p, forcing, true);
    if (deficit <= 0.0 || k >= opts.max_doublings) {
      out.doublings = k;
      break;
    }
    m *= 2.0;
  }
  out.multiplier = m;
  out.forcing_deficit = forcing_deficit(grid, power, p, forcing, false);
  out.value = add_profile(out.kernel_part, &out.boundary_part, power);
  return out;
}

SpaceTimeField solve_subsolution_f(const SupersolutionSpec& spec, const kernels::RadialFn& f_initial,
                                   const RadialGrid& grid, double t_end, const BarrierOptions& opts) {
  spec.validate_f();
  check_grid_span(grid, spec.rho);
  const auto t = shifted_levels(grid, t_end, spec.tau, opts);
  kernels::EvolutionProblem prob;
  prob.op = {0.0, spec.nu * spec.nu};
  prob.initial.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) prob.initial[i] = f_initial(grid.r(i));
  const double A = spec.A;
  prob.inner = [A](double) { return A; };
  prob.outer = [A](double) { return A; };
  prob.forcing = [A](double, double) { return A; };
  return kernels::evolve(grid, t, prob);
}

SpaceTimeField solve_subsolution_g(const SupersolutionSpec& spec, const kernels::RadialFn& g_initial,
                                   const kernels::RadialFn& g_inner, const RadialGrid& grid, double t_end,
                                   const BarrierOptions& opts) {
  spec.validate_g();
  check_grid_span(grid, spec.rho1);
  const auto t = shifted_levels(grid, t_end, spec.tau, opts);
  kernels::EvolutionProblem prob;
  prob.op = {0.0, spec.nu * spec.nu};
  prob.initial.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) prob.initial[i] = g_initial(grid.r(i)) / grid.r(i);
  const double rho1 = spec.rho1;
  const double A = spec.A;
  prob.inner = [&g_inner, rho1](double time) { return g_inner(time) / rho1; };
  prob.outer = [A](double) { return A; };
  prob.forcing = [&spec](double r, double) { return g_forcing(spec, r); };
  return kernels::evolve(grid, t, prob);
}

SpaceTimeField times_r(const SpaceTimeField& q) {
  SpaceTimeField out = q;
  for (std::size_t n = 0; n < out.n_times(); ++n)
    for (std::size_t i = 0; i < out.n_nodes(); ++i) out(n, i) *= q.grid().r(i);
  return out;
}

namespace {

template <class Envelope>
ConclusionReport scan_window(const SupersolutionSpec& spec, double r_lo, const SpaceTimeField& barrier,
                             const SpaceTimeField& solution, Envelope env) {
  ConclusionReport rep;
  const auto& grid = barrier.grid();
  for (std::size_t n = 0; n < barrier.n_times(); ++n) {
    const double t = barrier.times()[n];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.r(i);
      if (r < r_lo || r > spec.kappa) continue;
      if (t < spec.tau + r * r / (spec.kappa * spec.kappa)) continue;
      const double e = env(r);
      rep.c_barrier = std::max(rep.c_barrier, std::abs(barrier(n, i)) / e);
      rep.c_solution = std::max(rep.c_solution, std::abs(solution(n, i)) / e);
      ++rep.samples;
    }
  }
  return rep;
}

}  // namespace

ConclusionReport conclusion_f(const SupersolutionSpec& s, const SpaceTimeField& barrier,
                              const SpaceTimeField& solution) {
  return scan_window(s, s.rho / s.kappa, barrier, solution, [&](double r) {
    return s.A * (std::pow(s.kappa, s.nu - s.beta0) * std::pow(s.rho / r, s.beta0) +
                  std::pow(s.kappa, s.nu - s.beta1) * std::pow(r, s.beta1));
  });
}

ConclusionReport conclusion_g(const SupersolutionSpec& s, const SpaceTimeField& barrier_g,
                              const SpaceTimeField& solution_g) {
  return scan_window(s, 2.0 * s.rho1, barrier_g, solution_g, [&](double r) {
    const double b = s.B * std::pow(s.rho1, s.nu - 1.0) * std::pow(r, -s.nu);
    const double a = std::pow(s.kappa, s.nu + s.gamma0 + 1.0) * std::pow(s.rho / r, s.gamma0) +
                     std::pow(s.kappa, s.nu - s.gamma1 + 1.0) * std::pow(r, s.gamma1) +
                     std::pow(s.rho / r, s.beta0) + std::pow(r, s.beta1);
    return b + s.A * a;
  });
}

}  // namespace hmlab::parabolic
