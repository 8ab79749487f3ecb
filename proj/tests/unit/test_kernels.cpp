#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hmlab/core/errors.hpp"
#include "hmlab/kernels/heat_kernel.hpp"
#include "hmlab/kernels/solvers.hpp"
#include "hmlab/kernels/verify.hpp"

using namespace hmlab;
using namespace hmlab::kernels;

namespace {

// Modified Bessel I_0 by its power series.
double bessel_i0_series(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 5000; ++k) {
    term *= (x / 2.0) * (x / 2.0) / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Angular average of the planar Gaussian heat kernel times the circle length 2 pi
// (radial mass is measured with s ds, not 2 pi s ds). Periodic trapezoid is spectral.
double planar_average(double r, double s, double t) {
  const int n = 4096;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / n;
    const double d2 = r * r + s * s - 2.0 * r * s * std::cos(phi);
    sum += std::exp(-d2 / (4.0 * t)) / (4.0 * std::numbers::pi * t);
  }
  return 2.0 * std::numbers::pi * sum / n;
}

// Composite Simpson mass integral on a dense window around s = r.
double simpson_mass(double r, double t, const KernelParams& p) {
  const double hi = r + 40.0 * std::sqrt(t);
  const int n = 200000;
  const double h = hi / n;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double s = j * h;
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    sum += w * eval_H(r, s, t, p) * std::pow(s, p.mu - 1.0);
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scaled integral anchors") {
    CHECK(eval_I_scaled(0.0, 2.0) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
    CHECK(eval_I_scaled(0.0, 3.0) == doctest::Approx(2.0).epsilon(1e-13));
    const double beta = std::exp(std::lgamma(0.5) + std::lgamma(0.85) - std::lgamma(1.35));
    CHECK(eval_I_scaled(0.0, 2.7) == doctest::Approx(beta).epsilon(1e-12));
    for (double x : {0.3, 1.0, 7.5, 49.0, 51.0, 300.0}) {
      const double oracle = std::numbers::pi * std::exp(-x) * bessel_i0_series(x);
      CHECK(eval_I_scaled(x, 2.0) == doctest::Approx(oracle).epsilon(1e-10));
    }
    CHECK_THROWS_AS(eval_I_scaled(1.0, 1.0), DomainError);
  }

  TEST_CASE("scaled integral is strictly decreasing and meets the Bessel ODE") {
    for (double mu : {1.5, 2.0, 2.7, 4.0}) {
      double prev = eval_I_scaled(0.0, mu);
      for (double x = 0.25; x < 400.0; x *= 1.5) {
        const double cur = eval_I_scaled(x, mu);
        CHECK(cur < prev);
        prev = cur;
      }
      for (double x : {0.5, 2.0, 20.0, 49.9, 50.1, 120.0}) CHECK(std::abs(bessel_ode_residual(x, mu, 1e-4)) < 1e-5);
    }
  }

  TEST_CASE("mu = 2 kernel equals the averaged planar Gaussian") {
    const auto p = KernelParams::make(2.0, 0.0, 1.0);
    CHECK(p.c_mu == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
    for (double r : {0.1, 1.0, 3.0})
      for (double s : {0.2, 1.5})
        for (double t : {0.05, 1.0}) {
          CHECK(eval_H(r, s, t, p) == doctest::Approx(planar_average(r, s, t)).epsilon(1e-10));
          CHECK(eval_H(r, s, t, p) == eval_H(s, r, t, p));
        }
  }

  TEST_CASE("unit mass against an independent Simpson oracle") {
    for (double mu : {1.5, 2.0, 3.0, 3.5}) {
      const auto p = KernelParams::make(mu, 0.0, 1.0);
      for (double r : {0.1, 2.0})
        for (double t : {0.01, 1.0}) {
          CHECK(simpson_mass(r, t, p) == doctest::Approx(1.0).epsilon(1e-6));
          CHECK(mass_integral(r, t, p) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
  }

  TEST_CASE("kernel solves the radial heat equation") {
    const auto p = KernelParams::make(2.5, 0.0, 1.0);
    const double coarse = std::abs(heat_residual_H(0.7, 0.5, 0.2, p, 1e-2, 1e-2));
    const double fine = std::abs(heat_residual_H(0.7, 0.5, 0.2, p, 5e-3, 5e-3));
    CHECK(fine < 1e-3);
    CHECK(fine < 0.3 * coarse);
  }

  TEST_CASE("sandwich ratio: small-x limit, large-x decay and sweep") {
    const auto p = KernelParams::make(3.0, 0.0, 1.0);
    const auto lim = check_H_sandwich(1e-6, 1e-6, 1.0, p);
    CHECK(lim.ratio == doctest::Approx(p.c_mu * eval_I_scaled(0.0, 3.0)).epsilon(1e-8));
    // I1(x) x^{(mu-1)/2} tends to a constant.
    const double a = eval_I_scaled(1e2, 2.5) * std::pow(1e2, 0.75);
    const double b = eval_I_scaled(1e6, 2.5) * std::pow(1e6, 0.75);
    CHECK(a / b == doctest::Approx(1.0).epsilon(0.02));
    const auto sw = sandwich_sweep(p, 1e-3, 1e3, 20);
    CHECK(sw.min_ratio > 0.0);
    CHECK(sw.spread() < 1e3);
    CHECK(sw.samples == 8000);
  }

  TEST_CASE("weight function") {
    CHECK(weight_w({2.5}, 0.3, 0.0) == 1.0);
    CHECK(weight_w({1.5}, 0.3, 3.0 * 0.09) == doctest::Approx(std::pow(2.0, -1.5)));
    CHECK(weight_w({1.0}, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(weight_w({1.0}, 0.0, 0.0), DomainError);
  }

  TEST_CASE("initial-value solver: zero data, maximum principle, free-kernel agreement") {
    const auto p = KernelParams::make(3.0, 0.1, 1.0);
    const auto grid = RadialGrid::log_uniform(0.1, 1.0, 4001);
    const auto zero = solve_ivp([](double) { return 0.0; }, p, 0.1, grid);
    CHECK(zero.max_abs() == 0.0);

    auto bump = [](double r) { return std::exp(-(r - 0.5) * (r - 0.5) / 0.004); };
    const auto v = solve_ivp(bump, p, 0.1, grid);
    CHECK(v.max_abs() <= 1.0 + 1e-10);
    CHECK(v.min_value() >= -1e-12);

    SolverOptions cn;
    cn.theta = 0.5;
    cn.schedule = TimeSchedule::uniform(0.002, 400);
    const auto w = solve_ivp(bump, p, 0.002, grid, cn);
    const auto n = w.n_times() - 1;
    for (double r : {0.4, 0.5, 0.55}) {
      const auto i = grid.nearest(r);
      const double oracle = free_kernel_apply(bump, grid.r(i), 0.002, p, 0.1, 1.0);
      CHECK(std::abs(w(n, i) - oracle) < 1e-4);
    }
    // Dirichlet kernel sits below the free kernel for non-negative data.
    const auto i = grid.nearest(0.8);
    const auto m = v.time_index(0.05);
    CHECK(v(m, i) <= free_kernel_apply(bump, grid.r(i), v.times()[m], p, 0.1, 1.0) + 1e-4);
    CHECK_THROWS_AS(solve_ivp(bump, KernelParams::make(3.0, 0.0, 1.0), 0.1, grid), DomainError);
  }

  TEST_CASE("boundary profile is harmonic with the right end values") {
    const auto p3 = KernelParams::make(3.0, 0.1, 1.0);
    CHECK(boundary_profile_h(0.1, p3) == doctest::Approx(1.0));
    CHECK(boundary_profile_h(1.0, p3) == doctest::Approx(0.0));
    const auto p = KernelParams::make(2.5, 0.1, 1.0);
    const auto grid = RadialGrid::log_uniform(0.1, 1.0, 2001);
    std::vector<double> h(grid.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = boundary_profile_h(grid.r(i), p);
    const auto lh = apply_operator(grid, {0.5, 0.0}, h);
    double worst = 0.0;
    for (double x : lh) worst = std::max(worst, std::abs(x));
    CHECK(worst < 1e-4);  // O(ds^2) for the grid stencil
    // Five-point centered differences of the closed form are accurate to ~1e-10.
    for (double r : {0.15, 0.3, 0.8}) {
      const double d = 1e-3 * r;
      auto H = [&](double x) { return boundary_profile_h(x, p); };
      const double h1 = (-H(r + 2 * d) + 8 * H(r + d) - 8 * H(r - d) + H(r - 2 * d)) / (12 * d);
      const double h2 = (-H(r + 2 * d) + 16 * H(r + d) - 30 * H(r) + 16 * H(r - d) - H(r - 2 * d)) / (12 * d * d);
      CHECK(std::abs(r * r * (h2 + 1.5 / r * h1)) < 1e-8);
    }
    const auto p2 = KernelParams::make(2.0, 0.1, 1.0);
    for (double r : {0.2, 0.5}) {
      const double lo = boundary_profile_h(r, KernelParams::make(2.0 - 1e-4, 0.1, 1.0));
      const double hi = boundary_profile_h(r, KernelParams::make(2.0 + 1e-4, 0.1, 1.0));
      CHECK(boundary_profile_h(r, p2) == doctest::Approx(std::log(1.0 / r) / std::log(10.0)));
      CHECK(0.5 * (lo + hi) == doctest::Approx(boundary_profile_h(r, p2)).epsilon(1e-7));
    }
  }

  TEST_CASE("boundary solver approaches the harmonic profile") {
    const auto p = KernelParams::make(3.0, 0.1, 1.0);
    const auto grid = RadialGrid::log_uniform(0.1, 1.0, 1201);
    const auto zero = solve_boundary([](double) { return 0.0; }, p, grid, 1.0);
    CHECK(zero.max_abs() == 0.0);
    const double T = 10.0 * 0.81;
    const auto v = solve_boundary([](double) { return 1.0; }, p, grid, T);
    const auto n = v.n_times() - 1;
    for (double r : {0.15, 0.3, 0.7}) {
      const auto i = grid.nearest(r);
      CHECK(std::abs(v(n, i) - boundary_profile_h(grid.r(i), p)) < 1e-4);
    }
    CHECK(v.max_abs() <= 1.0 + 1e-10);
    CHECK(v.min_value() >= -1e-12);
  }

  TEST_CASE("boundary kernel G: positivity, time integral, Duhamel and scaling") {
    const auto p = KernelParams::make(3.0, 0.1, 1.0);
    const auto grid = RadialGrid::log_uniform(0.1, 1.0, 801);
    const auto G = eval_G(grid, p, 8.0);
    CHECK(G.min_value() >= -1e-8);
    const auto integral = integrate_G(G, G.n_times() - 1);
    for (double r : {0.12, 0.3, 0.9}) {
      const auto i = grid.nearest(r);
      CHECK(std::abs(integral[i] - boundary_profile_h(grid.r(i), p)) < 1e-3);
    }

    // Discrete Duhamel: with uniform steps, v1 = sum psi_m G_{n-m+1} dt exactly.
    SolverOptions uni;
    uni.schedule = TimeSchedule::uniform(0.05, 100);
    auto psi = [](double t) { return std::sin(40.0 * t) + 0.5; };
    const auto v1 = solve_boundary(psi, p, grid, 0.05, uni);
    const auto Gu = eval_G(grid, p, 0.05, uni);
    const double dt = 0.05 / 100.0;
    const std::size_t n = 100;
    for (double r : {0.15, 0.4}) {
      const auto i = grid.nearest(r);
      double sum = 0.0;
      for (std::size_t m = 1; m <= n; ++m) sum += psi(v1.times()[m]) * Gu(n - m, i) * dt;
      CHECK(sum == doctest::Approx(v1(n, i)).epsilon(1e-10));
    }

    // G_[rho,R](r,t) = rho^{-2} G_[1,R/rho](r/rho, t/rho^2) on matched grids and schedules.
    const auto unit = KernelParams::make(3.0, 1.0, 10.0);
    const auto ugrid = grid.scaled(10.0);
    SolverOptions a, b;
    a.schedule = TimeSchedule{0.2, 1e-5, 1.05, 0.01};
    b.schedule = TimeSchedule{20.0, 1e-3, 1.05, 1.0};
    const auto g1 = eval_G(grid, p, 0.2, a);
    const auto g2 = eval_G(ugrid, unit, 20.0, b);
    REQUIRE(g1.n_times() == g2.n_times());
    for (std::size_t m : {std::size_t{3}, g1.n_times() / 2, g1.n_times() - 1}) {
      const auto i = grid.nearest(0.2);
      CHECK(g1(m, i) == doctest::Approx(100.0 * g2(m, i)).epsilon(1e-8));
    }
  }

  TEST_CASE("initial- and boundary-data envelopes hold with moderate constants") {
    struct Fixture {
      double mu, k;
    };
    for (const auto& f : {Fixture{3.0, 0.0}, Fixture{3.0, 1.0}, Fixture{2.5, 1.2}}) {
      const auto p = KernelParams::make(f.mu, 0.01, 1.0);
      const auto grid = RadialGrid::log_uniform(0.01, 1.0, 1201);
      const auto v0 = solve_ivp([&](double r) { return std::pow(r, -f.k); }, p, 1.0, grid);
      const auto rep = initial_value_envelope(v0, p, 1.0, f.k, 0.0);
      CHECK(rep.constant > 0.0);
      CHECK(rep.constant < 50.0);
    }
    const auto p = KernelParams::make(3.0, 0.05, 1.0);
    const auto grid = RadialGrid::log_uniform(0.05, 1.0, 1201);
    auto psi = [](double) { return 1.0; };
    const auto v1 = solve_boundary(psi, p, grid, 1.0);
    const auto rep = boundary_value_envelope(v1, psi, p, 1e-4, 20.0);
    CHECK(rep.samples > 1000);
    CHECK(rep.constant < 50.0);
    const auto G = eval_G(grid, p, 1.0);
    const auto g = g_envelope(G, p, 1e-4, 20.0, 8);
    CHECK(std::isfinite(g.constant));
    MESSAGE("G envelope constant " << g.constant);
  }
}
