#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "hmlab/core/errors.hpp"
#include "hmlab/neck/decay.hpp"
#include "hmlab/neck/energy_scale.hpp"
#include "hmlab/neck/schedule.hpp"

using namespace hmlab;
using namespace hmlab::neck;
using flow::CorotationalState;

namespace {

constexpr double kPi = std::numbers::pi;

CorotationalState make_state(double r_lo, double r_hi, double npd, std::function<double(double)> h) {
  return CorotationalState::from_profile(RadialGrid::per_decade(r_lo, r_hi, npd), std::move(h), 1);
}

CorotationalState bubble_state(double sigma, double r_lo = 1e-6, double r_hi = 1.0, double npd = 200) {
  return make_state(r_lo, r_hi, npd, [sigma](double r) { return flow::bubble(r, sigma); });
}

// Bubble energy of the rescaled annulus (x/2, x) by quadrature of 2 pi * 8 s / (1 + s^2)^2.
double bubble_annulus_energy(double x) {
  auto f = [](double s) { return 2.0 * kPi * 8.0 * s / ((1.0 + s * s) * (1.0 + s * s)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.5 * x, x, 15, 1e-14);
}

// Largest x with annulus energy >= eps (energy decreases past its peak).
double bubble_crossing(double eps) {
  double lo = 1.0, hi = 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (bubble_annulus_energy(mid) >= eps ? lo : hi) = mid;
  }
  return lo;
}

EnergyScaleSeries synthetic_series(const std::function<double(double)>& lambda, double T, std::size_t n,
                                   double tau_hi, double tau_lo) {
  EnergyScaleSeries s;
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = tau_hi * std::pow(tau_lo / tau_hi, static_cast<double>(i) / (n - 1));
    s.times.push_back(T - tau);
    s.lambda.push_back(lambda(tau));
    s.uncertainty.push_back(0.0);
    s.energy_total.push_back(0.0);
  }
  return s;
}

flow::Trajectory single_snapshot(const CorotationalState& st) {
  flow::Trajectory t;
  t.snapshots.push_back(st);
  t.current = st;
  return t;
}

}  // namespace

TEST_SUITE("neck") {
  TEST_CASE("outer energy scale of constant maps and bubbles") {
    const auto flat = make_state(1e-4, 1.0, 50, [](double) { return kPi; });
    const auto e0 = outer_energy_scale(flat, 1.0, 1.0);
    CHECK(e0.lambda == 0.0);
    CHECK(e0.certified);

    const double sigma = 1e-3;
    const auto st = bubble_state(sigma);
    const auto e = outer_energy_scale(st, 1.0, 1.0);
    const double oracle = bubble_crossing(1.0);
    MESSAGE("lambda / sigma = " << e.lambda / sigma << ", oracle " << oracle);
    CHECK(e.certified);
    CHECK(e.sup_above < 1.0);
    CHECK(std::abs(e.lambda / sigma - oracle) <= 2.0 * e.uncertainty / sigma + 1e-6 * oracle);
    CHECK(e.uncertainty == doctest::Approx(e.lambda * std::expm1(st.grid.ds())));
    CHECK(annulus_energy(st, 0.5) == doctest::Approx(bubble_annulus_energy(0.5 / sigma)).epsilon(1e-6));

    // Large threshold: every annulus below it.
    CHECK(outer_energy_scale(st, 100.0, 1.0).lambda == 0.0);
    CHECK_THROWS_AS(outer_energy_scale(st, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(outer_energy_scale(st, 0.0, 1.0), DomainError);
  }

  TEST_CASE("outer energy scale is monotone in epsilon") {
    const auto st = make_state(1e-6, 1.0, 100, [](double r) { return flow::bubble(r, 1e-3) + 0.3 * r; });
    double prev = 2.0;
    for (double eps : {0.05, 0.1, 0.3, 1.0, 3.0, 10.0, 20.0}) {
      const auto e = outer_energy_scale(st, eps, 1.0);
      CHECK(e.certified);
      CHECK(e.lambda <= prev);
      prev = e.lambda;
    }
  }

  TEST_CASE("energy scale series carries certificate and csv columns") {
    flow::Trajectory traj;
    for (double sigma : {1e-2, 3e-3, 1e-3, 3e-4}) {
      auto st = bubble_state(sigma, 1e-6, 1.0, 60);
      st.time = -std::log(sigma);
      traj.snapshots.push_back(st);
    }
    const auto s = energy_scale_series(traj, 1.0, 1.0);
    CHECK(s.all_certified);
    const auto t = s.table();
    CHECK(t.header == std::vector<std::string>{"t", "lambda", "lambda_uncertainty", "E_total"});
    CHECK(t.rows() == 4);
    for (std::size_t i = 1; i < 4; ++i) CHECK(s.lambda[i] < s.lambda[i - 1]);
    for (double E : s.energy_total) CHECK(E == doctest::Approx(8.0 * kPi).epsilon(1e-3));
  }

  TEST_CASE("exponent fit recovers exact power laws") {
    const double T = 0.8;
    for (double p : {0.6, 0.75, 1.0, 1.5}) {
      const auto s = synthetic_series([p](double tau) { return std::pow(tau, p); }, T, 40, 1e-2, 1e-7);
      const auto given = fit_blowup_exponent(s, T);
      CHECK(given.fit.exponent == doctest::Approx(p).epsilon(1e-9));
      CHECK(given.fit.residual < 1e-9);
      CHECK(given.reliable);
      const auto est = fit_blowup_exponent(s);
      MESSAGE("p=" << p << " fitted " << est.fit.exponent << " T_est " << est.T_est << " after " << est.iterations);
      CHECK(std::abs(est.fit.exponent - p) < 0.01);
      CHECK(est.T_est == doctest::Approx(T).epsilon(1e-6));
      CHECK(est.type_ii_decreasing == (p > 0.5));
    }
  }

  TEST_CASE("exponent of the logarithmic rate decreases toward one") {
    // lambda = tau / ln(tau)^2 has local exponent 1 + 2/|ln tau| > 1.
    const double T = 1.0;
    auto rate = [](double tau) { return tau / (std::log(tau) * std::log(tau)); };
    double prev = 10.0;
    for (double tau_hi : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const auto s = synthetic_series(rate, T, 30, tau_hi, tau_hi * 1e-3);
      const auto f = fit_blowup_exponent(s, T);
      const double local = 1.0 + 2.0 / std::abs(std::log(std::sqrt(tau_hi * tau_hi * 1e-3)));
      MESSAGE("window top " << tau_hi << ": p = " << f.fit.exponent << " (local " << local << ")");
      CHECK(f.fit.exponent > 1.0);
      CHECK(f.fit.exponent < prev);
      CHECK(f.fit.exponent == doctest::Approx(local).epsilon(0.02));
      CHECK(f.type_ii_decreasing);
      prev = f.fit.exponent;
    }
  }

  TEST_CASE("exponent fit flags and preconditions") {
    auto s = synthetic_series([](double tau) { return std::pow(tau, 0.75); }, 1.0, 30, 1e-2, 1e-6);
    s.lambda[10] *= 1.5;
    CHECK_FALSE(fit_blowup_exponent(s, 1.0).reliable);
    const auto short_series = synthetic_series([](double tau) { return tau; }, 1.0, 12, 1e-2, 1e-4);
    CHECK_THROWS_AS(fit_blowup_exponent(short_series, 1.0), PreconditionError);
    FitOptions o;
    o.exclude_last = 0;
    CHECK(fit_blowup_exponent(short_series, 1.0, o).fit.samples == 12);
    CHECK_THROWS_AS(fit_blowup_exponent(s, 0.5), PreconditionError);
  }

  TEST_CASE("schedule identities") {
    const auto s = make_schedule(1e-50, 1.0, 0.5);
    CHECK(s.a == 144.0);
    const double lb = std::ldexp(1.0, -200) * std::pow(0.5, 144.0);
    const auto t = make_schedule(lb, 1.0, 0.5);
    CHECK(t.zeta == doctest::Approx(std::sqrt(2.0 * lb)).epsilon(1e-14));
    CHECK(t.rho / t.zeta == doctest::Approx(t.zeta).epsilon(1e-12));
    CHECK(t.base_regime);
    CHECK(t.admissible);
    CHECK(t.t0_offset == doctest::Approx(t.zeta * t.zeta / 0.25).epsilon(1e-14));
    for (double alpha : {0.25, 0.5, 1.0}) {
      const double kappa = 0.5;
      const double a = 72.0 * (1.0 + alpha) / alpha;
      const double l = std::exp(a * std::log(kappa) - 5.0);
      const auto u = make_schedule(l, alpha, kappa);
      CHECK(u.a * alpha == doctest::Approx(72.0 * (1.0 + alpha)).epsilon(1e-12));
      CHECK(u.rho / u.zeta == doctest::Approx(std::pow(u.zeta, alpha)).epsilon(1e-12));
      CHECK(u.rho1 / u.zeta == doctest::Approx(std::pow(u.zeta, 9.0 * alpha / 16.0)).epsilon(1e-12));
      CHECK(u.rho / kappa <= u.zeta);
    }
  }

  TEST_CASE("schedule preconditions") {
    CHECK_THROWS_AS(make_schedule(1e-4, 1.0, 0.5), ScheduleError);
    const auto u = make_schedule(1e-4, 1.0, 0.5, ScheduleMode::unchecked);
    CHECK_FALSE(u.base_regime);
    CHECK(u.zeta == doctest::Approx(std::sqrt(2e-4)));
    CHECK_THROWS_AS(make_schedule(1e-60, 1.0, -0.5), ScheduleError);
    CHECK_THROWS_AS(make_schedule(1e-60, 1.0, 0.75), ScheduleError);
    CHECK_THROWS_AS(make_schedule(1e-60, 0.0, 0.5), ScheduleError);
    CHECK_THROWS_AS(make_schedule(1e-60, 1.5, 0.5), ScheduleError);
    CHECK_THROWS_AS(make_schedule(0.0, 1.0, 0.5), ScheduleError);
  }

  TEST_CASE("neck decay of a constant map and a bubble") {
    const auto flat = make_state(1e-6, 1.0, 60, [](double) { return 0.0; });
    const auto sched = make_schedule(1e-3, 1.0, 0.5, ScheduleMode::unchecked);
    const auto c = check_neck_decay(flat, sched);
    CHECK(c.envelope_C == 0.0);
    CHECK(c.bounds_hold);

    const double sigma = 1e-3;
    const auto st = bubble_state(sigma, 1e-6, 1.0, 200);
    const double lambda1 = outer_energy_scale(st, 1.0, 1.0).lambda;
    const auto rep = check_neck_decay(st, make_schedule(lambda1, 1.0, 0.5, ScheduleMode::unchecked));
    // Closed form r|du| = 2 sqrt(2) x / (1 + x^2), x = r / sigma.
    double oracle = 0.0;
    for (double r : st.grid.nodes()) {
      if (r < rep.r_lo || r > rep.r_hi) continue;
      const double x = r / sigma;
      oracle = std::max(oracle, 2.0 * std::sqrt(2.0) * x / (1.0 + x * x) / std::cbrt(lambda1 / r + r));
    }
    MESSAGE("bubble envelope C = " << rep.envelope_C << ", rdu exponent " << rep.rdu_fit.exponent);
    CHECK(rep.envelope_C == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(rep.inner_branch_dominates);
    CHECK(rep.resolved);
    CHECK(rep.envelope_C < 50.0);
    CHECK(rep.rdu_fit.exponent == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(rep.rdu_fit.residual >= 0.0);
    CHECK(rep.rdu_fit.lo < rep.rdu_fit.hi);

    // Inner end below the grid: flagged, no assertion.
    const auto under = check_neck_decay(st, make_schedule(1e-8, 1.0, 0.5, ScheduleMode::unchecked));
    CHECK_FALSE(under.resolved);
    CHECK_FALSE(under.bounds_hold);
  }

  TEST_CASE("neck decay constant is scale invariant") {
    auto profile = [](double r) { return flow::bubble(r, 2e-3) + 0.4 * r * r; };
    const auto st = make_state(1e-6, 1.0, 120, profile);
    const double sigma = 1e-3;
    CorotationalState sc = st;
    sc.grid = st.grid.scaled(sigma);
    sc.time = st.time * sigma * sigma;
    const double l = outer_energy_scale(st, 1.0, 1.0).lambda;
    const double ls = outer_energy_scale(sc, 1.0, sigma).lambda;
    CHECK(ls / sigma == doctest::Approx(l).epsilon(1e-9));
    NeckDecayOptions o, os;
    os.R = sigma;
    const auto a = check_neck_decay(st, make_schedule(l, 1.0, 0.5, ScheduleMode::unchecked), o);
    const auto b = check_neck_decay(sc, make_schedule(ls / sigma, 1.0, 0.5, ScheduleMode::unchecked), os);
    CHECK(std::abs(a.envelope_C - b.envelope_C) <= 1e-6 * a.envelope_C);
    CHECK(a.g_fit.exponent == doctest::Approx(b.g_fit.exponent).epsilon(1e-6));
  }

  TEST_CASE("evolution inequalities on stationary data") {
    const auto flat = make_state(0.1, 2.0, 100, [](double) { return 0.0; });
    const auto c = verify_evolution_inequalities(single_snapshot(flat), 0.5, 1.0, 0.9);
    CHECK(c.C_f == 0.0);
    CHECK(c.C_g == 0.0);
    CHECK(c.eta == 0.0);

    auto run = [](double npd) {
      const auto st = make_state(0.1, 2.0, npd, [](double r) { return flow::bubble(r); });
      return verify_evolution_inequalities(single_snapshot(st), 0.5, 1.0, 0.9);
    };
    const auto coarse = run(200), fine = run(400);
    MESSAGE("bubble C_f " << coarse.C_f << " -> " << fine.C_f << ", C_g " << coarse.C_g << " -> " << fine.C_g
                          << ", eta " << fine.eta);
    CHECK(std::isfinite(fine.C_f));
    CHECK(fine.within_ceiling);
    CHECK(std::abs(fine.C_f - coarse.C_f) <= 0.1 * std::max(fine.C_f, 1e-12));
    CHECK(std::abs(fine.C_g - coarse.C_g) <= 0.1 * std::max(fine.C_g, 1e-12));

    EvolutionOptions o;
    o.eps0 = 1e-3;
    const auto skipped = verify_evolution_inequalities(
        single_snapshot(make_state(0.1, 2.0, 100, [](double r) { return flow::bubble(r); })), 0.5, 1.0, 0.9, o);
    CHECK(skipped.skipped);
    CHECK(skipped.reason.find("eps0") != std::string::npos);
    CHECK_THROWS_AS(verify_evolution_inequalities(single_snapshot(flat), 3.0, 4.0, 0.9), GridError);
  }

  TEST_CASE("holder modulus") {
    const auto cube = make_state(1e-6, 1.0, 40, [](double r) { return std::cbrt(r); });
    const auto h = holder_modulus(cube, 1.0, 2.0);
    CHECK(h.C_holder == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(h.C_holder <= h.C_bound);
    CHECK(h.consistent);
    CHECK(h.envelope_verified);

    const auto flat = make_state(1e-6, 1.0, 40, [](double) { return kPi; });
    const auto z = holder_modulus(flat, 1.0, 2.0);
    CHECK(z.C_holder == 0.0);
    CHECK(z.consistent);

    // h - h(0) = (3/alpha)(r/R)^{alpha/3}, the antiderivative of (r/R)^{alpha/3} / r.
    for (double alpha : {0.5, 1.0}) {
      const double R = 1.0;
      const auto st = make_state(1e-9, 0.5, 80, [&](double r) { return 3.0 / alpha * std::pow(r / R, alpha / 3.0) * 0.1; });
      const auto rep = holder_modulus(st, alpha, R);
      CHECK(rep.C_integral == doctest::Approx(0.1).epsilon(1e-9));
      CHECK(rep.C_holder <= rep.C_bound * (1.0 + 1e-9));
      CHECK(rep.r.size() == rep.bound.size());
      for (std::size_t i = 0; i < rep.r.size(); ++i) CHECK(rep.increment[i] <= rep.bound[i] * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("admissible lambda_1 uses the window t1 - R^2 < t <= t1" * doctest::test_suite("neck")) {
  EnergyScaleSeries s;
  s.R = 0.5;
  s.times = {0.0, 0.7, 0.9, 1.0};
  s.lambda = {0.5, 0.1, 0.02, 0.01};
  // t = 0 lies outside (0.75, 1]; at t = 0.9 the slack is (0.1 / 0.25)^1 = 0.4.
  CHECK(admissible_lambda1(s, 1.0, 1.0) == doctest::Approx(0.02));
  s.lambda[2] = 0.4;
  CHECK(admissible_lambda1(s, 1.0, 1.0) == doctest::Approx(0.8 - 0.4));
}
