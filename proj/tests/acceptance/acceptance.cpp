// Acceptance gate: one PASS/FAIL line per criterion. Exit status 1 if any fails.
// Usage: acceptance [output_dir]   (default: acceptance_out)

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hmlab/cli/config.hpp"
#include "hmlab/cli/run.hpp"
#include "hmlab/flow/trajectory.hpp"
#include "hmlab/io/csv.hpp"
#include "hmlab/kernels/heat_kernel.hpp"
#include "hmlab/kernels/solvers.hpp"
#include "hmlab/kernels/verify.hpp"
#include "hmlab/neck/decay.hpp"
#include "hmlab/neck/energy_scale.hpp"
#include "hmlab/neck/schedule.hpp"
#include "hmlab/parabolic/comparison.hpp"
#include "hmlab/parabolic/supersolution.hpp"

#ifndef HMLAB_ACCEPTANCE_CONFIG
#define HMLAB_ACCEPTANCE_CONFIG "acceptance_config.json"
#endif

using namespace hmlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

fs::path g_out;
json g_report = json::object();

// ---------------------------------------------------------------- oracles

// Mass of H against s^{mu-1} ds by tanh-sinh, split at the peak s = r.
double quadrature_mass(double r, double t, const kernels::KernelParams& p) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double s) { return kernels::eval_H(r, s, t, p) * std::pow(s, p.mu - 1.0); };
  const double w = 40.0 * std::sqrt(t);
  const double lo = std::max(0.0, r - w);
  return ts.integrate(f, lo, r) + ts.integrate(f, r, r + w);
}

// Planar Gaussian averaged over the circle of radius s (times 2 pi), periodic trapezoid.
double planar_average(double r, double s, double t) {
  const int n = 8192;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double phi = 2.0 * kPi * j / n;
    const double d2 = r * r + s * s - 2.0 * r * s * std::cos(phi);
    sum += std::exp(-d2 / (4.0 * t)) / (4.0 * kPi * t);
  }
  return 2.0 * kPi * sum / n;
}

// e^{-x} int_0^pi e^{x cos th} sin^{mu-2} th dth via the modified Bessel function.
double bessel_integral_scaled(double x, double mu) {
  const double nu = (mu - 2.0) / 2.0;
  return std::sqrt(kPi) * boost::math::tgamma((mu - 1.0) / 2.0) * std::pow(2.0 / x, nu) *
         boost::math::cyl_bessel_i(nu, x) * std::exp(-x);
}

// ---------------------------------------------------------------- criteria

Outcome kernel_mass() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_oracle = 0.0;
  double secs = 0.0, oracle_secs = 0.0;
  json rows = json::array();
  for (double mu : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    const auto p = kernels::KernelParams::make(mu, 0.0, 1.0);
    for (int n = 0; n < 9; ++n) {
      const double r = 1e-2 * std::pow(1e3, u(rng)), t = 1e-2 * std::pow(1e3, u(rng));
      auto t0 = Clock::now();
      const double m = kernels::mass_integral(r, t, p);
      secs += seconds_since(t0);
      t0 = Clock::now();
      const double q = quadrature_mass(r, t, p);
      oracle_secs += seconds_since(t0);
      worst = std::max(worst, std::abs(m - 1.0));
      worst_oracle = std::max(worst_oracle, std::abs(q - 1.0));
      rows.push_back({{"mu", mu}, {"r", r}, {"t", t}, {"mass", m}, {"oracle", q}});
    }
  }
  g_report["kernel_mass"] = {{"samples", rows}, {"seconds", secs}, {"oracle_seconds", oracle_secs}};
  return {worst < 1e-5 && worst_oracle < 1e-5 && secs < 30.0, "max |mass-1| " + fmt(worst) + ", oracle " +
                                                                  fmt(worst_oracle) + ", " + fmt(secs) + " s (oracle " +
                                                                  fmt(oracle_secs) + " s)"};
}

Outcome mu2_closed_form() {
  const auto p = kernels::KernelParams::make(2.0, 0.0, 1.0);
  double worst = 0.0;
  for (double r : {0.05, 0.3, 1.0, 2.0, 4.0})
    for (double s : {0.05, 0.3, 1.0, 2.0, 4.0})
      for (double t : {0.02, 0.3, 2.0}) {
        const double o = planar_average(r, s, t);
        worst = std::max(worst, std::abs(kernels::eval_H(r, s, t, p) - o) / o);
      }
  const double c_err = std::abs(p.c_mu - 1.0 / (2.0 * kPi));
  return {worst < 1e-8 && c_err < 1e-8, "max rel error " + fmt(worst) + ", |c_2 - 1/2pi| " + fmt(c_err)};
}

Outcome bessel_ode() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_oracle = 0.0;
  for (double mu : {1.5, 2.0, 3.0, 4.0}) {
    for (int n = 0; n < 20; ++n) {
      const double x = 0.1 * std::pow(2000.0, u(rng));
      worst = std::max(worst, std::abs(kernels::bessel_ode_residual(x, mu, 1e-4)));
      if (x < 200.0) {
        const double o = bessel_integral_scaled(x, mu);
        worst_oracle = std::max(worst_oracle, std::abs(kernels::eval_I_scaled(x, mu) / o - 1.0));
      }
    }
  }
  return {worst < 1e-5 && worst_oracle < 1e-9,
          "max residual " + fmt(worst) + ", Bessel oracle rel " + fmt(worst_oracle)};
}

Outcome sandwich() {
  json rows = json::array();
  double spread = 0.0, lo = 1e308;
  for (double mu : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    const auto sw = kernels::sandwich_sweep(kernels::KernelParams::make(mu, 0.0, 1.0), 1e-3, 1e3, 20);
    spread = std::max(spread, sw.spread());
    lo = std::min(lo, sw.min_ratio);
    rows.push_back({{"mu", mu}, {"c", sw.min_ratio}, {"C", sw.max_ratio}, {"samples", sw.samples}});
  }
  io::write_text(g_out / "sandwich.json", rows.dump(2) + "\n");
  return {lo > 0.0 && spread < 1e3, "max C/c " + fmt(spread) + ", min c " + fmt(lo) + ", archived sandwich.json"};
}

Outcome barriers() {
  using namespace parabolic;
  const auto t0 = Clock::now();
  const auto bc = cli::default_barrier_config();
  std::size_t viol = 0, unfalsified = 0, fixtures = 0;
  ComparisonOptions loose;
  loose.strict_boundary = false;
  auto tally = [&](const SpaceTimeField& sub, const SpaceTimeField& bar,
                   const std::function<double(double, double)>& forcing, const SupersolutionSpec& s) {
    const auto p = BoxNuParams::make(s.nu);
    viol += verify_comparison(sub, bar, forcing, p).violations;
    if (verify_comparison(sub, scaled(bar, 0.5), forcing, p, loose).violations == 0) ++unfalsified;
    ++fixtures;
  };
  for (const auto& s : bc.f_fixtures) {
    const auto grid = f_grid(s, bc.nodes_per_decade);
    auto trace = [&](double r) { return f_trace_bound(s, r); };
    tally(solve_subsolution_f(s, trace, grid, bc.t_end), build_supersolution_f(s, trace, grid, bc.t_end).value,
          [&](double, double) { return s.A; }, s);
  }
  for (const auto& s : bc.g_fixtures) {
    const auto grid = g_grid(s, bc.nodes_per_decade);
    const double T = bc.t_end;
    auto trace = [&](double r) { return g_trace_bound(s, r); };
    auto inner = [&](double) { return s.B / std::sqrt(T); };
    tally(solve_subsolution_g(s, trace, inner, grid, T), build_supersolution_g(s, trace, inner, grid, T).value,
          [&](double r, double) { return g_forcing(s, r); }, s);
  }
  const double secs = seconds_since(t0);
  const bool ok = bc.f_fixtures.size() >= 3 && bc.g_fixtures.size() >= 3 && viol == 0 && unfalsified == 0 &&
                  secs < 120.0;
  return {ok, std::to_string(fixtures) + " fixtures, " + std::to_string(viol) + " violations, " +
                  std::to_string(unfalsified) + " halved barriers without violation, " + fmt(secs) + " s"};
}

Outcome kernel_envelopes() {
  double c0 = 0.0, c1 = 0.0;
  for (auto [mu, k] : {std::pair{3.0, 0.0}, std::pair{3.0, 1.0}, std::pair{2.5, 1.2}}) {
    const auto p = kernels::KernelParams::make(mu, 0.01, 1.0);
    const auto grid = RadialGrid::log_uniform(0.01, 1.0, 1201);
    const double kk = k;
    const auto v0 = kernels::solve_ivp([kk](double r) { return std::pow(r, -kk); }, p, 1.0, grid);
    c0 = std::max(c0, kernels::initial_value_envelope(v0, p, 1.0, k, 0.0).constant);
  }
  // Boundary data with unit L^2 norm on [0, 1].
  const std::vector<kernels::RadialFn> psis{[](double) { return 1.0; }, [](double t) { return std::sqrt(3.0) * t; }};
  for (double mu : {3.0, 2.5}) {
    const auto p = kernels::KernelParams::make(mu, 0.05, 1.0);
    const auto grid = RadialGrid::log_uniform(0.05, 1.0, 1201);
    for (const auto& psi : psis) {
      const auto v1 = kernels::solve_boundary(psi, p, grid, 1.0);
      c1 = std::max(c1, kernels::boundary_value_envelope(v1, psi, p, 1e-4, 20.0).constant);
    }
  }
  return {c0 > 0.0 && c0 < 50.0 && c1 > 0.0 && c1 < 50.0,
          "initial-data C " + fmt(c0) + ", boundary-data C " + fmt(c1)};
}

flow::CorotationalState bubble_state(std::size_t nodes, double r_lo, double r_hi) {
  return flow::CorotationalState::from_profile(RadialGrid::log_uniform(r_lo, r_hi, nodes),
                                               [](double r) { return flow::bubble(r); }, 1);
}

flow::CorotationalState ramp(double b, double npd) {
  return flow::CorotationalState::from_profile(RadialGrid::per_decade(1e-6, 1.0, npd),
                                               [b](double r) { return b * r; }, 1);
}

Outcome flow_anchors(const flow::Trajectory& blowup) {
  const auto b = bubble_state(4096, 1e-3, 1.0);
  flow::FlowStepConfig cfg;
  cfg.dt_initial = 1e-4;
  auto st = b;
  for (int n = 0; n < 100; ++n) st = flow::advance(st, cfg, cfg.dt_initial).state;
  double drift = 0.0;
  for (std::size_t i = 0; i < b.h.size(); ++i) drift = std::max(drift, std::abs(st.h[i] - b.h[i]));

  const double e = flow::energy(bubble_state(8001, 1e-4, 1e4), 1e-4, 1e4);
  const double e_err = std::abs(e / (8.0 * kPi) - 1.0);
  const double defect = flow::dissipation_defect(blowup, blowup.times.front(), blowup.current.time);
  const bool ok = drift < 1e-6 && e_err < 1e-3 && defect < 0.01 && !blowup.underresolved;
  return {ok, "bubble drift " + fmt(drift) + ", energy/8pi - 1 " + fmt(e_err) + ", dissipation defect " + fmt(defect)};
}

Outcome stress_identity() {
  const auto b = bubble_state(4096, 1e-3, 1.0);
  double bubble_res = 0.0;
  for (double r : {0.01, 0.1, 0.3, 1.0}) {
    const auto s = flow::stress_terms(b, r);
    bubble_res = std::max({bubble_res, std::abs(s.lhs), std::abs(s.rhs)});
  }
  std::vector<double> marks;
  for (int j = 1; j <= 20; ++j) marks.push_back(0.01 * j);
  auto residual = [&](double npd, double dt) {
    flow::FlowStepConfig cfg;
    cfg.adaptive = false;
    cfg.dt_initial = dt;
    flow::StopCondition stop;
    stop.t_ceiling = 0.2;
    stop.snapshot_times = marks;
    stop.snapshot_ratio = 0.0;
    return flow::stress_identity_residual(flow::run_to_blowup(ramp(3.5, npd), cfg, stop), 0.3, 0.05, 0.2);
  };
  const double e1 = residual(40, 1e-3), e2 = residual(80, 2.5e-4);
  const double order = std::log2(e1 / e2);
  return {order >= 1.8 && bubble_res < 1e-8,
          "self-convergence order " + fmt(order) + " (" + fmt(e1) + " -> " + fmt(e2) + "), bubble " + fmt(bubble_res)};
}

Outcome blowup_phenomenology(const flow::Trajectory& traj, const neck::NeckWindow& win) {
  if (!traj.blowup_detected || traj.stop_reason != "lambda_stop")
    return {false, "stop reason " + traj.stop_reason};
  const auto fit = neck::fit_blowup_exponent(win.series);
  g_report["blowup_fit"] = neck::to_json(fit);
  const bool ok = fit.type_ii_decreasing && fit.reliable && fit.fit.exponent > 0.55;
  return {ok, "stopped at t " + fmt(traj.current.time) + ", p " + fmt(fit.fit.exponent) + ", T_est " + fmt(fit.T_est) +
                  ", lambda^2/(T-t) decreasing " + (fit.type_ii_decreasing ? "yes" : "no")};
}

Outcome neck_decay(const flow::Trajectory& traj, const neck::NeckWindow& win) {
  if (!win.found) return {false, "no neck window with lambda_1 <= 1/2"};
  const double alpha = 1.0;
  const auto sched = neck::make_schedule(win.lambda1, alpha, 0.5, neck::ScheduleMode::unchecked);
  // Identities recomputed from their defining relations.
  const double e1 = std::abs(sched.rho / sched.zeta - std::pow(sched.zeta, alpha)) / std::pow(sched.zeta, alpha);
  const double e2 = std::abs(sched.rho1 / std::pow(sched.zeta, 1.0 + 9.0 * alpha / 16.0) - 1.0);
  const double e3 = std::abs(sched.a - 72.0 * (1.0 + alpha) / alpha) / sched.a;
  const double ident = std::max({e1, e2, e3});
  neck::NeckDecayOptions o;
  o.R = win.R;
  const auto d = neck::check_neck_decay(traj, sched, o);
  g_report["neck_decay"] = neck::to_json(d);
  return {d.resolved && d.envelope_C < 50.0 && ident < 1e-12,
          "R " + fmt(win.R) + ", lambda_1 " + fmt(win.lambda1) + ", C " + fmt(d.envelope_C) + ", identities " +
              fmt(ident)};
}

Outcome evolution_inequalities() {
  auto run = [](double npd) {
    flow::Trajectory tr;
    tr.snapshots.push_back(flow::CorotationalState::from_profile(RadialGrid::per_decade(0.1, 2.0, npd),
                                                                 [](double r) { return flow::bubble(r); }, 1));
    return neck::verify_evolution_inequalities(tr, 0.5, 1.0, 0.9);
  };
  const auto a = run(200), b = run(400);
  auto stable = [](double x, double y) { return std::abs(x - y) <= 0.1 * std::max(std::abs(y), 1e-12); };
  const bool ok = std::isfinite(b.C_f) && std::isfinite(b.C_g) && b.C_f < 50.0 && b.C_g < 50.0 &&
                  stable(a.C_f, b.C_f) && stable(a.C_g, b.C_g) && !b.skipped;
  return {ok, "C_f " + fmt(a.C_f) + " -> " + fmt(b.C_f) + ", C_g " + fmt(a.C_g) + " -> " + fmt(b.C_g)};
}

Outcome determinism() {
  auto cfg = cli::parse_config(io::read_text(HMLAB_ACCEPTANCE_CONFIG));
  std::vector<cli::FileEntry> runs[2];
  for (int i = 0; i < 2; ++i) {
    cfg.output_dir = (g_out / ("determinism_" + std::to_string(i))).string();
    fs::remove_all(cfg.output_dir);
    runs[i] = cli::execute(cfg).files;
  }
  std::size_t csv = 0, differ = 0;
  if (runs[0].size() != runs[1].size()) return {false, "file lists differ"};
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    const auto& p = runs[0][i].path;
    if (p.size() < 4 || p.compare(p.size() - 4, 4, ".csv") != 0) continue;
    ++csv;
    if (p != runs[1][i].path || runs[0][i].sha256 != runs[1][i].sha256) ++differ;
  }
  return {csv > 0 && differ == 0, std::to_string(csv) + " CSV files, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  g_out = argc > 1 ? argv[1] : "acceptance_out";
  fs::create_directories(g_out);
  int failed = 0;
  auto report = [&](int n, const std::string& name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    g_report["criteria"].push_back({{"n", n}, {"name", name}, {"pass", o.pass}, {"detail", o.detail}});
  };

  report(1, "kernel normalization", kernel_mass);
  report(2, "mu=2 closed form", mu2_closed_form);
  report(3, "Bessel-integral ODE", bessel_ode);
  report(4, "sandwich bound", sandwich);
  report(5, "supersolution domination", barriers);
  report(6, "initial- and boundary-data envelopes", kernel_envelopes);

  // Shared supercritical run: k = 1, ramp to 3.5 on [1e-6, 1].
  flow::Trajectory traj;
  neck::NeckWindow win;
  std::string run_error;
  try {
    flow::StopCondition stop;
    stop.lambda_stop = 1e-4;
    traj = flow::run_to_blowup(ramp(3.5, 100), flow::FlowStepConfig{}, stop);
    win = neck::select_neck_window(traj, 1.0, 1.0);
    io::write_csv(g_out / "lambda_series.csv", win.series.table());
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto shared = [&](auto f) -> std::function<Outcome()> {
    return [&, f] { return run_error.empty() ? f() : Outcome{false, "supercritical run failed: " + run_error}; };
  };

  report(7, "flow exactness anchors", shared([&] { return flow_anchors(traj); }));
  report(8, "stress identity", stress_identity);
  report(9, "blowup phenomenology", shared([&] { return blowup_phenomenology(traj, win); }));
  report(10, "neck decay property", shared([&] { return neck_decay(traj, win); }));
  report(11, "evolution inequalities", evolution_inequalities);
  report(12, "determinism", determinism);

  io::write_text(g_out / "acceptance.json", g_report.dump(2) + "\n");
  std::printf("%d of 12 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
