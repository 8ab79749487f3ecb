#include "hmlab/cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <future>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "hmlab/core/errors.hpp"
#include "hmlab/flow/trajectory.hpp"
#include "hmlab/io/csv.hpp"
#include "hmlab/kernels/heat_kernel.hpp"
#include "hmlab/kernels/solvers.hpp"
#include "hmlab/kernels/verify.hpp"
#include "hmlab/neck/decay.hpp"
#include "hmlab/parabolic/comparison.hpp"

namespace hmlab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> r{
      {"flow.energy_decreasing", Mode::simulate, "discrete energy never rises by more than tolerances.energy_increase (relative)"},
      {"flow.dissipation_identity", Mode::simulate, "|dE + 2 int int |T|^2| / |dE| over the run below tolerances.dissipation"},
      {"flow.stress_identity", Mode::simulate,
       "circle identity at r = r_max/2 on the last snapshot, relative to the energy density there, below tolerances.stress"},
      {"flow.resolved", Mode::simulate, "the run ended without a resolution failure"},
      {"neck.energy_scale_certificate", Mode::analyze, "every lambda_{eps,R} sample carries the minimality certificate"},
      {"neck.type_ii", Mode::analyze,
       "lambda^2/(T-t) decreasing and fitted exponent p > 1/2 + tolerances.exponent_margin (blowup runs)"},
      {"neck.schedule_identities", Mode::analyze, "rho/zeta = zeta^alpha, rho1 = zeta^{1+9 alpha/16}, a alpha = 72(1+alpha)"},
      {"neck.decay_envelope", Mode::analyze,
       "r|du| <= C sqrt(eps)(R lambda_1/r + (r/R)^alpha)^{1/3} on the neck with C below tolerances.envelope_ceiling"},
      {"neck.evolution_inequalities", Mode::analyze, "C_f, C_g below tolerances.envelope_ceiling on the neck annulus"},
      {"neck.holder_modulus", Mode::analyze, "C_holder <= C_bound <= 4 C_holder on (0, R/2] at t1"},
      {"kernel.mass", Mode::kernel_verify, "|int H s^{mu-1} ds - 1| below tolerances.mass at sampled (r, t)"},
      {"kernel.pde", Mode::kernel_verify, "relative heat-equation residual of H below tolerances.pde at sampled points"},
      {"kernel.bessel_ode", Mode::kernel_verify, "I'' + ((mu-1)/x) I' - I relative residual below tolerances.bessel_ode"},
      {"kernel.sandwich", Mode::kernel_verify, "H / Gaussian envelope within [c, C], C/c below tolerances.sandwich_spread"},
      {"kernel.initial_envelope", Mode::kernel_verify, "initial-value envelope constant below tolerances.envelope_ceiling"},
      {"kernel.boundary_envelope", Mode::kernel_verify, "boundary-value envelope constant below tolerances.envelope_ceiling"},
      {"barrier.f_comparison", Mode::barrier_verify, "f-barrier dominates the extremal sub-solution: zero violations"},
      {"barrier.g_comparison", Mode::barrier_verify, "g-barrier dominates the extremal sub-solution: zero violations"},
      {"barrier.falsification", Mode::barrier_verify, "halved barriers produce violations for every fixture"},
      {"barrier.f_conclusion", Mode::barrier_verify, "f conclusion constant below tolerances.envelope_ceiling"},
      {"barrier.g_conclusion", Mode::barrier_verify, "g conclusion constant below tolerances.envelope_ceiling"},
      {"sweep.children", Mode::sweep, "every child run completed, wrote its manifest and passed its checks"},
  };
  return r;
}

std::vector<std::string> enabled_checks(Mode m) {
  std::vector<std::string> out;
  for (const auto& c : check_registry())
    if (c.mode == m || (m == Mode::analyze && c.mode == Mode::simulate)) out.push_back(c.name);
  return out;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
  }
  return "";
}

bool RunManifest::all_pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == Status::fail; });
}

json RunManifest::to_json() const {
  json checks_j = json::array();
  for (const auto& c : checks)
    checks_j.push_back({{"name", c.name},
                        {"status", cli::to_string(c.status)},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"detail", c.detail}});
  json files_j = json::array();
  for (const auto& f : files) files_j.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"mode", mode},         {"config_hash", config_hash}, {"version", version}, {"started", started},
          {"finished", finished}, {"all_pass", all_pass()},     {"checks", checks_j}, {"files", files_j},
          {"outcome", outcome}};
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

double finite_or(double x, double fallback) { return std::isfinite(x) ? x : fallback; }

class Writer {
 public:
  explicit Writer(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }

  void csv(const std::string& rel, const io::Table& t) {
    io::write_csv(root_ / rel, t);
    record(rel);
  }
  void json_file(const std::string& rel, const json& j) {
    io::write_text(root_ / rel, j.dump(2) + "\n");
    record(rel);
  }
  // Records files written by someone else.
  void record(const std::string& rel) {
    const auto p = root_ / rel;
    files_.push_back({rel, io::sha256_file(p), fs::file_size(p)});
  }

  std::vector<FileEntry> files() const {
    auto f = files_;
    std::sort(f.begin(), f.end(), [](const FileEntry& a, const FileEntry& b) { return a.path < b.path; });
    return f;
  }

 private:
  fs::path root_;
  std::vector<FileEntry> files_;
};

class Checks {
 public:
  void add(const std::string& name, Status s, double value, double threshold, std::string detail = {}) {
    results_.push_back({name, s, finite_or(value, 1e308), finite_or(threshold, 1e308), std::move(detail)});
  }
  void bound(const std::string& name, double value, double threshold, std::string detail = {}) {
    add(name, value < threshold ? Status::pass : Status::fail, value, threshold, std::move(detail));
  }
  void skip(const std::string& name, std::string why) { add(name, Status::skipped, 0.0, 0.0, std::move(why)); }

  // Registry order; enabled checks nobody reported become skipped entries.
  std::vector<CheckResult> finish(Mode m) const {
    std::vector<CheckResult> out;
    for (const auto& name : enabled_checks(m)) {
      auto it = std::find_if(results_.begin(), results_.end(), [&](const CheckResult& c) { return c.name == name; });
      out.push_back(it != results_.end() ? *it : CheckResult{name, Status::skipped, 0.0, 0.0, "not evaluated"});
    }
    return out;
  }

 private:
  std::vector<CheckResult> results_;
};

// ---------------------------------------------------------------- flow

flow::CorotationalState initial_state(const FlowRunConfig& f) {
  const auto grid = RadialGrid::per_decade(f.r_min, f.r_max, f.nodes_per_decade);
  const auto& in = f.initial;
  if (in.kind == "ramp") {
    const double b = in.boundary_value, rm = f.r_max;
    return flow::CorotationalState::from_profile(grid, [b, rm](double r) { return b * r / rm; }, f.k);
  }
  if (in.kind == "bubble") {
    const double sigma = in.sigma;
    const int k = f.k;
    return flow::CorotationalState::from_profile(grid, [sigma, k](double r) { return flow::bubble(r, sigma, k); }, f.k);
  }
  const auto t = io::read_csv(in.path);
  const auto& r = t.column("r");
  const auto& h = t.column("h");
  if (r.size() < 2 || r.front() > f.r_min * (1.0 + 1e-12) || r.back() < f.r_max * (1.0 - 1e-12))
    throw ConfigError("flow.initial.path", "profile must cover [r_min, r_max]");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1]) || !(r[i - 1] > 0.0)) throw ConfigError("flow.initial.path", "r must be positive and increasing");
  auto interp = [&](double x) {
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - r.begin()), 1, r.size() - 1);
    const double w = (std::log(x) - std::log(r[j - 1])) / (std::log(r[j]) - std::log(r[j - 1]));
    return h[j - 1] + w * (h[j] - h[j - 1]);
  };
  return flow::CorotationalState::from_profile(grid, interp, f.k);
}

flow::StopCondition stop_condition(const FlowRunConfig& f) {
  flow::StopCondition s;
  s.t_ceiling = f.t_ceiling;
  s.lambda_stop = f.lambda_stop;
  if (f.grad_ceiling > 0.0) s.grad_ceiling = f.grad_ceiling;
  s.stationary_tol = f.stationary_tol;
  s.max_steps = f.max_steps;
  s.snapshot_ratio = f.snapshot_ratio;
  s.snapshot_times = f.snapshot_times;
  return s;
}

std::string snapshot_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshots/snap_%04zu.csv", i);
  return buf;
}

flow::Trajectory run_flow(const RunConfig& cfg, Writer& w, Checks& checks, json& outcome) {
  auto traj = flow::run_to_blowup(initial_state(cfg.flow), cfg.flow.step, stop_condition(cfg.flow));

  io::Table index;
  index.header = {"index", "t", "lambda_proxy", "energy"};
  index.columns.resize(4);
  json snaps = json::array();
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    w.csv(snapshot_name(i), flow::snapshot_table(s));
    index.columns[0].push_back(static_cast<double>(i));
    index.columns[1].push_back(s.time);
    index.columns[2].push_back(flow::lambda_proxy(s));
    index.columns[3].push_back(flow::discrete_energy(s));
    snaps.push_back({{"file", snapshot_name(i)}, {"t", s.time}});
  }
  w.csv("snapshots/index.csv", index);

  io::Table series;
  series.header = {"t", "energy", "tension_l2_cumulative", "lambda_proxy"};
  series.columns = {traj.times, traj.energy_series, traj.tension_l2_cumulative, traj.lambda_series};
  w.csv("flow_series.csv", series);

  auto tm = flow::trajectory_manifest(traj);
  tm["snapshots"] = snaps;
  w.json_file("reports/trajectory.json", tm);
  flow::write_checkpoint(traj, w.root() / "checkpoint");
  w.record("checkpoint/checkpoint.json");
  w.record("checkpoint/state.csv");

  const auto& fin = traj.current;
  std::string summary = traj.blowup_detected ? "blowup detected"
                        : traj.converged     ? "no blowup, converged"
                        : traj.underresolved ? "underresolved"
                                             : "no blowup, " + traj.stop_reason;
  outcome = {{"summary", summary},
             {"stop_reason", traj.stop_reason},
             {"blowup_detected", traj.blowup_detected},
             {"converged", traj.converged},
             {"underresolved", traj.underresolved},
             {"t_final", fin.time},
             {"steps", traj.steps},
             {"rejections", traj.rejections},
             {"snapshots", traj.snapshots.size()},
             {"energy_initial", traj.energy_series.front()},
             {"energy_final", traj.energy_series.back()},
             {"tension_l2_integral", traj.tension_l2_integral},
             {"tension_l2_final", flow::tension_l2(fin)},
             {"lambda_proxy_final", flow::lambda_proxy(fin)}};

  double rise = 0.0;
  for (std::size_t i = 1; i < traj.energy_series.size(); ++i)
    rise = std::max(rise, (traj.energy_series[i] - traj.energy_series[i - 1]) /
                              std::max(std::abs(traj.energy_series[i - 1]), 1e-300));
  checks.bound("flow.energy_decreasing", rise, cfg.tolerance("energy_increase"));

  const double dE = traj.energy_series.back() - traj.energy_series.front();
  if (std::abs(dE) > 1e-12 * std::max(1.0, std::abs(traj.energy_series.front()))) {
    checks.bound("flow.dissipation_identity", flow::dissipation_defect(traj, traj.times.front(), fin.time),
                 cfg.tolerance("dissipation"));
  } else {
    checks.skip("flow.dissipation_identity", "energy did not change");
  }

  const auto ss = flow::stress_terms(fin, 0.5 * fin.grid.r_hi());
  const auto hs = flow::polar_energies(fin, ss.r);
  const double scale = 0.5 * (hs.g * hs.g + hs.f0 * hs.f0);
  if (scale > 1e-14) {
    checks.bound("flow.stress_identity", std::abs(ss.lhs - ss.rhs) / scale, cfg.tolerance("stress"),
                 "r = " + io::format_double(ss.r));
  } else {
    checks.skip("flow.stress_identity", "no energy at r_max/2");
  }
  checks.add("flow.resolved", traj.underresolved ? Status::fail : Status::pass, traj.underresolved ? 1.0 : 0.0, 0.5,
             traj.stop_reason);
  return traj;
}

// ---------------------------------------------------------------- neck

void run_neck(const RunConfig& cfg, const flow::Trajectory& traj, Writer& w, Checks& checks, json& outcome) {
  const auto& nc = cfg.neck;
  neck::NeckWindow win;
  if (nc.R > 0.0) {
    win.R = nc.R;
    win.t1 = traj.snapshots.back().time;
    win.series = neck::energy_scale_series(traj, nc.epsilon, nc.R);
    win.lambda1 = neck::admissible_lambda1(win.series, win.t1, nc.alpha);
    win.found = win.lambda1 <= 0.5;
  } else {
    win = neck::select_neck_window(traj, nc.epsilon, nc.alpha);
    if (!win.found) {
      win.R = traj.current.grid.r_hi();
      win.t1 = traj.snapshots.back().time;
      win.series = neck::energy_scale_series(traj, nc.epsilon, win.R);
      win.lambda1 = neck::admissible_lambda1(win.series, win.t1, nc.alpha);
    }
  }
  w.csv("lambda_series.csv", win.series.table());
  json report = {{"R", win.R}, {"lambda1", win.lambda1}, {"t1", win.t1}, {"window_found", win.found},
                 {"epsilon", nc.epsilon}};

  checks.add("neck.energy_scale_certificate", win.series.all_certified ? Status::pass : Status::fail,
             win.series.all_certified ? 1.0 : 0.0, 0.5);

  if (!traj.blowup_detected) {
    checks.skip("neck.type_ii", "no blowup");
  } else {
    try {
      const auto fit = neck::fit_blowup_exponent(win.series);
      report["fit"] = neck::to_json(fit);
      const double need = 0.5 + cfg.tolerance("exponent_margin");
      const bool ok = fit.type_ii_decreasing && fit.reliable && fit.fit.exponent > need;
      checks.add("neck.type_ii", ok ? Status::pass : Status::fail, fit.fit.exponent, need,
                 std::string("type_ii_decreasing=") + (fit.type_ii_decreasing ? "true" : "false") +
                     " reliable=" + (fit.reliable ? "true" : "false"));
    } catch (const PreconditionError& e) {
      checks.add("neck.type_ii", Status::fail, 0.0, 0.5, e.what());
    }
  }

  if (!(win.lambda1 > 0.0) || !win.found) {
    const std::string why = win.lambda1 > 0.0 ? "no outer radius with lambda_1 <= 1/2" : "lambda_1 = 0: no concentration";
    for (const char* n : {"neck.schedule_identities", "neck.decay_envelope", "neck.evolution_inequalities"})
      checks.skip(n, why);
  } else {
    const auto sched = neck::make_schedule(win.lambda1, nc.alpha, nc.kappa, neck::ScheduleMode::unchecked);
    report["schedule"] = neck::to_json(sched);
    const double e1 = std::abs(sched.rho / sched.zeta - std::pow(sched.zeta, nc.alpha)) / std::pow(sched.zeta, nc.alpha);
    const double e2 = std::abs(sched.rho1 / std::pow(sched.zeta, 1.0 + 9.0 * nc.alpha / 16.0) - 1.0);
    const double e3 = std::abs(sched.a * nc.alpha - 72.0 * (1.0 + nc.alpha)) / (72.0 * (1.0 + nc.alpha));
    checks.bound("neck.schedule_identities", std::max({e1, e2, e3}), cfg.tolerance("schedule"),
                 sched.base_regime ? "base regime" : "unchecked: lambda_bar above kappa^a");

    neck::NeckDecayOptions o;
    o.epsilon = nc.epsilon;
    o.R = win.R;
    o.ceiling = cfg.tolerance("envelope_ceiling");
    o.exponent_tol = cfg.tolerance("exponent_tol");
    const auto decay = neck::check_neck_decay(traj, sched, o);
    report["decay"] = neck::to_json(decay);
    if (!decay.resolved) {
      checks.skip("neck.decay_envelope", "unresolved neck: " + decay.note);
    } else {
      checks.add("neck.decay_envelope", decay.bounds_hold ? Status::pass : Status::fail, decay.envelope_C, o.ceiling,
                 "g outer exponent " + io::format_double(decay.g_outer_fit.exponent) + decay.note);
    }

    flow::Trajectory window;
    for (const auto& s : traj.snapshots)
      if (s.time > win.t1 - win.R * win.R) window.snapshots.push_back(s);
    neck::EvolutionOptions eo;
    eo.ceiling = o.ceiling;
    try {
      const auto ev = neck::verify_evolution_inequalities(window, nc.annulus_lo * win.R, nc.annulus_hi * win.R, nc.nu, eo);
      report["evolution"] = neck::to_json(ev);
      if (ev.skipped) checks.skip("neck.evolution_inequalities", ev.reason);
      else
        checks.add("neck.evolution_inequalities", ev.within_ceiling ? Status::pass : Status::fail,
                   std::max(ev.C_f, ev.C_g), eo.ceiling);
    } catch (const GridError& e) {
      checks.skip("neck.evolution_inequalities", e.what());
    }
  }

  const double R = win.R;
  const auto hold = neck::holder_modulus(traj.snapshots.back(), nc.alpha, R, cfg.tolerance("envelope_ceiling"));
  report["holder"] = neck::to_json(hold);
  checks.add("neck.holder_modulus", hold.consistent ? Status::pass : Status::fail,
             hold.C_holder > 0.0 ? hold.C_bound / hold.C_holder : 0.0, 4.0,
             std::string("envelope_verified=") + (hold.envelope_verified ? "true" : "false"));
  w.json_file("reports/neck.json", report);
  outcome["neck"] = {{"R", win.R}, {"lambda1", win.lambda1}};
}

// ---------------------------------------------------------------- kernels

struct KernelCaseResult {
  double mass = 0.0, pde = 0.0, ode = 0.0, spread = 0.0, min_ratio = 0.0, c_initial = 0.0, c_boundary = 0.0;
  io::Table h_table;
  json report;
};

KernelCaseResult kernel_case(const KernelCase& kc, const KernelConfig& k, std::uint64_t seed) {
  const auto p = kernels::KernelParams::make(kc.mu, kc.rho, kc.R);
  KernelCaseResult out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
  json samples = json::array();
  for (std::size_t n = 0; n < k.samples; ++n) {
    const double r = log_uniform(1e-2, 10.0), t = log_uniform(1e-2, 10.0);
    const double m = kernels::mass_integral(r, t, p);
    out.mass = std::max(out.mass, std::abs(m - 1.0));
    const double rr = log_uniform(0.1, 3.0), s = log_uniform(0.1, 3.0), tt = log_uniform(0.05, 2.0);
    const double res = kernels::heat_residual_H(rr, s, tt, p, 1e-3, 1e-3);
    out.pde = std::max(out.pde, std::abs(res));
    samples.push_back({{"r", r}, {"t", t}, {"mass", m}, {"pde_point", {rr, s, tt}}, {"pde_residual", res}});
  }
  for (int n = 0; n < 20; ++n) {
    const double x = log_uniform(0.1, 200.0);
    out.ode = std::max(out.ode, std::abs(kernels::bessel_ode_residual(x, kc.mu, 1e-4)));
  }
  const auto sw = kernels::sandwich_sweep(p, 1e-3, 1e3, k.sandwich_points);
  out.spread = sw.spread();
  out.min_ratio = sw.min_ratio;

  const auto grid = RadialGrid::log_uniform(kc.rho, kc.R, k.nodes);
  const double kk = kc.k;
  const auto v0 = kernels::solve_ivp([kk](double r) { return std::pow(r, -kk); }, p, k.t_end, grid);
  const auto e0 = kernels::initial_value_envelope(v0, p, 1.0, kc.k, 0.0);
  auto psi = [](double) { return 1.0; };
  const auto v1 = kernels::solve_boundary(psi, p, grid, k.t_end);
  const auto e1 = kernels::boundary_value_envelope(v1, psi, p, 1e-4, 20.0);
  out.c_initial = e0.constant;
  out.c_boundary = e1.constant;

  out.h_table.header = {"r", "t", "value"};
  out.h_table.columns.resize(3);
  for (double t : {0.01, 0.1, 1.0, 10.0})
    for (int i = 0; i <= 40; ++i) {
      const double r = 1e-2 * std::pow(1e4, i / 40.0);
      out.h_table.columns[0].push_back(r);
      out.h_table.columns[1].push_back(t);
      out.h_table.columns[2].push_back(kernels::eval_H(r, 1.0, t, p));
    }
  out.report = {{"mu", kc.mu},          {"rho", kc.rho},          {"R", kc.R},
                {"c_mu", p.c_mu},       {"k", kc.k},              {"mass_max_error", out.mass},
                {"pde_max_residual", out.pde}, {"bessel_ode_max_residual", out.ode},
                {"sandwich", {{"min", sw.min_ratio}, {"max", sw.max_ratio}, {"samples", sw.samples}}},
                {"initial_envelope", {{"C", e0.constant}, {"at_r", e0.at_r}, {"at_t", e0.at_t}, {"samples", e0.samples}}},
                {"boundary_envelope", {{"C", e1.constant}, {"at_r", e1.at_r}, {"at_t", e1.at_t}, {"samples", e1.samples}}},
                {"grid", {{"r_min", grid.r_lo()}, {"r_max", grid.r_hi()}, {"nodes", grid.size()}}},
                {"samples", samples}};
  return out;
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<std::future<T>> fut;
  for (std::size_t i = 0; i < n; ++i) fut.push_back(std::async(std::launch::async, f, i));
  std::vector<T> out;
  for (auto& x : fut) out.push_back(x.get());
  return out;
}

void run_kernels(const RunConfig& cfg, Writer& w, Checks& checks, json& outcome) {
  const auto& cases = cfg.kernel.cases;
  const auto res = parallel_map<KernelCaseResult>(
      cases.size(), [&](std::size_t i) { return kernel_case(cases[i], cfg.kernel, cfg.seed + i); });
  double mass = 0, pde = 0, ode = 0, spread = 0, ci = 0, cb = 0, min_ratio = 1e308;
  json per = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = res[i];
    const std::string tag = "mu" + io::format_double(cases[i].mu) + "_" + std::to_string(i);
    w.csv("kernels/H_" + tag + ".csv", r.h_table);
    w.json_file("reports/kernel_" + tag + ".json", r.report);
    mass = std::max(mass, r.mass);
    pde = std::max(pde, r.pde);
    ode = std::max(ode, r.ode);
    spread = std::max(spread, r.spread);
    min_ratio = std::min(min_ratio, r.min_ratio);
    ci = std::max(ci, r.c_initial);
    cb = std::max(cb, r.c_boundary);
    per.push_back({{"mu", cases[i].mu}, {"mass", r.mass}, {"pde", r.pde}, {"C_initial", r.c_initial},
                   {"C_boundary", r.c_boundary}});
  }
  checks.bound("kernel.mass", mass, cfg.tolerance("mass"));
  checks.bound("kernel.pde", pde, cfg.tolerance("pde"));
  checks.bound("kernel.bessel_ode", ode, cfg.tolerance("bessel_ode"));
  if (min_ratio > 0.0) checks.bound("kernel.sandwich", spread, cfg.tolerance("sandwich_spread"));
  else checks.add("kernel.sandwich", Status::fail, spread, cfg.tolerance("sandwich_spread"), "non-positive ratio");
  checks.bound("kernel.initial_envelope", ci, cfg.tolerance("envelope_ceiling"));
  checks.bound("kernel.boundary_envelope", cb, cfg.tolerance("envelope_ceiling"));
  outcome["kernel_cases"] = per;
}

// ---------------------------------------------------------------- barriers

struct BarrierResult {
  parabolic::ComparisonReport full, half;
  parabolic::ConclusionReport concl;
  double multiplier = 0.0;
};

BarrierResult barrier_case(const parabolic::SupersolutionSpec& s, bool g, const BarrierConfig& bc) {
  using namespace parabolic;
  BarrierResult out;
  const auto p = BoxNuParams::make(s.nu);
  ComparisonOptions loose;
  loose.strict_boundary = false;
  if (!g) {
    const auto grid = f_grid(s, bc.nodes_per_decade);
    auto trace = [&](double r) { return f_trace_bound(s, r); };
    auto forcing = [&](double, double) { return s.A; };
    const auto bar = build_supersolution_f(s, trace, grid, bc.t_end);
    const auto sub = solve_subsolution_f(s, trace, grid, bc.t_end);
    out.full = verify_comparison(sub, bar.value, forcing, p);
    out.half = verify_comparison(sub, scaled(bar.value, 0.5), forcing, p, loose);
    out.concl = conclusion_f(s, bar.value, sub);
    out.multiplier = bar.multiplier;
  } else {
    const auto grid = g_grid(s, bc.nodes_per_decade);
    const double T = bc.t_end;
    auto trace = [&](double r) { return g_trace_bound(s, r); };
    auto inner = [&](double) { return s.B / std::sqrt(T); };
    auto forcing = [&](double r, double) { return g_forcing(s, r); };
    const auto bar = build_supersolution_g(s, trace, inner, grid, T);
    const auto sub = solve_subsolution_g(s, trace, inner, grid, T);
    out.full = verify_comparison(sub, bar.value, forcing, p);
    out.half = verify_comparison(sub, scaled(bar.value, 0.5), forcing, p, loose);
    out.concl = conclusion_g(s, times_r(bar.value), times_r(sub));
    out.multiplier = bar.multiplier;
  }
  return out;
}

void run_barriers(const RunConfig& cfg, Writer& w, Checks& checks, json& outcome) {
  const auto& bc = cfg.barrier;
  const std::size_t nf = bc.f_fixtures.size(), ng = bc.g_fixtures.size();
  const auto res = parallel_map<BarrierResult>(nf + ng, [&](std::size_t i) {
    return i < nf ? barrier_case(bc.f_fixtures[i], false, bc) : barrier_case(bc.g_fixtures[i - nf], true, bc);
  });
  io::Table summary;
  summary.header = {"fixture", "kind",         "violations", "worst_margin", "tolerance",
                    "barrier_deficit", "halved_violations", "c_barrier", "c_solution"};
  summary.columns.resize(summary.header.size());
  std::size_t viol_f = 0, viol_g = 0, unfalsified = 0;
  double cf = 0.0, cg = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const bool g = i >= nf;
    const std::size_t idx = g ? i - nf : i;
    const auto& r = res[i];
    const double row[] = {static_cast<double>(idx), g ? 1.0 : 0.0, static_cast<double>(r.full.violations),
                          r.full.worst_margin, r.full.tolerance, r.full.barrier_deficit,
                          static_cast<double>(r.half.violations), r.concl.c_barrier, r.concl.c_solution};
    for (std::size_t c = 0; c < summary.header.size(); ++c) summary.columns[c].push_back(row[c]);
    json full, half;
    parabolic::to_json(full, r.full);
    parabolic::to_json(half, r.half);
    w.json_file(std::string("reports/barrier_") + (g ? "g_" : "f_") + std::to_string(idx) + ".json",
                {{"comparison", full},
                 {"halved", half},
                 {"multiplier", r.multiplier},
                 {"conclusion", {{"c_barrier", r.concl.c_barrier}, {"c_solution", r.concl.c_solution},
                                 {"samples", r.concl.samples}}}});
    (g ? viol_g : viol_f) += r.full.violations;
    (g ? cg : cf) = std::max(g ? cg : cf, r.concl.c_barrier);
    if (r.half.violations == 0) ++unfalsified;
  }
  w.csv("barrier_summary.csv", summary);
  const double ceil = cfg.tolerance("envelope_ceiling");
  if (nf) {
    checks.bound("barrier.f_comparison", static_cast<double>(viol_f), 0.5);
    checks.bound("barrier.f_conclusion", cf, ceil);
  } else {
    checks.skip("barrier.f_comparison", "no f fixtures");
    checks.skip("barrier.f_conclusion", "no f fixtures");
  }
  if (ng) {
    checks.bound("barrier.g_comparison", static_cast<double>(viol_g), 0.5);
    checks.bound("barrier.g_conclusion", cg, ceil);
  } else {
    checks.skip("barrier.g_comparison", "no g fixtures");
    checks.skip("barrier.g_conclusion", "no g fixtures");
  }
  checks.bound("barrier.falsification", static_cast<double>(unfalsified), 0.5,
               "fixtures whose halved barrier shows no violation");
  outcome["fixtures"] = {{"f", nf}, {"g", ng}};
}

// ---------------------------------------------------------------- sweep

void run_sweep(const RunConfig& cfg, Writer& w, Checks& checks, json& outcome) {
  const auto children = expand_sweep(cfg);
  std::size_t threads = cfg.sweep.threads ? cfg.sweep.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, children.size());
  std::vector<std::string> errors(children.size());
  std::vector<json> summaries(children.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < children.size();) {
        try {
          const auto m = execute(children[i].config);
          summaries[i] = {{"all_pass", m.all_pass()}, {"config_hash", m.config_hash}};
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    });
  for (auto& th : pool) th.join();

  json runs = json::array();
  std::size_t failed = 0, failing_checks = 0;
  for (std::size_t i = 0; i < children.size(); ++i) {
    const auto rel = fs::relative(fs::path(children[i].config.output_dir), w.root()).generic_string();
    json entry = {{"dir", rel}, {"assignment", children[i].assignment}};
    if (errors[i].empty()) {
      w.record(rel + "/manifest.json");
      entry.update(summaries[i]);
      if (!summaries[i]["all_pass"].get<bool>()) ++failing_checks;
    } else {
      ++failed;
      entry["error"] = errors[i];
    }
    runs.push_back(entry);
  }
  w.json_file("reports/sweep.json", {{"child_mode", to_string(cfg.sweep.child)}, {"runs", runs}});
  checks.bound("sweep.children", static_cast<double>(failed + failing_checks), 0.5,
               std::to_string(children.size()) + " children, " + std::to_string(failed) + " errored, " +
                   std::to_string(failing_checks) + " with failing checks");
  outcome["children"] = children.size();
  outcome["failed_children"] = failed;
  outcome["children_with_failing_checks"] = failing_checks;
  if (failed) outcome["errors"] = errors;
}

}  // namespace

RunManifest execute(const RunConfig& cfg) {
  RunManifest m;
  m.mode = to_string(cfg.mode);
  m.config_hash = config_hash(cfg);
  m.started = utc_now();
  Writer w(cfg.output_dir);
  w.json_file("config.json", to_json(cfg));
  Checks checks;
  switch (cfg.mode) {
    case Mode::simulate: {
      const auto traj = run_flow(cfg, w, checks, m.outcome);
      const double R = cfg.neck.R > 0.0 ? cfg.neck.R : traj.current.grid.r_hi();
      w.csv("lambda_series.csv", neck::energy_scale_series(traj, cfg.neck.epsilon, R).table());
      break;
    }
    case Mode::analyze: {
      const auto traj = run_flow(cfg, w, checks, m.outcome);
      run_neck(cfg, traj, w, checks, m.outcome);
      break;
    }
    case Mode::kernel_verify: run_kernels(cfg, w, checks, m.outcome); break;
    case Mode::barrier_verify: run_barriers(cfg, w, checks, m.outcome); break;
    case Mode::sweep: run_sweep(cfg, w, checks, m.outcome); break;
  }
  m.checks = checks.finish(cfg.mode);
  m.files = w.files();
  m.finished = utc_now();
  io::write_text(fs::path(cfg.output_dir) / "manifest.json", m.to_json().dump(2) + "\n");
  if (cfg.mode == Mode::sweep && m.outcome.value("failed_children", 0) > 0)
    throw std::runtime_error("sweep: some child runs failed; see manifest.json");
  return m;
}

}  // namespace hmlab::cli
