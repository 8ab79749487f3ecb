#include "hmlab/flow/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hmlab/core/errors.hpp"

namespace hmlab::flow {

namespace {

void record(Trajectory& tr) {
  tr.times.push_back(tr.current.time);
  tr.energy_series.push_back(discrete_energy(tr.current));
  tr.tension_l2_cumulative.push_back(tr.tension_l2_integral);
  tr.lambda_series.push_back(lambda_proxy(tr.current));
}

void snapshot(Trajectory& tr) {
  tr.snapshots.push_back(tr.current);
  tr.lambda_last_snapshot = lambda_proxy(tr.current);
}

// Number of grid cells between r_min and r.
double cells_above_floor(const CorotationalState& st, double r) {
  return (std::log(r) - std::log(st.grid.r_lo())) / st.grid.ds();
}

}  // namespace

Trajectory Trajectory::start(const CorotationalState& initial, const FlowStepConfig& cfg) {
  cfg.validate();
  initial.validate();
  Trajectory tr;
  tr.cfg = cfg;
  tr.current = initial;
  const double c = std::exp(-initial.k * initial.grid.ds());
  tr.current.h[0] = initial.origin_value + c * (initial.h[1] - initial.origin_value);
  tr.current.h.back() = initial.boundary_value;
  tr.dt_next = cfg.dt_initial;
  record(tr);
  snapshot(tr);
  return tr;
}

std::vector<std::size_t> Trajectory::snapshots_between(double t0, double t1) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < snapshots.size(); ++i)
    if (snapshots[i].time >= t0 && snapshots[i].time <= t1) idx.push_back(i);
  return idx;
}

void continue_run(Trajectory& tr, const StopCondition& stop) {
  std::vector<double> marks = stop.snapshot_times;
  std::sort(marks.begin(), marks.end());
  const std::size_t step_limit = tr.steps + stop.max_steps;
  tr.stop_reason.clear();
  for (;;) {
    const auto& st = tr.current;
    const double lam = lambda_proxy(st);
    if (stop.lambda_stop > 0.0 && lam < stop.lambda_stop) {
      tr.blowup_detected = true;
      tr.stop_reason = "lambda_stop";
      break;
    }
    if (max_gradient(st) > stop.grad_ceiling) {
      tr.blowup_detected = true;
      tr.stop_reason = "grad_ceiling";
      break;
    }
    if (lam < st.grid.r_hi() && cells_above_floor(st, lam) < tr.cfg.regrid_threshold) {
      tr.underresolved = true;
      tr.stop_reason = "underresolved: concentration scale within regrid_threshold cells of r_min";
      break;
    }
    if (st.time >= stop.t_ceiling) {
      tr.stop_reason = "t_ceiling";
      tr.converged = tension_l2(st) < stop.stationary_tol;
      break;
    }
    if (tr.steps >= step_limit) {
      tr.stop_reason = "max_steps";
      break;
    }
    double dt = tr.dt_next;
    double target = stop.t_ceiling;
    for (double m : marks)
      if (m > st.time) {
        target = std::min(target, m);
        break;
      }
    bool landing = false;
    if (st.time + dt >= target) {
      dt = target - st.time;
      landing = true;
    }
    StepResult res;
    try {
      res = advance(st, tr.cfg, dt);
    } catch (const BlowupResolutionError& e) {
      tr.underresolved = true;
      tr.stop_reason = std::string("underresolved: ") + e.what();
      break;
    }
    landing = landing && res.rejections == 0;
    const double proposal = tr.dt_next;
    tr.current = std::move(res.state);
    if (landing) tr.current.time = target;
    tr.tension_l2_integral += res.dt * res.tension_l2;
    tr.dt_next = landing ? std::max(res.dt_next, std::min(proposal, tr.cfg.dt_max)) : res.dt_next;
    if (!tr.cfg.adaptive) tr.dt_next = tr.cfg.dt_initial;
    ++tr.steps;
    tr.rejections += static_cast<std::size_t>(res.rejections);
    record(tr);
    const bool on_mark = landing && std::binary_search(marks.begin(), marks.end(), target);
    if (stop.record_all || on_mark || tr.lambda_series.back() <= stop.snapshot_ratio * tr.lambda_last_snapshot) {
      snapshot(tr);
    }
  }
  if (tr.snapshots.empty() || tr.snapshots.back().time != tr.current.time) snapshot(tr);
}

Trajectory run_to_blowup(const CorotationalState& initial, const FlowStepConfig& cfg, const StopCondition& stop) {
  auto tr = Trajectory::start(initial, cfg);
  continue_run(tr, stop);
  return tr;
}

double dissipation_defect(const Trajectory& tr, double t0, double t1) {
  const auto lo = std::lower_bound(tr.times.begin(), tr.times.end(), t0);
  const auto hi = std::upper_bound(tr.times.begin(), tr.times.end(), t1);
  if (lo == tr.times.end() || hi == tr.times.begin()) throw PreconditionError("dissipation window outside trajectory");
  const auto i0 = static_cast<std::size_t>(lo - tr.times.begin());
  const auto i1 = static_cast<std::size_t>(hi - tr.times.begin()) - 1;
  if (i1 <= i0) throw PreconditionError("dissipation window holds fewer than two steps");
  const double dE = tr.energy_series[i1] - tr.energy_series[i0];
  const double Q = tr.tension_l2_cumulative[i1] - tr.tension_l2_cumulative[i0];
  return std::abs(dE + 2.0 * Q) / std::abs(dE);
}

double stress_identity_residual(const Trajectory& tr, double r, double t0, double t1) {
  const auto idx = tr.snapshots_between(t0, t1);
  if (idx.size() < 2) throw PreconditionError("stress identity needs >= 2 snapshots in the window");
  double il = 0.0, ir = 0.0;
  StressSample prev = stress_terms(tr.snapshots[idx[0]], r);
  for (std::size_t q = 1; q < idx.size(); ++q) {
    const auto cur = stress_terms(tr.snapshots[idx[q]], r);
    const double dt = tr.snapshots[idx[q]].time - tr.snapshots[idx[q - 1]].time;
    il += 0.5 * dt * (prev.lhs + cur.lhs);
    ir += 0.5 * dt * (prev.rhs + cur.rhs);
    prev = cur;
  }
  return std::abs(il - ir);
}

io::Table snapshot_table(const CorotationalState& st) {
  const auto p = energy_profile(st);
  const auto hs = h_s(st);
  io::Table t;
  t.header = {"r", "h", "h_r", "rdu", "f", "g"};
  std::vector<double> hr(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) hr[i] = hs[i] / st.grid.r(i);
  t.columns = {p.r, st.h, hr, p.rdu, p.f, p.g};
  return t;
}

nlohmann::json to_json(const FlowStepConfig& c) {
  return {{"dt_initial", c.dt_initial}, {"cfl_safety", c.cfl_safety},   {"scheme", to_string(c.scheme)},
          {"regrid_threshold", c.regrid_threshold}, {"max_dh", c.max_dh}, {"growth", c.growth},
          {"dt_max", c.dt_max},         {"dt_min", c.dt_min},           {"adaptive", c.adaptive}};
}

FlowStepConfig flow_config_from_json(const nlohmann::json& j) {
  FlowStepConfig c;
  if (!j.is_object()) throw ConfigError("flow", "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string name = "flow." + key;
    auto num = [&]() {
      if (!v.is_number()) throw ConfigError(name, "expected a number");
      return v.get<double>();
    };
    if (key == "dt_initial") c.dt_initial = num();
    else if (key == "cfl_safety") c.cfl_safety = num();
    else if (key == "regrid_threshold") c.regrid_threshold = num();
    else if (key == "max_dh") c.max_dh = num();
    else if (key == "growth") c.growth = num();
    else if (key == "dt_max") c.dt_max = num();
    else if (key == "dt_min") c.dt_min = num();
    else if (key == "scheme") {
      if (!v.is_string()) throw ConfigError(name, "expected a string");
      c.scheme = scheme_from_string(v.get<std::string>());
    } else if (key == "adaptive") {
      if (!v.is_boolean()) throw ConfigError(name, "expected a boolean");
      c.adaptive = v.get<bool>();
    } else {
      throw ConfigError(name, "unknown key");
    }
  }
  c.validate();
  return c;
}

nlohmann::json trajectory_manifest(const Trajectory& tr) {
  const auto& st = tr.current;
  nlohmann::json j;
  j["k"] = st.k;
  j["boundary_value"] = st.boundary_value;
  j["origin_value"] = st.origin_value;
  j["grid"] = {{"r_min", st.grid.r_lo()}, {"r_max", st.grid.r_hi()}, {"nodes", st.grid.size()}, {"ds", st.grid.ds()}};
  j["dt_policy"] = to_json(tr.cfg);
  j["stop_reason"] = tr.stop_reason;
  j["blowup_detected"] = tr.blowup_detected;
  j["underresolved"] = tr.underresolved;
  j["converged"] = tr.converged;
  j["steps"] = tr.steps;
  j["rejections"] = tr.rejections;
  j["t_final"] = st.time;
  j["tension_l2_integral"] = tr.tension_l2_integral;
  j["tension_l2_final"] = tension_l2(st);
  if (!tr.energy_series.empty()) {
    j["energy_initial"] = tr.energy_series.front();
    j["energy_final"] = tr.energy_series.back();
  }
  j["lambda_proxy_final"] = lambda_proxy(st);
  j["snapshots"] = tr.snapshots.size();
  return j;
}

void write_checkpoint(const Trajectory& tr, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto j = trajectory_manifest(tr);
  j["time"] = tr.current.time;
  j["dt_next"] = tr.dt_next;
  j["lambda_last_snapshot"] = tr.lambda_last_snapshot;
  io::write_text(dir / "checkpoint.json", j.dump(2) + "\n");
  io::Table t;
  t.header = {"r", "h"};
  t.columns = {std::vector<double>(tr.current.grid.nodes().begin(), tr.current.grid.nodes().end()), tr.current.h};
  io::write_csv(dir / "state.csv", t);
}

Trajectory read_checkpoint(const std::filesystem::path& dir) {
  const auto j = nlohmann::json::parse(io::read_text(dir / "checkpoint.json"));
  const auto t = io::read_csv(dir / "state.csv");
  const auto& g = j.at("grid");
  CorotationalState st;
  st.grid = RadialGrid::log_uniform(g.at("r_min").get<double>(), g.at("r_max").get<double>(),
                                    g.at("nodes").get<std::size_t>());
  st.h = t.column("h");
  st.k = j.at("k").get<int>();
  st.time = j.at("time").get<double>();
  st.boundary_value = j.at("boundary_value").get<double>();
  st.origin_value = j.at("origin_value").get<double>();
  st.validate();
  Trajectory tr;
  tr.cfg = flow_config_from_json(j.at("dt_policy"));
  tr.current = st;
  tr.dt_next = j.at("dt_next").get<double>();
  tr.steps = j.at("steps").get<std::size_t>();
  tr.rejections = j.at("rejections").get<std::size_t>();
  tr.tension_l2_integral = j.at("tension_l2_integral").get<double>();
  record(tr);
  tr.snapshots.push_back(st);
  tr.lambda_last_snapshot = j.at("lambda_last_snapshot").get<double>();
  return tr;
}

}  // namespace hmlab::flow
