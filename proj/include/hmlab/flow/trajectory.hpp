#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmlab/flow/stepper.hpp"
#include "hmlab/io/csv.hpp"

namespace hmlab::flow {

struct StopCondition {
  double t_ceiling = 1.0;
  double grad_ceiling = std::numeric_limits<double>::infinity();  // sup |du|
  double lambda_stop = 0.0;       // stop (blowup) once the lambda proxy is below this; 0 disables
  double stationary_tol = 1e-8;   // converged if int|T|^2 dV falls below this at t_ceiling
  std::size_t max_steps = 2'000'000;
  std::vector<double> snapshot_times;  // steps are clipped to land on these exactly
  double snapshot_ratio = 0.9;    // also snapshot whenever lambda shrinks by this factor
  bool record_all = false;        // snapshot every accepted step
};

struct Trajectory {
  std::vector<CorotationalState> snapshots;
  // Per accepted step (index 0 = initial state).
  std::vector<double> times;
  std::vector<double> energy_series;   // discrete energy
  std::vector<double> tension_l2_cumulative;  // running int int |T|^2 dV dt
  std::vector<double> lambda_series;   // lambda proxy
  double tension_l2_integral = 0.0;

  CorotationalState current;
  FlowStepConfig cfg;
  double dt_next = 0.0;
  double lambda_last_snapshot = 0.0;
  std::size_t steps = 0;
  std::size_t rejections = 0;
  std::string stop_reason;
  bool blowup_detected = false;
  bool underresolved = false;
  bool converged = false;

  static Trajectory start(const CorotationalState& initial, const FlowStepConfig& cfg);

  // Snapshot index range with times in [t0, t1].
  std::vector<std::size_t> snapshots_between(double t0, double t1) const;
};

// Integrates until a stop condition holds. Resolution failures end the run with
// underresolved = true rather than throwing.
Trajectory run_to_blowup(const CorotationalState& initial, const FlowStepConfig& cfg, const StopCondition& stop);

// Continues a trajectory (fresh or restored from a checkpoint) in place.
void continue_run(Trajectory& traj, const StopCondition& stop);

// E(t1) - E(t0) + 2 int_{t0}^{t1} int |T|^2, relative to |E(t1) - E(t0)|.
double dissipation_defect(const Trajectory& traj, double t0, double t1);

// |int_{t0}^{t1} lhs dt - int_{t0}^{t1} rhs dt| over the snapshots in [t0, t1]
// (trapezoid in t), with lhs, rhs as in stress_terms.
double stress_identity_residual(const Trajectory& traj, double r, double t0, double t1);

// Snapshot table: r, h, h_r, rdu, f, g.
io::Table snapshot_table(const CorotationalState& st);

// Trajectory metadata: k, boundary value, grid, dt policy, stop reason, flags, integral.
nlohmann::json trajectory_manifest(const Trajectory& traj);

// Checkpoint = checkpoint.json (metadata and controller state) + state.csv (r, h).
// Restoring and continuing reproduces an uninterrupted run bit for bit.
void write_checkpoint(const Trajectory& traj, const std::filesystem::path& dir);
Trajectory read_checkpoint(const std::filesystem::path& dir);

nlohmann::json to_json(const FlowStepConfig& cfg);
FlowStepConfig flow_config_from_json(const nlohmann::json& j);

}  // namespace hmlab::flow
