#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmlab/flow/stepper.hpp"
#include "hmlab/parabolic/supersolution.hpp"

namespace hmlab::cli {

enum class Mode { simulate, analyze, kernel_verify, barrier_verify, sweep };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);  // throws ConfigError("mode")

struct InitialData {
  std::string kind = "ramp";  // ramp: h = boundary_value r / r_max; bubble: 2 atan((r/sigma)^k); file: csv (r, h)
  double boundary_value = 3.5;
  double sigma = 0.1;
  std::string path;
};

struct FlowRunConfig {
  int k = 1;
  double r_min = 1e-6;
  double r_max = 1.0;
  double nodes_per_decade = 100.0;
  InitialData initial;
  flow::FlowStepConfig step;
  double t_ceiling = 1.0;
  double lambda_stop = 1e-4;
  double grad_ceiling = 0.0;  // 0 = none
  double stationary_tol = 1e-8;
  std::size_t max_steps = 2'000'000;
  double snapshot_ratio = 0.9;
  std::vector<double> snapshot_times;
};

struct NeckConfig {
  double alpha = 1.0;
  double kappa = 0.5;
  double epsilon = 1.0;
  double R = 0.0;  // 0 selects the outer radius automatically
  double nu = 0.9;
  double annulus_lo = 0.25;  // evolution-inequality annulus, in units of R
  double annulus_hi = 0.5;
};

struct KernelCase {
  double mu = 3.0;
  double rho = 0.01;
  double R = 1.0;
  double k = 1.0;  // initial data r^{-k} for the initial-value envelope
};

struct KernelConfig {
  std::vector<KernelCase> cases{{1.5, 0.01, 1.0, 0.0}, {2.0, 0.01, 1.0, 1.0}, {3.0, 0.01, 1.0, 1.0}};
  std::size_t nodes = 1201;
  double t_end = 1.0;
  std::size_t samples = 9;           // random (r, t) points for mass and PDE residual
  std::size_t sandwich_points = 20;  // per axis
};

struct BarrierConfig {
  std::vector<parabolic::SupersolutionSpec> f_fixtures;
  std::vector<parabolic::SupersolutionSpec> g_fixtures;
  double nodes_per_decade = 160.0;
  double t_end = 2.0;
};
BarrierConfig default_barrier_config();

struct SweepConfig {
  Mode child = Mode::analyze;
  std::map<std::string, std::vector<nlohmann::json>> parameters;  // dotted config path -> values
  std::size_t threads = 0;                                        // 0 = hardware concurrency
};

struct RunConfig {
  Mode mode = Mode::simulate;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  FlowRunConfig flow;
  NeckConfig neck;
  KernelConfig kernel;
  BarrierConfig barrier = default_barrier_config();
  SweepConfig sweep;
  std::map<std::string, double> tolerances;  // defaults filled in

  double tolerance(const std::string& name) const;
};

// Default tolerances; the only names accepted under "tolerances".
const std::map<std::string, double>& default_tolerances();

// Parses a JSON document, fills defaults and validates. Unknown keys and wrong types
// throw ConfigError naming the dotted key ("neck.kappa", "flow.grid.r_min", ...).
RunConfig parse_config(const std::string& text);
RunConfig config_from_json(const nlohmann::json& j);

// Canonical JSON with every default spelled out; its SHA-256 is the config hash.
nlohmann::json to_json(const RunConfig& c);
std::string config_hash(const RunConfig& c);

// Cross product over sweep.parameters (keys in lexicographic order, the last varying
// fastest). Each child has mode = sweep.child and output_dir = <parent>/run_NNN.
struct SweepChild {
  RunConfig config;
  nlohmann::json assignment;  // dotted path -> value
};
std::vector<SweepChild> expand_sweep(const RunConfig& c);

}  // namespace hmlab::cli
