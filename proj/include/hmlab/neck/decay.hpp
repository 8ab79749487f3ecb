#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hmlab/flow/trajectory.hpp"
#include "hmlab/neck/energy_scale.hpp"
#include "hmlab/neck/schedule.hpp"

namespace hmlab::neck {

// Smallest lambda_1 for which lambda(t) <= R (lambda_1 + ((t1 - t)/R^2)^{(1+alpha)/2}) on
// every series point with t1 - R^2 < t <= t1 (R = s.R).
double admissible_lambda1(const EnergyScaleSeries& s, double t1, double alpha);

// Outer radius for the neck checks at t1 = last snapshot. Candidates are R = r_max 2^{-j},
// j < max_halvings, whose time window t1 - R^2 is covered by the snapshots; the one with
// the smallest admissible lambda_1 (the longest neck [2 R lambda_1, R/2]) is chosen.
// found = false if no candidate has lambda_1 <= 1/2.
struct NeckWindow {
  double R = 0.0;
  double lambda1 = 0.0;
  double t1 = 0.0;
  bool found = false;
  EnergyScaleSeries series;  // at the chosen R
};
NeckWindow select_neck_window(const flow::Trajectory& traj, double epsilon, double alpha, int max_halvings = 12);

struct NeckDecayOptions {
  double epsilon = 1.0;
  double R = 1.0;
  double ceiling = 50.0;         // bound on the envelope constant
  double exponent_tol = 0.1;     // g exponent must be >= alpha/3 - tol on the outer neck
  double min_outer_decades = 0.3;  // shorter outer necks are not fitted
};

struct NeckDecayReport {
  double t1 = 0.0;
  double lambda1 = 0.0;
  double r_lo = 0.0, r_hi = 0.0;     // 2 R lambda_1, R / 2
  double r_cross = 0.0;              // R lambda_1^{1/(1+alpha)}: the two envelope branches meet
  double envelope_C = 0.0;           // sup r|du| / (sqrt(eps) (R lambda_1/r + (r/R)^alpha)^{1/3})
  bool inner_branch_dominates = false;  // at the arg sup
  DecayFit f_fit, g_fit, rdu_fit;       // on the whole neck
  DecayFit g_outer_fit;                 // on [max(2 r_cross, r_lo), r_hi]
  bool outer_fitted = false;
  double f_target_limit = 1.0;       // 2 nu - 1 -> 1
  double f_target_alpha = 1.0;       // alpha (2 nu - 1) -> alpha
  bool resolved = true;
  bool bounds_hold = false;
  std::string note;
};

// Evaluated on the state at t1 (usually the last snapshot).
NeckDecayReport check_neck_decay(const flow::CorotationalState& st, const NeckSchedule& schedule,
                                 const NeckDecayOptions& opts = {});
NeckDecayReport check_neck_decay(const flow::Trajectory& traj, const NeckSchedule& schedule,
                                 const NeckDecayOptions& opts = {});

struct EvolutionOptions {
  double eps0 = 1e30;     // skip when eta^2 >= eps0
  double ceiling = 50.0;
};

// box_nu f1 <= C_f eta and box_nu (g/r) <= 6 f1 / r^3 + C_g eta / r on the annulus
// (flat disc: the xi_0 terms vanish). eta = sup over the annulus and snapshots of
// |Du| + |D^2 u| + |D^3 u| in cylindrical coordinates. Time derivatives are backward
// differences between consecutive snapshots; a single snapshot is treated as stationary.
struct EvolutionReport {
  double C_f = 0.0;
  double C_g = 0.0;
  double eta = 0.0;
  double nu = 0.0;
  std::size_t samples = 0;
  bool skipped = false;
  bool within_ceiling = false;
  std::string reason;
};
EvolutionReport verify_evolution_inequalities(const flow::Trajectory& traj, double r_a, double r_b, double nu,
                                              const EvolutionOptions& opts = {});

// Holder modulus of h on rays, r1, r2 <= R/2 (the origin included with h = h(0)):
//   C_holder = sup |h(r2) - h(r1)| / |r2 - r1|^{alpha/3},
// the envelope constant C_env = sup r|du| / (r/R)^{alpha/3} on (0, R/2], and the bound
// from radial integration, C_bound = C_env (3/alpha) R^{-alpha/3} >= C_holder.
struct HolderReport {
  double C_holder = 0.0;
  double C_env = 0.0;
  double C_bound = 0.0;
  double C_integral = 0.0;   // sup |h(r) - h(0)| / ((3/alpha)(r/R)^{alpha/3})
  bool consistent = false;   // C_holder <= C_bound <= 4 C_holder, up to 1e-9 absolute (rounding in sin h)
  bool envelope_verified = false;  // C_env <= ceiling
  std::vector<double> r, increment, bound;  // |h(r) - h(0)| and C_env (3/alpha)(r/R)^{alpha/3}
};
HolderReport holder_modulus(const flow::CorotationalState& st, double alpha, double R, double ceiling = 50.0);

nlohmann::json to_json(const NeckDecayReport& r);
nlohmann::json to_json(const EvolutionReport& r);
nlohmann::json to_json(const HolderReport& r);

}  // namespace hmlab::neck
