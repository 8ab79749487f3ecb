#pragma once

#include <string>

#include "hmlab/flow/state.hpp"

namespace hmlab::flow {

// implicit: backward Euler on the full discrete gradient flow, solved by Newton.
// semi_implicit: implicit Laplacian, explicit sin cos term.
// explicit_euler: forward Euler.
enum class Scheme { implicit, semi_implicit, explicit_euler };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct FlowStepConfig {
  double dt_initial = 1e-6;
  double cfl_safety = 0.5;      // in (0, 1): fraction of the stability limit (semi/explicit)
  Scheme scheme = Scheme::implicit;
  double regrid_threshold = 10.0;  // cells between r_min and the concentration scale before "underresolved"
  double max_dh = 0.02;         // largest accepted change of h per step (radians)
  double growth = 1.25;         // max step growth factor
  double dt_max = 1e-3;
  double dt_min = 1e-16;
  bool adaptive = true;         // false: every step uses dt_initial (convergence studies)

  void validate() const;  // throws ConfigError
};

struct StepResult {
  CorotationalState state;
  double dt = 0.0;         // step actually taken
  double dt_next = 0.0;    // proposal for the next step
  double energy_before = 0.0;
  double energy_after = 0.0;
  double tension_l2 = 0.0;  // at the new state
  int iterations = 0;       // Newton iterations (implicit)
  int rejections = 0;
};

// Stability cap for the semi-implicit and explicit schemes on this state (infinite for
// the implicit scheme).
double stable_dt(const CorotationalState& st, const FlowStepConfig& cfg);

// One step attempted with dt (clipped to the stability cap). A step is rejected and
// retried at dt/2 when Newton does not converge, the discrete energy increases by more
// than 1e-8 relative, or (adaptive) max |dh| exceeds max_dh. Throws
// BlowupResolutionError on non-finite values or when dt falls below dt_min.
StepResult advance(const CorotationalState& st, const FlowStepConfig& cfg, double dt);

// Single step at cfg.dt_initial.
CorotationalState step(const CorotationalState& st, const FlowStepConfig& cfg);

}  // namespace hmlab::flow
