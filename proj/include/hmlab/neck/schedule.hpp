#pragma once

#include <json.hpp>

namespace hmlab::neck {

// Scale hierarchy of one induction step:
//   a = 72(1+alpha)/alpha, rho = 2 lambda_bar, zeta = rho^{1/(1+alpha)},
//   rho1 = zeta^{1 + 9 alpha/16}, t0 offset = zeta^2 / kappa^2.
struct NeckSchedule {
  double alpha = 1.0;
  double kappa = 0.5;
  double a = 144.0;
  double lambda_bar = 0.0;
  double rho = 0.0;
  double zeta = 0.0;
  double rho1 = 0.0;
  double t0_offset = 0.0;
  bool base_regime = false;  // lambda_bar <= kappa^a
  bool admissible = false;   // rho / kappa <= zeta <= 2 kappa^{a/(1+alpha)}
};

// strict: outside the base regime (lambda_bar > kappa^a) or when admissibility fails,
// throws ScheduleError. unchecked: same numbers, flags only (desk-scale runs sit far
// above kappa^a for every admissible kappa).
enum class ScheduleMode { strict, unchecked };

NeckSchedule make_schedule(double lambda_bar, double alpha, double kappa, ScheduleMode mode = ScheduleMode::strict);

nlohmann::json to_json(const NeckSchedule& s);

}  // namespace hmlab::neck
