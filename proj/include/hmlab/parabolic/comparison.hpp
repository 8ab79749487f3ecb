#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "hmlab/core/field.hpp"
#include "hmlab/parabolic/box_nu.hpp"

namespace hmlab::parabolic {

struct ComparisonReport {
  std::size_t violations = 0;
  double worst_margin = 0.0;  // min over the interior of barrier - sub
  double at_r = 0.0;
  double at_t = 0.0;
  double tolerance = 0.0;
  double sub_excess = 0.0;  // max of box_nu(sub) - forcing, discrete
  double barrier_deficit = 0.0;  // max of forcing - box_nu(barrier), discrete; not forgiven
  std::size_t boundary_violations = 0;  // only counted when boundary checks are not strict
  std::size_t samples = 0;
  std::string domain;
};

void to_json(nlohmann::json& j, const ComparisonReport& r);

struct ComparisonOptions {
  std::optional<double> tolerance;  // overrides the truncation-based tolerance
  // When false, parabolic-boundary failures are counted (in violations and
  // boundary_violations) instead of thrown; used by falsification controls.
  bool strict_boundary = true;
  // Relative amount by which box_nu(sub) may exceed the forcing before the sub-solution
  // is rejected (sub-solutions taken from a different scheme need more).
  double sub_slack = 1e-9;
};

// Certifies barrier >= sub on the interior of the sampled (r, t) box.
//
// Both fields must share grid and time levels. The discrete operator is box_nu with
// backward time differences (the one the implicit solvers satisfy). Its spatial part is
// r^{-2}(nu^2 - D_ss), an M-matrix, so for d = barrier - sub the discrete maximum
// principle gives, when d >= 0 on the parabolic boundary,
//   min d(t_n) >= -sum_k dt_k * max_i (box_nu sub - box_nu barrier)^-.
// The tolerance covers only the sub-solution's own excess over the forcing plus rounding.
// Any failure of the barrier to be a discrete supersolution is not forgiven and shows up
// as barrier_deficit and, if large enough, as interior violations.
//
// Throws PreconditionError (with the location) if box_nu(sub) exceeds the forcing beyond
// its stencil error, or (strict_boundary) if the barrier fails to dominate on the
// parabolic boundary.
ComparisonReport verify_comparison(const SpaceTimeField& sub, const SpaceTimeField& barrier,
                                   const std::function<double(double, double)>& forcing_bound, BoxNuParams p,
                                   const ComparisonOptions& opts = {});

// Pointwise scalar multiple of a field (used for falsification controls).
SpaceTimeField scaled(const SpaceTimeField& f, double factor);

}  // namespace hmlab::parabolic
