#pragma once

#include <span>
#include <vector>

#include "hmlab/core/field.hpp"
#include "hmlab/core/grid.hpp"

namespace hmlab::parabolic {

// box_nu = d_t - (d_r^2 + r^{-1} d_r - nu^2 r^{-2}), 0 <= nu <= 1.
struct BoxNuParams {
  double nu = 1.0;
  static BoxNuParams make(double nu);
};

enum class TimeDifference {
  centered,  // nonuniform three-point in the interior, one-sided at the first/last level
  backward,  // (f_n - f_{n-1}) / dt_n, matching implicit Euler; level 0 is left at zero
};

// Residual box_nu(field) at interior radial nodes; boundary nodes are zero.
SpaceTimeField apply_box_nu(const SpaceTimeField& field, BoxNuParams p,
                            TimeDifference td = TimeDifference::centered);

// Spatial part only: -(f_rr + f_r / r - nu^2 f / r^2) for a time-independent profile.
std::vector<double> apply_box_nu_static(const RadialGrid& grid, std::span<const double> f, BoxNuParams p);

// Richardson estimate |L_h f - L_2h f| / 3 of the spatial stencil error at every node.
std::vector<double> spatial_truncation(const RadialGrid& grid, std::span<const double> f, BoxNuParams p);

}  // namespace hmlab::parabolic
