#include "hmlab/parabolic/box_nu.hpp"

#include <cmath>

#include "hmlab/core/errors.hpp"
#include "hmlab/kernels/radial_evolution.hpp"

namespace hmlab::parabolic {

BoxNuParams BoxNuParams::make(double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw SpecError("nu must lie in [0, 1]");
  return {nu};
}

std::vector<double> apply_box_nu_static(const RadialGrid& grid, std::span<const double> f, BoxNuParams p) {
  if (grid.size() < 3) throw GridError("box_nu needs at least 3 radial nodes");
  auto out = kernels::apply_operator(grid, {0.0, p.nu * p.nu}, f);
  for (double& x : out) x = -x;
  return out;
}

std::vector<double> spatial_truncation(const RadialGrid& grid, std::span<const double> f, BoxNuParams) {
  // The potential term is pointwise exact; only the second difference carries error.
  const std::size_t n = grid.size();
  const double ds = grid.ds();
  std::vector<double> est(n, 0.0);
  if (n < 5) return est;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double inv_r2 = 1.0 / (grid.r(i) * grid.r(i));
    const double h1 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (ds * ds);
    const double h2 = (f[i + 2] - 2.0 * f[i] + f[i - 2]) / (4.0 * ds * ds);
    est[i] = inv_r2 * std::abs(h1 - h2) / 3.0;
  }
  est[1] = est[2];
  est[n - 2] = est[n - 3];
  return est;
}

SpaceTimeField apply_box_nu(const SpaceTimeField& field, BoxNuParams p, TimeDifference td) {
  const auto& grid = field.grid();
  const std::size_t n = grid.size();
  const std::size_t m = field.n_times();
  if (n < 3) throw GridError("box_nu needs at least 3 radial nodes");
  if (m < 2) throw GridError("box_nu needs at least 2 time levels");
  const auto t = field.times();
  SpaceTimeField out(grid, std::vector<double>(t.begin(), t.end()));
  for (std::size_t k = 0; k < m; ++k) {
    if (td == TimeDifference::backward && k == 0) continue;
    const auto spatial = apply_box_nu_static(grid, field.slice(k), p);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double ft = 0.0;
      if (td == TimeDifference::backward) {
        ft = (field(k, i) - field(k - 1, i)) / (t[k] - t[k - 1]);
      } else if (k == 0) {
        ft = (field(1, i) - field(0, i)) / (t[1] - t[0]);
      } else if (k + 1 == m) {
        ft = (field(k, i) - field(k - 1, i)) / (t[k] - t[k - 1]);
      } else {
        // Second-order derivative on a nonuniform three-level stencil.
        const double a = t[k] - t[k - 1], b = t[k + 1] - t[k];
        ft = (a * a * field(k + 1, i) - b * b * field(k - 1, i) + (b * b - a * a) * field(k, i)) / (a * b * (a + b));
      }
      out(k, i) = ft + spatial[i];
    }
  }
  return out;
}

}  // namespace hmlab::parabolic
