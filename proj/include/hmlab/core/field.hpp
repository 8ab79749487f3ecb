#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmlab/core/grid.hpp"

namespace hmlab {

// Values sampled on (radial node, time level). Row n holds the slice at times()[n].
// Immutable once built; used for heat-kernel solutions, barriers and residuals alike.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(RadialGrid grid, std::vector<double> times, std::vector<double> values);
  // Zero-filled field on the given grid and times.
  SpaceTimeField(RadialGrid grid, std::vector<double> times);

  const RadialGrid& grid() const noexcept { return grid_; }
  std::span<const double> times() const noexcept { return times_; }
  std::size_t n_times() const noexcept { return times_.size(); }
  std::size_t n_nodes() const noexcept { return grid_.size(); }

  double operator()(std::size_t n, std::size_t i) const { return values_[n * grid_.size() + i]; }
  double& operator()(std::size_t n, std::size_t i) { return values_[n * grid_.size() + i]; }
  std::span<const double> slice(std::size_t n) const {
    return {values_.data() + n * grid_.size(), grid_.size()};
  }
  std::span<double> slice(std::size_t n) { return {values_.data() + n * grid_.size(), grid_.size()}; }
  std::span<const double> values() const noexcept { return values_; }

  // Index of the time level nearest to t.
  std::size_t time_index(double t) const;

  double max_abs() const;
  double min_value() const;
  bool all_finite() const;

 private:
  RadialGrid grid_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// Alias used where the field carries a heat-kernel solution (v0, v1, y1, G).
using KernelField = SpaceTimeField;

// Pointwise linear combination a*x + b*y of fields sharing grid and times.
SpaceTimeField combine(double a, const SpaceTimeField& x, double b, const SpaceTimeField& y);

}  // namespace hmlab
