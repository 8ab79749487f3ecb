#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hmlab {

// Log-uniform radial mesh: r_i = r_lo * exp(i * ds), i = 0..n-1, r_{n-1} = r_hi.
// Uniform in s = ln r, which is where all stencils in this project live.
class RadialGrid {
 public:
  RadialGrid() = default;

  static RadialGrid log_uniform(double r_lo, double r_hi, std::size_t n);
  // Node count chosen so that one decade of r holds `nodes_per_decade` cells.
  static RadialGrid per_decade(double r_lo, double r_hi, double nodes_per_decade);

  std::size_t size() const noexcept { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  double s(std::size_t i) const { return s_lo_ + static_cast<double>(i) * ds_; }
  double ds() const noexcept { return ds_; }
  double r_lo() const noexcept { return r_.front(); }
  double r_hi() const noexcept { return r_.back(); }
  std::span<const double> nodes() const noexcept { return r_; }

  // Index of the node nearest to r in log distance (clamped to the mesh).
  std::size_t nearest(double r) const;
  // Largest i with r_i <= r (clamped).
  std::size_t floor_index(double r) const;

  // Same spacing, every node multiplied by sigma.
  RadialGrid scaled(double sigma) const;
  // Nodes [first, last] inclusive as a new grid.
  RadialGrid slice(std::size_t first, std::size_t last) const;

 private:
  RadialGrid(double s_lo, double ds, std::size_t n);

  double s_lo_ = 0.0;
  double ds_ = 0.0;
  std::vector<double> r_;
};

}  // namespace hmlab
