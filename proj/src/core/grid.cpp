#include "hmlab/core/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hmlab/core/errors.hpp"

namespace hmlab {

RadialGrid::RadialGrid(double s_lo, double ds, std::size_t n) : s_lo_(s_lo), ds_(ds), r_(n) {
  for (std::size_t i = 0; i < n; ++i) r_[i] = std::exp(s_lo + static_cast<double>(i) * ds);
}

RadialGrid RadialGrid::log_uniform(double r_lo, double r_hi, std::size_t n) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw GridError("log grid needs 0 < r_lo < r_hi");
  if (n < 3) throw GridError("log grid needs at least 3 nodes");
  const double s_lo = std::log(r_lo);
  const double ds = (std::log(r_hi) - s_lo) / static_cast<double>(n - 1);
  RadialGrid g(s_lo, ds, n);
  // Pin the endpoints so that boundary conditions are imposed exactly where asked.
  g.r_.front() = r_lo;
  g.r_.back() = r_hi;
  return g;
}

RadialGrid RadialGrid::per_decade(double r_lo, double r_hi, double nodes_per_decade) {
  if (!(nodes_per_decade > 0.0)) throw GridError("nodes_per_decade must be positive");
  const double decades = std::log10(r_hi / r_lo);
  const auto cells = static_cast<std::size_t>(std::ceil(decades * nodes_per_decade));
  return log_uniform(r_lo, r_hi, std::max<std::size_t>(cells + 1, 3));
}

std::size_t RadialGrid::nearest(double r) const {
  if (r <= r_.front()) return 0;
  if (r >= r_.back()) return r_.size() - 1;
  const double x = (std::log(r) - s_lo_) / ds_;
  const auto i = static_cast<std::size_t>(std::lround(x));
  return std::min(i, r_.size() - 1);
}

std::size_t RadialGrid::floor_index(double r) const {
  if (r <= r_.front()) return 0;
  if (r >= r_.back()) return r_.size() - 1;
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  return static_cast<std::size_t>(std::distance(r_.begin(), it)) - 1;
}

RadialGrid RadialGrid::scaled(double sigma) const {
  if (!(sigma > 0.0)) throw GridError("scale factor must be positive");
  RadialGrid g = *this;
  g.s_lo_ += std::log(sigma);
  for (double& x : g.r_) x *= sigma;
  return g;
}

RadialGrid RadialGrid::slice(std::size_t first, std::size_t last) const {
  if (last >= r_.size() || first + 2 > last) throw GridError("slice needs at least 3 nodes");
  RadialGrid g;
  g.s_lo_ = s_lo_ + static_cast<double>(first) * ds_;
  g.ds_ = ds_;
  g.r_.assign(r_.begin() + static_cast<std::ptrdiff_t>(first),
              r_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return g;
}

}  // namespace hmlab
