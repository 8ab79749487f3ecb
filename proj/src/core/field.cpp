#include "hmlab/core/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmlab/core/errors.hpp"

namespace hmlab {

SpaceTimeField::SpaceTimeField(RadialGrid grid, std::vector<double> times, std::vector<double> values)
    : grid_(std::move(grid)), times_(std::move(times)), values_(std::move(values)) {
  if (values_.size() != times_.size() * grid_.size()) {
    throw GridError("field value count does not match grid x times");
  }
}

SpaceTimeField::SpaceTimeField(RadialGrid grid, std::vector<double> times)
    : grid_(std::move(grid)), times_(std::move(times)), values_(times_.size() * grid_.size(), 0.0) {}

std::size_t SpaceTimeField::time_index(double t) const {
  if (times_.empty()) throw GridError("field has no time levels");
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return times_.size() - 1;
  const auto j = static_cast<std::size_t>(std::distance(times_.begin(), it));
  if (j > 0 && std::abs(times_[j - 1] - t) <= std::abs(times_[j] - t)) return j - 1;
  return j;
}

double SpaceTimeField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SpaceTimeField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return m;
}

bool SpaceTimeField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

SpaceTimeField combine(double a, const SpaceTimeField& x, double b, const SpaceTimeField& y) {
  if (x.n_nodes() != y.n_nodes() || x.n_times() != y.n_times()) {
    throw GridError("combine: fields have different shapes");
  }
  std::vector<double> out(x.values().size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * x.values()[k] + b * y.values()[k];
  return {x.grid(), std::vector<double>(x.times().begin(), x.times().end()), std::move(out)};
}

}  // namespace hmlab
