#include "hmlab/parabolic/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hmlab/core/errors.hpp"

namespace hmlab::parabolic {

void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = nlohmann::json{{"violations", r.violations}, {"worst_margin", r.worst_margin},
                     {"at_r", r.at_r},             {"at_t", r.at_t},
                     {"tolerance", r.tolerance},   {"sub_excess", r.sub_excess},
                     {"barrier_deficit", r.barrier_deficit},
                     {"boundary_violations", r.boundary_violations},
                     {"samples", r.samples},       {"domain", r.domain}};
}

SpaceTimeField scaled(const SpaceTimeField& f, double factor) {
  SpaceTimeField out = f;
  for (std::size_t n = 0; n < out.n_times(); ++n)
    for (std::size_t i = 0; i < out.n_nodes(); ++i) out(n, i) *= factor;
  return out;
}

namespace {

[[noreturn]] void boundary_failure(const char* where, double r, double t, double margin) {
  std::ostringstream os;
  os << "barrier does not dominate on the " << where << " boundary at r=" << r << ", t=" << t
     << " (margin " << margin << ")";
  throw PreconditionError(os.str());
}

}  // namespace

ComparisonReport verify_comparison(const SpaceTimeField& sub, const SpaceTimeField& barrier,
                                   const std::function<double(double, double)>& forcing_bound, BoxNuParams p,
                                   const ComparisonOptions& opts) {
  if (sub.n_nodes() != barrier.n_nodes() || sub.n_times() != barrier.n_times()) {
    throw GridError("comparison fields have different shapes");
  }
  const auto& grid = sub.grid();
  const std::size_t n = grid.size();
  const std::size_t m = sub.n_times();
  const auto t = sub.times();
  const double scale = std::max({1.0, sub.max_abs(), barrier.max_abs()});
  const double slack = 1e-12 * scale;

  ComparisonReport rep;
  auto boundary = [&](const char* where, std::size_t k, std::size_t i) {
    const double d = barrier(k, i) - sub(k, i);
    if (d >= -slack) return;
    if (opts.strict_boundary) boundary_failure(where, grid.r(i), t[k], d);
    ++rep.boundary_violations;
  };
  for (std::size_t i = 0; i < n; ++i) boundary("initial", 0, i);
  for (std::size_t k = 1; k < m; ++k) {
    boundary("inner", k, 0);
    boundary("outer", k, n - 1);
  }

  const auto res_sub = apply_box_nu(sub, p, TimeDifference::backward);
  const auto res_bar = apply_box_nu(barrier, p, TimeDifference::backward);
  const double ds = grid.ds();
  const double eps = std::numeric_limits<double>::epsilon();
  double accumulated = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    const double dt = t[k] - t[k - 1];
    double level = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double r2 = grid.r(i) * grid.r(i);
      // Rounding scale of the discrete operator at this node.
      const double round = 64.0 * eps * scale * (4.0 / (ds * ds * r2) + p.nu * p.nu / r2 + 2.0 / dt);
      const double fb = forcing_bound(grid.r(i), t[k]);
      const double excess = res_sub(k, i) - fb;
      rep.sub_excess = std::max(rep.sub_excess, excess);
      rep.barrier_deficit = std::max(rep.barrier_deficit, fb - res_bar(k, i));
      if (excess > 10.0 * round + opts.sub_slack * std::max(1.0, std::abs(fb))) {
        std::ostringstream os;
        os << "sub-solution exceeds the forcing bound at r=" << grid.r(i) << ", t=" << t[k] << " by " << excess;
        throw PreconditionError(os.str());
      }
      level = std::max(level, std::max(excess, 0.0) + round);
    }
    accumulated += dt * level;
  }
  rep.tolerance = opts.tolerance.value_or(accumulated + slack);

  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < m; ++k) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double d = barrier(k, i) - sub(k, i);
      ++rep.samples;
      if (d < rep.worst_margin) {
        rep.worst_margin = d;
        rep.at_r = grid.r(i);
        rep.at_t = t[k];
      }
      if (d < -rep.tolerance) ++rep.violations;
    }
  }
  if (rep.samples == 0) rep.worst_margin = 0.0;
  rep.violations += rep.boundary_violations;
  std::ostringstream dom;
  dom << "r in (" << grid.r_lo() << ", " << grid.r_hi() << "), t in (" << t[0] << ", " << t[m - 1] << "]";
  rep.domain = dom.str();
  return rep;
}

}  // namespace hmlab::parabolic
