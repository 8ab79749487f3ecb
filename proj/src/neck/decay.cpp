#include "hmlab/neck/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hmlab/core/errors.hpp"

namespace hmlab::neck {

double admissible_lambda1(const EnergyScaleSeries& s, double t1, double alpha) {
  const double R = s.R;
  double l1 = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (s.times[i] > t1 || s.times[i] <= t1 - R * R) continue;
    const double slack = std::pow(std::max(t1 - s.times[i], 0.0) / (R * R), 0.5 * (1.0 + alpha));
    l1 = std::max(l1, s.lambda[i] / R - slack);
  }
  return l1;
}

NeckWindow select_neck_window(const flow::Trajectory& traj, double epsilon, double alpha, int max_halvings) {
  if (traj.snapshots.empty()) throw PreconditionError("trajectory has no snapshots");
  const auto& last = traj.snapshots.back();
  const double t1 = last.time;
  const double t_first = traj.snapshots.front().time;
  NeckWindow best;
  best.t1 = t1;
  double R = last.grid.r_hi();
  for (int j = 0; j < max_halvings; ++j, R *= 0.5) {
    if (0.5 * R < last.grid.r_lo()) break;
    if (t1 - R * R < t_first) continue;
    auto series = energy_scale_series(traj, epsilon, R);
    const double l1 = admissible_lambda1(series, t1, alpha);
    if (l1 > 0.5 || (best.found && l1 >= best.lambda1)) continue;
    best.R = R;
    best.lambda1 = l1;
    best.found = true;
    best.series = std::move(series);
  }
  return best;
}

NeckDecayReport check_neck_decay(const flow::CorotationalState& st, const NeckSchedule& schedule,
                                 const NeckDecayOptions& opts) {
  const double R = opts.R;
  const double alpha = schedule.alpha;
  if (!(R > 0.0) || 0.5 * R > st.grid.r_hi() * (1.0 + 1e-12)) throw DomainError("R/2 must lie inside the grid");

  NeckDecayReport rep;
  rep.t1 = st.time;
  rep.lambda1 = schedule.lambda_bar;
  rep.r_lo = 2.0 * R * rep.lambda1;
  rep.r_hi = 0.5 * R;
  rep.r_cross = R * std::pow(rep.lambda1, 1.0 / (1.0 + alpha));
  rep.f_target_alpha = alpha;
  std::ostringstream note;
  if (rep.r_lo < st.grid.r_lo()) {
    rep.resolved = false;
    note << "inner end 2 R lambda_1 below the grid; clipped. ";
    rep.r_lo = st.grid.r_lo();
  }
  if (!(rep.r_lo < rep.r_hi)) {
    rep.resolved = false;
    note << "empty neck. ";
    rep.note = note.str();
    return rep;
  }

  const auto prof = flow::energy_profile(st);
  const double se = std::sqrt(opts.epsilon);
  double best = 0.0;
  for (std::size_t i = 0; i < prof.r.size(); ++i) {
    const double r = prof.r[i];
    if (r < rep.r_lo || r > rep.r_hi) continue;
    const double inner = R * rep.lambda1 / r, outer = std::pow(r / R, alpha);
    const double c = prof.rdu[i] / (se * std::cbrt(inner + outer));
    if (c > best) {
      best = c;
      rep.inner_branch_dominates = inner > outer;
    }
  }
  rep.envelope_C = best;
  rep.f_fit = fit_power_law(prof.r, prof.f, rep.r_lo, rep.r_hi);
  rep.g_fit = fit_power_law(prof.r, prof.g, rep.r_lo, rep.r_hi);
  rep.rdu_fit = fit_power_law(prof.r, prof.rdu, rep.r_lo, rep.r_hi);

  const double outer_lo = std::max(2.0 * rep.r_cross, rep.r_lo);
  if (std::log10(rep.r_hi / outer_lo) >= opts.min_outer_decades) {
    rep.g_outer_fit = fit_power_law(prof.r, prof.g, outer_lo, rep.r_hi);
    rep.outer_fitted = rep.g_outer_fit.samples > 0;
  } else {
    note << "outer neck shorter than " << opts.min_outer_decades << " decades; g exponent not fitted. ";
  }
  rep.bounds_hold = rep.resolved && rep.envelope_C <= opts.ceiling &&
                    (!rep.outer_fitted || rep.g_outer_fit.exponent >= alpha / 3.0 - opts.exponent_tol);
  rep.note = note.str();
  return rep;
}

NeckDecayReport check_neck_decay(const flow::Trajectory& traj, const NeckSchedule& schedule,
                                 const NeckDecayOptions& opts) {
  if (traj.snapshots.empty()) throw PreconditionError("trajectory has no snapshots");
  return check_neck_decay(traj.snapshots.back(), schedule, opts);
}

EvolutionReport verify_evolution_inequalities(const flow::Trajectory& traj, double r_a, double r_b, double nu,
                                              const EvolutionOptions& opts) {
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) throw PreconditionError("trajectory has no snapshots");
  const auto& grid = snaps.front().grid;
  const std::size_t n = grid.size();
  for (const auto& s : snaps)
    if (s.grid.size() != n || s.grid.r_lo() != grid.r_lo() || s.grid.ds() != grid.ds())
      throw GridError("snapshots do not share a grid");
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (grid.r(i) >= r_a && grid.r(i) <= r_b) idx.push_back(i);
  if (idx.empty()) throw GridError("annulus holds no interior node");

  EvolutionReport rep;
  rep.nu = nu;
  for (const auto& s : snaps) {
    const auto eta = flow::derivative_norms(s).eta();
    for (std::size_t i : idx) rep.eta = std::max(rep.eta, eta[i]);
  }
  if (rep.eta * rep.eta >= opts.eps0) {
    rep.skipped = true;
    rep.reason = "eta^2 >= eps0";
    return rep;
  }

  const double ds2 = grid.ds() * grid.ds();
  std::vector<flow::EnergyProfile> prof;
  for (const auto& s : snaps) prof.push_back(flow::energy_profile(s));
  auto q = [&](std::size_t k, std::size_t i) { return prof[k].g[i] / grid.r(i); };
  double top_f = 0.0, top_g = 0.0;
  const std::size_t first = snaps.size() == 1 ? 0 : 1;
  for (std::size_t k = first; k < snaps.size(); ++k) {
    const double dt = k == 0 ? 0.0 : snaps[k].time - snaps[k - 1].time;
    if (k > 0 && !(dt > 0.0)) throw PreconditionError("snapshot times must increase");
    const auto& f1 = prof[k].f1;
    for (std::size_t i : idx) {
      const double r = grid.r(i), r2 = r * r;
      const double ft = k == 0 ? 0.0 : (f1[i] - prof[k - 1].f1[i]) / dt;
      const double box_f = ft + (nu * nu * f1[i] - (f1[i + 1] - 2.0 * f1[i] + f1[i - 1]) / ds2) / r2;
      const double qt = k == 0 ? 0.0 : (q(k, i) - q(k - 1, i)) / dt;
      const double box_q = qt + (nu * nu * q(k, i) - (q(k, i + 1) - 2.0 * q(k, i) + q(k, i - 1)) / ds2) / r2;
      top_f = std::max(top_f, box_f);
      top_g = std::max(top_g, (box_q - 6.0 * f1[i] / (r2 * r)) * r);
      ++rep.samples;
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  rep.C_f = top_f <= 0.0 ? 0.0 : (rep.eta > 0.0 ? top_f / rep.eta : inf);
  rep.C_g = top_g <= 0.0 ? 0.0 : (rep.eta > 0.0 ? top_g / rep.eta : inf);
  rep.within_ceiling = rep.C_f <= opts.ceiling && rep.C_g <= opts.ceiling;
  return rep;
}

HolderReport holder_modulus(const flow::CorotationalState& st, double alpha, double R, double ceiling) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(R > 0.0)) throw DomainError("R must be positive");
  const double e = alpha / 3.0;
  const double a = st.origin_value;
  const auto prof = flow::energy_profile(st);

  HolderReport rep;
  std::vector<double> r{0.0}, h{a};
  for (std::size_t i = 0; i < prof.r.size(); ++i) {
    if (prof.r[i] > 0.5 * R * (1.0 + 1e-12)) break;
    r.push_back(prof.r[i]);
    h.push_back(st.h[i]);
    rep.C_env = std::max(rep.C_env, prof.rdu[i] / std::pow(prof.r[i] / R, e));
  }
  if (r.size() < 2) throw DomainError("no grid node below R/2");
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j)
      rep.C_holder = std::max(rep.C_holder, std::abs(h[j] - h[i]) / std::pow(r[j] - r[i], e));
  rep.C_bound = rep.C_env * (3.0 / alpha) * std::pow(R, -e);
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double w = (3.0 / alpha) * std::pow(r[i] / R, e);
    rep.r.push_back(r[i]);
    rep.increment.push_back(std::abs(h[i] - a));
    rep.bound.push_back(rep.C_env * w);
    rep.C_integral = std::max(rep.C_integral, std::abs(h[i] - a) / w);
  }
  rep.consistent = rep.C_holder <= rep.C_bound * (1.0 + 1e-9) + 1e-9 && rep.C_bound <= 4.0 * rep.C_holder + 1e-9;
  rep.envelope_verified = rep.C_env <= ceiling;
  return rep;
}

nlohmann::json to_json(const NeckDecayReport& r) {
  return {{"t1", r.t1},
          {"lambda1", r.lambda1},
          {"r_lo", r.r_lo},
          {"r_hi", r.r_hi},
          {"r_cross", r.r_cross},
          {"envelope_C", r.envelope_C},
          {"inner_branch_dominates", r.inner_branch_dominates},
          {"f_fit", to_json(r.f_fit)},
          {"g_fit", to_json(r.g_fit)},
          {"rdu_fit", to_json(r.rdu_fit)},
          {"g_outer_fit", to_json(r.g_outer_fit)},
          {"outer_fitted", r.outer_fitted},
          {"f_target_limit", r.f_target_limit},
          {"f_target_alpha", r.f_target_alpha},
          {"resolved", r.resolved},
          {"bounds_hold", r.bounds_hold},
          {"note", r.note}};
}

nlohmann::json to_json(const EvolutionReport& r) {
  return {{"C_f", r.C_f},         {"C_g", r.C_g},         {"eta", r.eta},
          {"nu", r.nu},           {"samples", r.samples}, {"skipped", r.skipped},
          {"within_ceiling", r.within_ceiling}, {"reason", r.reason}};
}

nlohmann::json to_json(const HolderReport& r) {
  return {{"C_holder", r.C_holder},     {"C_env", r.C_env},
          {"C_bound", r.C_bound},       {"C_integral", r.C_integral},
          {"consistent", r.consistent}, {"envelope_verified", r.envelope_verified}};
}

}  // namespace hmlab::neck
