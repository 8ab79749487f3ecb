#include "hmlab/neck/energy_scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hmlab/core/errors.hpp"
#include "hmlab/core/numerics.hpp"

namespace hmlab::neck {

double annulus_energy(const flow::CorotationalState& st, double r) {
  const double lo = std::max(0.5 * r, st.grid.r_lo());
  if (0.5 * r < st.grid.r_lo() * (1.0 - 1e-12)) throw DomainError("annulus reaches below the grid");
  return flow::energy(st, lo, std::min(r, st.grid.r_hi()));
}

EnergyScale outer_energy_scale(const flow::CorotationalState& st, double epsilon, double R) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const auto& grid = st.grid;
  if (!(R <= grid.r_hi() * (1.0 + 1e-12)) || !(0.5 * R >= grid.r_lo() * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "R=" << R << " needs [R/2, R] inside [" << grid.r_lo() << ", " << grid.r_hi() << "]";
    throw DomainError(os.str());
  }
  R = std::min(R, grid.r_hi());
  const double r_floor = 2.0 * grid.r_lo();

  std::vector<double> cand;
  for (double r : grid.nodes())
    if (r >= r_floor && r <= R) cand.push_back(r);
  for (double r = R; r >= r_floor; r *= 0.5) cand.push_back(r);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  const std::size_t n = cand.size();
  std::vector<double> A(n), S(n);
  for (std::size_t i = 0; i < n; ++i) A[i] = annulus_energy(st, cand[i]);
  S[n - 1] = A[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) S[i] = std::max(A[i], S[i + 1]);

  const double ds = grid.ds();
  EnergyScale out;
  // First candidate with S < epsilon; S is non-increasing.
  const auto first_below =
      static_cast<std::size_t>(std::partition_point(S.begin(), S.end(), [&](double v) { return v >= epsilon; }) -
                               S.begin());
  if (first_below == 0) {
    out.lambda = 0.0;
    out.sup_above = S[0];
    out.certified = true;
    return out;
  }
  if (first_below == n) {
    out.lambda = R;
    out.uncertainty = 0.0;
    out.sup_above = 0.0;
    out.certified = true;
    return out;
  }
  // A(lo) >= epsilon > A(hi); refine the crossing on the interpolated energy.
  double lo = cand[first_below - 1], hi = cand[first_below];
  for (int it = 0; it < 80 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    (annulus_energy(st, mid) >= epsilon ? lo : hi) = mid;
  }
  out.lambda = lo;
  out.uncertainty = lo * std::expm1(ds);
  const double above = out.lambda * (1.0 + 2.0 * ds);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (cand[i] >= above) sup = std::max(sup, A[i]);
  out.sup_above = sup;
  out.certified = sup < epsilon && annulus_energy(st, out.lambda) >= epsilon;
  return out;
}

io::Table EnergyScaleSeries::table() const {
  io::Table t;
  t.header = {"t", "lambda", "lambda_uncertainty", "E_total"};
  t.columns = {times, lambda, uncertainty, energy_total};
  return t;
}

EnergyScaleSeries energy_scale_series(const flow::Trajectory& traj, double epsilon, double R) {
  EnergyScaleSeries s;
  s.epsilon = epsilon;
  s.R = R;
  for (const auto& st : traj.snapshots) {
    const auto e = outer_energy_scale(st, epsilon, R);
    s.times.push_back(st.time);
    s.lambda.push_back(e.lambda);
    s.uncertainty.push_back(e.uncertainty);
    s.energy_total.push_back(flow::energy(st, st.grid.r_lo(), st.grid.r_hi()));
    s.all_certified = s.all_certified && e.certified;
  }
  return s;
}

namespace {

DecayFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  DecayFit f;
  if (x.size() < 3) return f;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const auto line = fit_line(lx, ly);
  f.exponent = line.slope;
  f.amplitude = std::exp(line.intercept);
  for (std::size_t i = 0; i < x.size(); ++i)
    f.residual = std::max(f.residual, std::abs(ly[i] - line.intercept - line.slope * lx[i]));
  f.lo = *std::min_element(x.begin(), x.end());
  f.hi = *std::max_element(x.begin(), x.end());
  f.samples = x.size();
  return f;
}

}  // namespace

DecayFit fit_power_law(std::span<const double> r, std::span<const double> v, double r_lo, double r_hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < r.size() && i < v.size(); ++i) {
    if (r[i] >= r_lo && r[i] <= r_hi && v[i] > 0.0 && std::isfinite(v[i])) {
      x.push_back(r[i]);
      y.push_back(v[i]);
    }
  }
  auto f = log_log_fit(x, y);
  if (f.samples) {
    f.lo = r_lo;
    f.hi = r_hi;
  }
  return f;
}

BlowupFit fit_blowup_exponent(const EnergyScaleSeries& s, std::optional<double> T_est, const FitOptions& opts) {
  const std::size_t n = s.times.size();
  const std::size_t usable = n > opts.exclude_last ? n - opts.exclude_last : 0;
  std::vector<double> t, lam;
  for (std::size_t i = 0; i < usable; ++i) {
    if (s.lambda[i] > 0.0 && s.lambda[i] <= opts.lambda_max * s.R) {
      t.push_back(s.times[i]);
      lam.push_back(s.lambda[i]);
    }
  }
  if (t.size() < opts.min_samples) {
    std::ostringstream os;
    os << "blowup fit needs " << opts.min_samples << " samples, window has " << t.size();
    throw PreconditionError(os.str());
  }

  auto fit_with = [&](double T) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < T) {
        x.push_back(T - t[i]);
        y.push_back(lam[i]);
      }
    }
    return log_log_fit(x, y);
  };

  BlowupFit out;
  if (T_est) {
    if (!(*T_est > t.back())) throw PreconditionError("T_est must exceed the last fitted time");
    out.T_est = *T_est;
    out.fit = fit_with(*T_est);
  } else {
    const std::size_t m = std::min(opts.extrapolation_samples, t.size());
    double p = 1.0, T = 0.0;
    for (int it = 0; it < 500; ++it) {
      std::vector<double> tt(t.end() - static_cast<std::ptrdiff_t>(m), t.end()), v(m);
      for (std::size_t i = 0; i < m; ++i) v[i] = std::pow(lam[t.size() - m + i], 1.0 / p);
      const auto line = fit_line(tt, v);
      if (!(line.slope < 0.0)) throw PreconditionError("lambda is not decreasing at the end of the window");
      // An extrapolation behind the last sample means p is far off; step one sample gap past it.
      const double floor = t.back() + (t.back() - t[t.size() - 2]);
      const double T_extra = -line.intercept / line.slope;
      const double T_new = std::max(T_extra, floor);
      const auto f = fit_with(T_new);
      const bool done = it > 0 && T_extra >= floor && std::abs(T_new - T) <= 1e-14 * std::abs(T_new) &&
                        std::abs(f.exponent - p) < 1e-12;
      T = T_new;
      p = f.exponent;
      out.fit = f;
      out.iterations = it + 1;
      if (done) break;
    }
    out.T_est = T;
  }
  for (std::size_t i = 1; i < lam.size(); ++i)
    if (lam[i] > lam[i - 1] * (1.0 + 1e-12)) out.reliable = false;
  const double T = out.T_est;
  const double first = lam.front() * lam.front() / (T - t.front());
  const double last = lam.back() * lam.back() / (T - t.back());
  out.type_ii_decreasing = out.fit.exponent > 0.5 && last < first;
  return out;
}

nlohmann::json to_json(const DecayFit& f) {
  return {{"lo", f.lo},           {"hi", f.hi},         {"exponent", f.exponent},
          {"amplitude", f.amplitude}, {"residual", f.residual}, {"samples", f.samples}};
}

nlohmann::json to_json(const BlowupFit& f) {
  return {{"fit", to_json(f.fit)},
          {"T_est", f.T_est},
          {"iterations", f.iterations},
          {"reliable", f.reliable},
          {"type_ii_decreasing", f.type_ii_decreasing}};
}

}  // namespace hmlab::neck
