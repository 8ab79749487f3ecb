#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "hmlab/flow/trajectory.hpp"
#include "hmlab/io/csv.hpp"

namespace hmlab::neck {

// Energy of the annulus r/2 < |x| < r (requires r/2 >= r_min of the state's grid).
double annulus_energy(const flow::CorotationalState& st, double r);

// Smallest lambda in [0, R] with sup_{lambda < r < R} E(u, U^r_{r/2}) < epsilon.
// Candidates are the grid nodes r with r/2 >= r_min and the dyadic radii R 2^{-j}; the
// suffix maximum of the annulus energy over them is monotone and is bisected, and the
// crossing inside the bracketing cell is refined on the interpolated energy.
// lambda = 0 when every resolvable annulus is below epsilon.
struct EnergyScale {
  double lambda = 0.0;
  double uncertainty = 0.0;   // one cell, r ds
  double sup_above = 0.0;     // sup of the annulus energy over candidates above lambda (1 + 2 ds)
  bool certified = false;     // sup_above < epsilon and (lambda = 0 or A(lambda) >= epsilon within a cell)
};
EnergyScale outer_energy_scale(const flow::CorotationalState& st, double epsilon, double R);

struct EnergyScaleSeries {
  std::vector<double> times, lambda, uncertainty, energy_total;
  double epsilon = 1.0;
  double R = 1.0;
  bool all_certified = true;

  io::Table table() const;  // t, lambda, lambda_uncertainty, E_total
};
EnergyScaleSeries energy_scale_series(const flow::Trajectory& traj, double epsilon, double R);

// Least squares fit of log lambda = log c + p log(T - t).
struct FitOptions {
  std::size_t exclude_last = 3;   // trailing samples dropped from the window
  std::size_t min_samples = 10;
  std::size_t extrapolation_samples = 8;  // last window samples used to extrapolate T
  double lambda_max = 0.1;        // only samples with 0 < lambda <= lambda_max (relative to R)
};

struct DecayFit {
  double lo = 0.0;  // window (t or r)
  double hi = 0.0;
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // max |log deviation|
  std::size_t samples = 0;

  bool valid() const { return samples > 0 && lo < hi && residual >= 0.0; }
};

struct BlowupFit {
  DecayFit fit;
  double T_est = 0.0;
  int iterations = 0;
  bool reliable = true;            // false when lambda is not monotone on the window
  bool type_ii_decreasing = false;  // lambda^2 / (T - t) decreasing on the window
};

// T_est given: fit with it. Otherwise T is extrapolated from lambda^{1/p} being linear in
// t on the last samples of the window, with p refitted until the pair is self-consistent.
// Throws PreconditionError with fewer than min_samples in the window.
BlowupFit fit_blowup_exponent(const EnergyScaleSeries& s, std::optional<double> T_est = std::nullopt,
                              const FitOptions& opts = {});

// Power law v ~ c r^p on the nodes of [r_lo, r_hi] where v > 0.
DecayFit fit_power_law(std::span<const double> r, std::span<const double> v, double r_lo, double r_hi);

nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const BlowupFit& f);

}  // namespace hmlab::neck
