#include "hmlab/flow/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "hmlab/core/errors.hpp"
#include "hmlab/core/numerics.hpp"

namespace hmlab::flow {

namespace {

constexpr double kPi = std::numbers::pi;

// Node 0 slaved to node 1 (h - a ~ r^k), outer node pinned.
void project(CorotationalState& st) {
  const double c = std::exp(-st.k * st.grid.ds());
  st.h[0] = st.origin_value + c * (st.h[1] - st.origin_value);
  st.h.back() = st.boundary_value;
}

struct System {
  std::vector<double> lower, diag, upper, rhs;
};

// Gradient of E_d / (2 pi) on unknowns 1..n-2 (index shifted by one) and its Hessian.
// With curvature = false only the quadratic (Dirichlet) part of the Hessian is kept.
void gradient_hessian(const CorotationalState& st, bool curvature, std::vector<double>& g, System& H) {
  const auto& h = st.h;
  const std::size_t n = h.size();
  const std::size_t m = n - 2;
  const double ds = st.grid.ds();
  const double k2 = static_cast<double>(st.k * st.k);
  const double c = std::exp(-st.k * ds);
  g.assign(m, 0.0);
  H.lower.assign(m, -2.0 / ds);
  H.upper.assign(m, -2.0 / ds);
  H.diag.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = j + 1;
    const double pot = ds * k2 * std::sin(2.0 * h[i]);
    const double pot2 = curvature ? 2.0 * ds * k2 * std::cos(2.0 * h[i]) : 0.0;
    if (i == 1) {
      g[j] = (2.0 / ds) * ((1.0 - c) * (h[1] - h[0]) - (h[2] - h[1])) + pot + 0.5 * ds * k2 * c * std::sin(2.0 * h[0]) +
             2.0 * st.k * c * (h[0] - st.origin_value);
      H.diag[j] = (2.0 / ds) * ((1.0 - c) * (1.0 - c) + 1.0) + 2.0 * st.k * c * c + pot2 +
                  (curvature ? ds * k2 * c * c * std::cos(2.0 * h[0]) : 0.0);
    } else {
      g[j] = (2.0 / ds) * (2.0 * h[i] - h[i - 1] - h[i + 1]) + pot;
      H.diag[j] = 4.0 / ds + pot2;
    }
  }
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct Attempt {
  CorotationalState state;
  int iterations = 0;
};

// Backward Euler (implicit) or one linearly implicit step (semi-implicit).
std::optional<Attempt> implicit_attempt(const CorotationalState& x, double dt, bool full_newton) {
  const std::size_t m = x.h.size() - 2;
  const double ds = x.grid.ds();
  std::vector<double> M(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double r = x.grid.r(j + 1);
    M[j] = 2.0 * ds * r * r / dt;  // 4 pi ds r^2 / (2 pi dt)
  }
  Attempt a{x, 0};
  std::vector<double> g;
  System H;
  const int max_iter = full_newton ? 40 : 1;
  for (int it = 0; it < max_iter; ++it) {
    gradient_hessian(a.state, full_newton, g, H);
    std::vector<double> rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
      rhs[j] = -(M[j] * (a.state.h[j + 1] - x.h[j + 1]) + g[j]);
      H.diag[j] += M[j];
    }
    // Node 1 couples to node 0 only through the slaved value, already in its diagonal.
    auto delta = solve_tridiagonal(H.lower, H.diag, H.upper, rhs);
    if (!all_finite(delta)) return std::nullopt;
    double dmax = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      a.state.h[j + 1] += delta[j];
      dmax = std::max(dmax, std::abs(delta[j]));
    }
    project(a.state);
    a.iterations = it + 1;
    if (!all_finite(a.state.h)) return std::nullopt;
    if (!full_newton) return a;
    if (dmax < 1e-12) return a;
    if (dmax > 1e3) return std::nullopt;
  }
  return std::nullopt;
}

Attempt explicit_attempt(const CorotationalState& x, double dt) {
  Attempt a{x, 0};
  const auto tau = discrete_tension(x);
  for (std::size_t i = 1; i + 1 < x.h.size(); ++i) a.state.h[i] += dt * tau[i];
  project(a.state);
  return a;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::implicit: return "implicit";
    case Scheme::semi_implicit: return "semi-implicit";
    case Scheme::explicit_euler: return "explicit";
  }
  return "implicit";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "implicit") return Scheme::implicit;
  if (s == "semi-implicit") return Scheme::semi_implicit;
  if (s == "explicit") return Scheme::explicit_euler;
  throw ConfigError("flow.scheme", "expected one of implicit, semi-implicit, explicit; got '" + s + "'");
}

void FlowStepConfig::validate() const {
  if (!(dt_initial > 0.0)) throw ConfigError("flow.dt_initial", "must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) throw ConfigError("flow.cfl_safety", "must lie in (0, 1)");
  if (!(regrid_threshold >= 0.0)) throw ConfigError("flow.regrid_threshold", "must be non-negative");
  if (!(max_dh > 0.0)) throw ConfigError("flow.max_dh", "must be positive");
  if (!(growth >= 1.0)) throw ConfigError("flow.growth", "must be >= 1");
  if (!(dt_max >= dt_initial)) throw ConfigError("flow.dt_max", "must be >= dt_initial");
  if (!(dt_min > 0.0 && dt_min <= dt_initial)) throw ConfigError("flow.dt_min", "must lie in (0, dt_initial]");
}

double stable_dt(const CorotationalState& st, const FlowStepConfig& cfg) {
  const double r1 = st.grid.r(1);
  const double ds = st.grid.ds();
  const double k2 = static_cast<double>(st.k * st.k);
  switch (cfg.scheme) {
    case Scheme::implicit: return std::numeric_limits<double>::infinity();
    case Scheme::semi_implicit: return cfg.cfl_safety * 2.0 * r1 * r1 / k2;
    case Scheme::explicit_euler: return cfg.cfl_safety * 2.0 * r1 * r1 / (4.0 / (ds * ds) + k2);
  }
  return 0.0;
}

StepResult advance(const CorotationalState& st_in, const FlowStepConfig& cfg, double dt) {
  CorotationalState x = st_in;
  project(x);
  StepResult res;
  res.energy_before = discrete_energy(x);
  dt = std::min(dt, stable_dt(x, cfg));
  for (;;) {
    if (dt < cfg.dt_min) throw BlowupResolutionError("time step fell below dt_min at t=" + std::to_string(x.time));
    std::optional<Attempt> a;
    if (cfg.scheme == Scheme::explicit_euler) {
      a = explicit_attempt(x, dt);
    } else {
      a = implicit_attempt(x, dt, cfg.scheme == Scheme::implicit);
    }
    if (cfg.scheme != Scheme::implicit && (!a || !all_finite(a->state.h))) {
      throw BlowupResolutionError("non-finite values in " + to_string(cfg.scheme) + " step");
    }
    bool ok = a.has_value();
    double change = 0.0;
    double e1 = 0.0;
    if (ok) {
      for (std::size_t i = 0; i < x.h.size(); ++i) change = std::max(change, std::abs(a->state.h[i] - x.h[i]));
      e1 = discrete_energy(a->state);
      if (e1 > res.energy_before + 1e-8 * std::max(1.0, std::abs(res.energy_before))) ok = false;
      if (cfg.adaptive && change > cfg.max_dh) ok = false;
    }
    if (!ok) {
      dt *= 0.5;
      ++res.rejections;
      continue;
    }
    res.state = std::move(a->state);
    res.state.time = x.time + dt;
    res.dt = dt;
    res.energy_after = e1;
    res.iterations = a->iterations;
    res.tension_l2 = tension_l2(res.state);
    if (cfg.adaptive) {
      const double factor = change > 0.0 ? 0.8 * cfg.max_dh / change : cfg.growth;
      res.dt_next = std::min({dt * std::min(cfg.growth, factor), cfg.dt_max});
    } else {
      res.dt_next = cfg.dt_initial;
    }
    return res;
  }
}

CorotationalState step(const CorotationalState& st, const FlowStepConfig& cfg) {
  return advance(st, cfg, cfg.dt_initial).state;
}

}  // namespace hmlab::flow
