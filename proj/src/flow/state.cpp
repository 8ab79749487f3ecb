#include "hmlab/flow/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hmlab/core/errors.hpp"
#include "hmlab/core/stencil.hpp"

namespace hmlab::flow {

namespace {

constexpr double kPi = std::numbers::pi;

// Linear interpolation of nodal values at s = ln r.
double interp_s(const RadialGrid& g, std::span<const double> v, double r) {
  const double x = (std::log(r) - g.s(0)) / g.ds();
  const auto last = g.size() - 1;
  if (x <= 0.0) return v[0];
  if (x >= static_cast<double>(last)) return v[last];
  const auto j = static_cast<std::size_t>(x);
  const double th = x - static_cast<double>(j);
  return (1.0 - th) * v[j] + th * v[j + 1];
}

void require_in_range(const RadialGrid& g, double r, const char* what) {
  const double slack = 1e-12 * g.r_hi();
  if (!(r >= g.r_lo() * (1.0 - 1e-12) && r <= g.r_hi() + slack)) {
    std::ostringstream os;
    os << what << ": r=" << r << " outside [" << g.r_lo() << ", " << g.r_hi() << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

CorotationalState CorotationalState::from_profile(const RadialGrid& grid, const std::function<double(double)>& profile,
                                                  int k, double time) {
  CorotationalState st;
  st.grid = grid;
  st.k = k;
  st.time = time;
  st.h.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) st.h[i] = profile(grid.r(i));
  st.boundary_value = st.h.back();
  st.origin_value = kPi * std::round(st.h.front() / kPi);
  st.validate();
  return st;
}

void CorotationalState::validate() const {
  if (k < 1) throw PreconditionError("equivariance degree must be >= 1");
  if (h.size() != grid.size() || grid.size() < 5) throw PreconditionError("state needs >= 5 nodes matching its grid");
  for (double x : h)
    if (!std::isfinite(x) || std::abs(x) > 4.0 * kPi) throw PreconditionError("h must be finite with |h| <= 4 pi");
}

double bubble(double r, double sigma, int k) { return 2.0 * std::atan(std::pow(r / sigma, k)); }

std::vector<double> h_s(const CorotationalState& st) { return d_ds(st.h, st.grid.ds(), StencilOrder::fourth); }

std::vector<double> tension(const CorotationalState& st) {
  const auto hss = d2_ds2(st.h, st.grid.ds(), StencilOrder::fourth);
  const double k2 = static_cast<double>(st.k * st.k);
  std::vector<double> t(st.h.size(), 0.0);
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double r = st.grid.r(i);
    t[i] = (hss[i] - k2 * std::sin(st.h[i]) * std::cos(st.h[i])) / (r * r);
  }
  return t;
}

double discrete_energy(const CorotationalState& st) {
  const double ds = st.grid.ds();
  const double k2 = static_cast<double>(st.k * st.k);
  const std::size_t n = st.h.size();
  double grad = 0.0, pot = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = st.h[i + 1] - st.h[i];
    grad += d * d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(st.h[i]);
    pot += (i == 0 || i + 1 == n ? 0.5 : 1.0) * s * s;
  }
  // Disc below r_min for the regular profile h - a ~ r^k (linearized): k (h_0 - a)^2.
  const double inner = st.k * (st.h[0] - st.origin_value) * (st.h[0] - st.origin_value);
  return 2.0 * kPi * (grad / ds + ds * k2 * pot + inner);
}

std::vector<double> discrete_tension(const CorotationalState& st) {
  const double ds = st.grid.ds();
  const double k2 = static_cast<double>(st.k * st.k);
  const double c = std::exp(-st.k * ds);
  const auto& h = st.h;
  const std::size_t n = h.size();
  std::vector<double> t(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double g = 0.0;
    if (i == 1) {
      g = (2.0 / ds) * ((1.0 - c) * (h[1] - h[0]) - (h[2] - h[1])) + ds * k2 * std::sin(2.0 * h[1]) +
          0.5 * ds * k2 * c * std::sin(2.0 * h[0]) + 2.0 * st.k * c * (h[0] - st.origin_value);
    } else {
      g = (2.0 / ds) * (2.0 * h[i] - h[i - 1] - h[i + 1]) + ds * k2 * std::sin(2.0 * h[i]);
    }
    const double r = st.grid.r(i);
    t[i] = -g / (2.0 * ds * r * r);
  }
  return t;
}

double tension_l2(const CorotationalState& st) {
  const auto t = discrete_tension(st);
  const double ds = st.grid.ds();
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double r = st.grid.r(i);
    sum += r * r * t[i] * t[i];
  }
  return 2.0 * kPi * ds * sum;
}

double energy(const CorotationalState& st, double r_lo, double r_hi) {
  require_in_range(st.grid, r_lo, "energy");
  require_in_range(st.grid, r_hi, "energy");
  if (!(r_lo < r_hi)) throw DomainError("energy needs r_lo < r_hi");
  const auto hs = h_s(st);
  const double k2 = static_cast<double>(st.k * st.k);
  const std::size_t n = st.h.size();
  const double ds = st.grid.ds();
  std::vector<double> e(n), cum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(st.h[i]);
    e[i] = hs[i] * hs[i] + k2 * s * s;
  }
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * ds * (e[i - 1] + e[i]);
  // Integral of the piecewise linear interpolant from s_0 to ln r.
  auto F = [&](double r) {
    double x = (std::log(r) - st.grid.s(0)) / ds;
    x = std::clamp(x, 0.0, static_cast<double>(n - 1));
    auto j = static_cast<std::size_t>(x);
    if (j >= n - 1) j = n - 2;
    const double th = x - static_cast<double>(j);
    return cum[j] + ds * (e[j] * th + 0.5 * (e[j + 1] - e[j]) * th * th);
  };
  return 2.0 * kPi * (F(r_hi) - F(r_lo));
}

PolarEnergies polar_energies(const CorotationalState& st, double r) {
  require_in_range(st.grid, r, "polar_energies");
  const auto hs = h_s(st);
  const double h = interp_s(st.grid, st.h, r);
  const double d = interp_s(st.grid, hs, r);
  const double k = st.k;
  const double s = std::sin(h), c = std::cos(h);
  PolarEnergies p;
  p.f0 = std::sqrt(2.0 * kPi) * k * std::abs(s);
  p.f1 = std::sqrt(2.0 * kPi) * k * k * std::abs(s * c);
  p.f = std::sqrt(p.f0 * p.f0 + p.f1 * p.f1);
  p.g = std::sqrt(2.0 * kPi) * std::abs(d);
  p.rdu = std::sqrt(d * d + k * k * s * s);
  return p;
}

EnergyProfile energy_profile(const CorotationalState& st) {
  const auto hs = h_s(st);
  const double k = st.k;
  const double root = std::sqrt(2.0 * kPi);
  EnergyProfile p;
  const std::size_t n = st.h.size();
  for (auto* v : {&p.r, &p.f, &p.f0, &p.f1, &p.g, &p.rdu}) v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(st.h[i]), c = std::cos(st.h[i]);
    p.r[i] = st.grid.r(i);
    p.f0[i] = root * k * std::abs(s);
    p.f1[i] = root * k * k * std::abs(s * c);
    p.f[i] = std::sqrt(p.f0[i] * p.f0[i] + p.f1[i] * p.f1[i]);
    p.g[i] = root * std::abs(hs[i]);
    p.rdu[i] = std::sqrt(hs[i] * hs[i] + k * k * s * s);
  }
  return p;
}

std::vector<double> DerivativeNorms::eta() const {
  std::vector<double> e(d1.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = d1[i] + d2[i] + d3[i];
  return e;
}

DerivativeNorms derivative_norms(const CorotationalState& st) {
  const double ds = st.grid.ds();
  const auto h1 = d_ds(st.h, ds, StencilOrder::fourth);
  const auto h2 = d2_ds2(st.h, ds, StencilOrder::fourth);
  const auto h3 = d_ds(h2, ds, StencilOrder::fourth);
  const double k2 = static_cast<double>(st.k * st.k);
  const std::size_t n = st.h.size();
  DerivativeNorms out;
  out.d1.resize(n);
  out.d2.resize(n);
  out.d3.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double S = std::sin(st.h[i]), C = std::cos(st.h[i]);
    const double a = h1[i], b = h2[i], c = h3[i];
    // s-derivatives of sin h and cos h; theta-derivatives act as multiplication by ik on
    // the (x + iy) = sin h e^{ik theta} component and annihilate the z = cos h component.
    const double S1 = C * a, S2 = -S * a * a + C * b, S3 = -C * a * a * a - 3.0 * S * a * b + C * c;
    const double C1 = -S * a, C2 = -C * a * a - S * b, C3 = S * a * a * a - 3.0 * C * a * b - S * c;
    const double n1 = k2 * S * S + S1 * S1 + C1 * C1;
    const double n2 = k2 * k2 * S * S + 2.0 * k2 * S1 * S1 + S2 * S2 + C2 * C2;
    const double n3 = k2 * k2 * k2 * S * S + 3.0 * k2 * k2 * S1 * S1 + 3.0 * k2 * S2 * S2 + S3 * S3 + C3 * C3;
    out.d1[i] = std::sqrt(n1);
    out.d2[i] = std::sqrt(n2);
    out.d3[i] = std::sqrt(n3);
  }
  return out;
}

StressSample stress_terms(const CorotationalState& st, double r) {
  require_in_range(st.grid, r, "stress_terms");
  const auto hs = h_s(st);
  const auto tau = tension(st);
  const std::size_t j = st.grid.nearest(r);
  const double ds = st.grid.ds();
  const double k2 = static_cast<double>(st.k * st.k);
  double acc = 0.0;
  auto integrand = [&](std::size_t i) {
    const double ri = st.grid.r(i);
    return tau[i] * hs[i] * ri * ri;
  };
  for (std::size_t i = 0; i < j; ++i) acc += 0.5 * ds * (integrand(i) + integrand(i + 1));
  StressSample out;
  out.r = st.grid.r(j);
  const double s = std::sin(st.h[j]);
  out.lhs = kPi * (hs[j] * hs[j] - k2 * s * s);
  out.rhs = 2.0 * kPi * acc;
  return out;
}

std::vector<double> stress_divergence_residual(const CorotationalState& st) {
  const auto hs = h_s(st);
  const auto tau = tension(st);
  const double k2 = static_cast<double>(st.k * st.k);
  const std::size_t n = st.h.size();
  std::vector<double> lhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(st.h[i]);
    lhs[i] = kPi * (hs[i] * hs[i] - k2 * s * s);
  }
  const auto dl = d_ds(lhs, st.grid.ds(), StencilOrder::fourth);
  std::vector<double> res(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double r = st.grid.r(i);
    res[i] = dl[i] - 2.0 * kPi * tau[i] * hs[i] * r * r;
  }
  return res;
}

double lambda_proxy(const CorotationalState& st) {
  const double level = 0.5 * kPi;
  for (std::size_t i = 0; i < st.h.size(); ++i) {
    const double v = std::abs(st.h[i] - st.origin_value);
    if (v >= level) {
      if (i == 0) return st.grid.r(0);
      const double u = std::abs(st.h[i - 1] - st.origin_value);
      const double th = (level - u) / (v - u);
      return std::exp(st.grid.s(i - 1) + th * st.grid.ds());
    }
  }
  return st.grid.r_hi();
}

double max_gradient(const CorotationalState& st) {
  const auto p = energy_profile(st);
  double m = 0.0;
  for (std::size_t i = 0; i < p.r.size(); ++i) m = std::max(m, p.rdu[i] / p.r[i]);
  return m;
}

}  // namespace hmlab::flow
