#include "hmlab/kernels/heat_kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "hmlab/core/errors.hpp"

namespace hmlab::kernels {

namespace {

constexpr std::size_t kJacobiNodes = 256;
constexpr std::size_t kLaguerreNodes = 128;
constexpr double kLaguerreSwitch = 50.0;

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 * (first
// eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const auto n = static_cast<std::size_t>(diag.size());
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    rule.nodes[j] = es.eigenvalues()(jj);
    const double v0 = es.eigenvectors()(0, jj);
    rule.weights[j] = mu0 * v0 * v0;
  }
  return rule;
}

// Weight (1 - y^2)^c on [-1, 1].
QuadratureRule symmetric_jacobi(double c, std::size_t n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double b2 = (k == 1) ? 1.0 / (3.0 + 2.0 * c)
                               : kk * (kk + 2.0 * c) / ((2.0 * kk + 2.0 * c) * (2.0 * kk + 2.0 * c) - 1.0);
    sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(b2);
  }
  const double mu0 = std::exp((2.0 * c + 1.0) * std::numbers::ln2 + 2.0 * std::lgamma(c + 1.0) -
                              std::lgamma(2.0 * c + 2.0));
  return golub_welsch(diag, sub, mu0);
}

// Weight w^c e^{-w} on [0, inf).
QuadratureRule generalized_laguerre(double c, std::size_t n) {
  Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    diag(static_cast<Eigen::Index>(k)) = 2.0 * kk + c + 1.0;
    if (k > 0) sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(kk * (kk + c));
  }
  return golub_welsch(diag, sub, std::tgamma(c + 1.0));
}

struct IntegralRules {
  QuadratureRule jacobi;
  QuadratureRule laguerre;
};

std::shared_ptr<const IntegralRules> rules_for(double mu) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const IntegralRules>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(mu);
  if (it != cache.end()) return it->second;
  const double c = 0.5 * (mu - 3.0);
  auto rules = std::make_shared<IntegralRules>(
      IntegralRules{symmetric_jacobi(c, kJacobiNodes), generalized_laguerre(c, kLaguerreNodes)});
  cache.emplace(mu, rules);
  return rules;
}

}  // namespace

KernelParams KernelParams::make(double mu, double rho, double R) {
  if (!(mu > 1.0)) throw DomainError("kernel dimension mu must exceed 1");
  if (!(rho >= 0.0) || !(R > rho)) throw DomainError("kernel annulus needs 0 <= rho < R");
  return {mu, rho, R, normalization_constant(mu)};
}

double normalization_constant(double mu) {
  if (!(mu > 1.0)) throw DomainError("kernel dimension mu must exceed 1");
  return std::exp((1.0 - mu) * std::numbers::ln2 - 0.5 * std::log(std::numbers::pi) -
                  std::lgamma(0.5 * (mu - 1.0)));
}

double eval_I_scaled(double x, double mu) {
  if (!(mu > 1.0)) throw DomainError("I(x) diverges for mu <= 1");
  if (!(x >= 0.0)) throw DomainError("I(x) requires x >= 0");
  const auto rules = rules_for(mu);
  const double c = 0.5 * (mu - 3.0);
  if (x <= kLaguerreSwitch) {
    const auto& q = rules->jacobi;
    double sum = 0.0;
    for (std::size_t j = 0; j < q.nodes.size(); ++j) sum += q.weights[j] * std::exp(-x * (1.0 + q.nodes[j]));
    return sum;
  }
  const auto& q = rules->laguerre;
  double sum = 0.0;
  for (std::size_t j = 0; j < q.nodes.size(); ++j) {
    const double w = q.nodes[j];
    if (w >= 2.0 * x) continue;
    sum += q.weights[j] * std::pow(2.0 - w / x, c);
  }
  return sum * std::pow(x, -(c + 1.0));
}

double eval_H(double r, double s, double t, const KernelParams& params) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
  if (!(r >= 0.0) || !(s >= 0.0)) throw DomainError("heat kernel requires r, s >= 0");
  const double d = r - s;
  return params.c_mu * std::pow(t, -0.5 * params.mu) * std::exp(-d * d / (4.0 * t)) *
         eval_I_scaled(r * s / (2.0 * t), params.mu);
}

SandwichRatio check_H_sandwich(double r, double s, double t, const KernelParams& params) {
  if (!(r > 0.0) || !(s > 0.0) || !(t > 0.0)) throw DomainError("sandwich check needs r, s, t > 0");
  const double x = r * s / (2.0 * t);
  const double ratio = params.c_mu * eval_I_scaled(x, params.mu) * std::pow(1.0 + 2.0 * x, 0.5 * (params.mu - 1.0));
  return {ratio, x};
}

SandwichSweep sandwich_sweep(const KernelParams& params, double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("sandwich sweep needs n >= 2 and 0 < lo < hi");
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  SandwichSweep out{std::numeric_limits<double>::infinity(), 0.0, 0};
  for (double r : pts) {
    for (double s : pts) {
      for (double t : pts) {
        const double q = check_H_sandwich(r, s, t, params).ratio;
        out.min_ratio = std::min(out.min_ratio, q);
        out.max_ratio = std::max(out.max_ratio, q);
        ++out.samples;
      }
    }
  }
  return out;
}

double weight_w(WeightExponent a, double r, double t) {
  if (!(t >= 0.0) || !(r >= 0.0)) throw DomainError("weight needs r >= 0, t >= 0");
  if (r == 0.0 && t == 0.0) throw DomainError("weight undefined at r = t = 0");
  const double r2 = r * r;
  return std::pow(r2 / (r2 + t), 0.5 * a.a);
}

}  // namespace hmlab::kernels
