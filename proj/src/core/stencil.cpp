#include "hmlab/core/stencil.hpp"

#include "hmlab/core/errors.hpp"

namespace hmlab {

namespace {

std::vector<double> first_second_order(std::span<const double> f, double ds) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * ds);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * ds);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * ds);
  return d;
}

std::vector<double> first_fourth_order(std::span<const double> f, double ds) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double c = 1.0 / (12.0 * ds);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = c * (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]);
  }
  d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
  d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  const std::size_t m = n - 1;
  d[m] = -c * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
  d[m - 1] = -c * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
  return d;
}

std::vector<double> second_second_order(std::span<const double> f, double ds) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double c = 1.0 / (ds * ds);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = c * (f[i + 1] - 2.0 * f[i] + f[i - 1]);
  d[0] = c * (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]);
  d[n - 1] = c * (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]);
  return d;
}

std::vector<double> second_fourth_order(std::span<const double> f, double ds) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  const double c = 1.0 / (12.0 * ds * ds);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = c * (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]);
  }
  auto edge0 = [&](std::size_t a, int dir) {
    auto F = [&](int k) { return f[static_cast<std::size_t>(static_cast<int>(a) + dir * k)]; };
    return c * (45.0 * F(0) - 154.0 * F(1) + 214.0 * F(2) - 156.0 * F(3) + 61.0 * F(4) - 10.0 * F(5));
  };
  auto edge1 = [&](std::size_t a, int dir) {
    auto F = [&](int k) { return f[static_cast<std::size_t>(static_cast<int>(a) + dir * k)]; };
    return c * (10.0 * F(-1) - 15.0 * F(0) - 4.0 * F(1) + 14.0 * F(2) - 6.0 * F(3) + F(4));
  };
  d[0] = edge0(0, 1);
  d[1] = edge1(1, 1);
  d[n - 1] = edge0(n - 1, -1);
  d[n - 2] = edge1(n - 2, -1);
  return d;
}

}  // namespace

std::vector<double> d_ds(std::span<const double> f, double ds, StencilOrder order) {
  if (order == StencilOrder::second) {
    if (f.size() < 3) throw GridError("first derivative needs >= 3 nodes");
    return first_second_order(f, ds);
  }
  if (f.size() < 5) throw GridError("fourth-order first derivative needs >= 5 nodes");
  return first_fourth_order(f, ds);
}

std::vector<double> d2_ds2(std::span<const double> f, double ds, StencilOrder order) {
  if (order == StencilOrder::second) {
    if (f.size() < 4) throw GridError("second derivative needs >= 4 nodes");
    return second_second_order(f, ds);
  }
  if (f.size() < 6) throw GridError("fourth-order second derivative needs >= 6 nodes");
  return second_fourth_order(f, ds);
}

}  // namespace hmlab
