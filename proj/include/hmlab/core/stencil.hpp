#pragma once

#include <span>
#include <vector>

namespace hmlab {

// Finite differences in the log coordinate s on a uniform mesh of spacing ds.
// Central stencils in the interior, one-sided stencils of the same order at the ends,
// so every node (including the two boundary nodes) gets a value.
enum class StencilOrder { second = 2, fourth = 4 };

std::vector<double> d_ds(std::span<const double> f, double ds, StencilOrder order);
std::vector<double> d2_ds2(std::span<const double> f, double ds, StencilOrder order);

}  // namespace hmlab
