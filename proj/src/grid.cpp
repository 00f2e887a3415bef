#include "fracflow/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracflow {

GridSpec::GridSpec(int dim_, int m_) : dim(dim_), m(m_) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("grid dimension must be 1 or 2, got " +
                                std::to_string(dim));
  if (m < 8) throw std::invalid_argument("grid size must be at least 8");
  if (m % 2 != 0)
    throw std::invalid_argument("grid size must be even, got " +
                                std::to_string(m));
}

Eigen::Index GridSpec::node_index(const Vec2& x) const {
  const double h = spacing();
  Eigen::Index flat = 0;
  for (int d = 0; d < dim; ++d) {
    const double t = x[d] / h;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-10)
      throw std::invalid_argument("off-grid evaluation unsupported");
    long j = long(r) % m;
    if (j < 0) j += m;
    flat = flat * m + j;
  }
  return flat;
}

}  // namespace fracflow
