#include "fracflow/resolvent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracflow {

double cutoff_symbol(double rho, double s) {
  if (rho < 0.0) throw std::invalid_argument("negative frequency magnitude");
  if (rho <= 0.5) return 1.0;
  if (rho >= 1.0) return std::pow(rho, s);
  // Quintic smoothstep in u = 1 + log2(rho) in (0, 1): C^2 across both ends.
  const double u = 1.0 + std::log2(rho);
  const double blend = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  return std::exp(s * std::log(rho) * blend);
}

SpectralField lifting_apply(const SpectralField& v, double t) {
  SpectralField out = v;
  const int m = v.grid.m;
  for (Eigen::Index b = 0; b < out.coeffs.size(); ++b) {
    int k1 = 0, k2 = 0;
    if (v.grid.dim == 1) {
      k1 = wavenumber(int(b), m);
    } else {
      k1 = wavenumber(int(b) / m, m);
      k2 = wavenumber(int(b) % m, m);
    }
    if (k1 == 0 && k2 == 0) continue;
    out.coeffs[b] *= std::pow(std::hypot(double(k1), double(k2)), t);
  }
  return out;
}

void ResolventSpec::validate() const {
  if (!(lambda.real() >= 1.0))
    throw std::invalid_argument("outside guaranteed resolvent set");
  if (!(delta >= 1.0))
    throw std::invalid_argument("operator scale must be >= 1");
}

SpectralField resolvent_apply(const SpectralField& v, const ResolventSpec& rs,
                              const SymbolTable& table) {
  rs.validate();
  if (!(v.grid == table.grid))
    throw std::invalid_argument("operator fields must share a grid");
  SpectralField out = v;
  const int m = v.grid.m;
  for (Eigen::Index b = 0; b < out.coeffs.size(); ++b) {
    int k1 = 0, k2 = 0;
    if (v.grid.dim == 1) {
      k1 = wavenumber(int(b), m);
    } else {
      k1 = wavenumber(int(b) / m, m);
      k2 = wavenumber(int(b) % m, m);
    }
    const double kn = std::hypot(double(k1), double(k2));
    const double lift = cutoff_symbol(kn, 1.0 + table.alpha);
    out.coeffs[b] *= lift / (rs.lambda - rs.delta * table.values[b]);
  }
  return out;
}

ResolventCheck resolvent_check(const ResolventSpec& rs,
                               const SymbolTable& table) {
  rs.validate();
  ResolventCheck check;
  check.min_ratio = std::numeric_limits<double>::infinity();
  for (Eigen::Index b = 0; b < table.values.size(); ++b) {
    const double ma = table.values[b];
    const double dist = std::abs(rs.lambda - rs.delta * ma);
    const double scale = std::max(std::abs(rs.lambda), std::abs(ma));
    check.min_ratio = std::min(check.min_ratio, dist / scale);
    check.sup_inverse = std::max(check.sup_inverse, 1.0 / dist);
  }
  return check;
}

}  // namespace fracflow
