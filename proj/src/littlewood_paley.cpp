#include "fracflow/littlewood_paley.hpp"

#include <cmath>
#include <stdexcept>

#include "fracflow/transforms.hpp"

namespace fracflow {

double dyadic_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 0.5 * (1.0 + std::cos(M_PI * (r - 1.0)));
}

LittlewoodPaleyFamily make_lp_family(const GridSpec& g) {
  LittlewoodPaleyFamily fam;
  fam.grid = g;
  const double band_radius = 0.5 * g.m * std::sqrt(double(g.dim));
  int levels = 0;
  while ((1 << levels) < band_radius) ++levels;  // chi(2^-J |k|) = 1 on band
  fam.levels = levels;
  fam.masks.assign(levels + 1, Array::Zero(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Eigen::Vector2i k = wavevector(g, i);
    const double r = std::sqrt(double(k[0]) * k[0] + double(k[1]) * k[1]);
    double prev = 0.0;  // chi(2^{-(j-1)} r), starting below block 0
    for (int j = 0; j <= levels; ++j) {
      const double cur = dyadic_cutoff(std::ldexp(r, -j));
      fam.masks[j][i] = (j == 0) ? cur : cur - prev;
      prev = cur;
    }
  }
  double defect = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j <= levels; ++j) sum += fam.masks[j][i];
    defect = std::max(defect, std::abs(1.0 - sum));
  }
  fam.partition_defect = defect;
  return fam;
}

PeriodicField lp_block(const PeriodicField& u,
                       const LittlewoodPaleyFamily& family, int j) {
  if (!(u.grid == family.grid))
    throw std::invalid_argument("field grid does not match partition grid");
  if (j < 0 || j > family.levels)
    throw std::invalid_argument("dyadic block index out of range");
  SpectralField s = to_spectral(u);
  s.coeffs *= family.masks[j].cast<Complex>();
  return to_physical(s);
}

double besov_seminorm(const PeriodicField& u, double s,
                      const LittlewoodPaleyFamily& family) {
  if (!(s > 0.0 && s <= 4.0) || s == std::floor(s))
    throw std::invalid_argument(
        "Besov exponent must lie in (0, 4] and be non-integer");
  if (family.partition_defect > 1e-12)
    throw std::invalid_argument("invalid dyadic partition");
  SpectralField spec = to_spectral(u);
  double result = 0.0;
  for (int j = 0; j <= family.levels; ++j) {
    SpectralField block{spec.grid, spec.coeffs * family.masks[j].cast<Complex>()};
    result =
        std::max(result, std::pow(2.0, s * j) * sup_norm(to_physical(block)));
  }
  return result;
}

double besov_seminorm(const PeriodicField& u, double s) {
  return besov_seminorm(u, s, make_lp_family(u.grid));
}

}  // namespace fracflow
