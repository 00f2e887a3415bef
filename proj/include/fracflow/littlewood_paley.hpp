#pragma once

#include <vector>

#include "fracflow/grid.hpp"

namespace fracflow {

/// Raised-cosine dyadic cutoff: 1 for r <= 1, 0 for r >= 2, smooth blend
/// (1 + cos(pi (r-1)))/2 in between.
double dyadic_cutoff(double r);

/// Dyadic partition of unity on the grid's frequency band:
/// phi_0 = chi(|k|), phi_j = chi(2^-j |k|) - chi(2^-j+1 |k|) for j >= 1,
/// with enough levels that sum_j phi_j == 1 on the whole band (telescoping).
struct LittlewoodPaleyFamily {
  GridSpec grid;
  int levels = 0;                // blocks j = 0..levels
  std::vector<Array> masks;      // per block, per bin
  double partition_defect = 0.;  // max |1 - sum_j phi_j(k)| over the band
};

LittlewoodPaleyFamily make_lp_family(const GridSpec& g);

/// Block j of u (spectral mask + inverse transform).
PeriodicField lp_block(const PeriodicField& u,
                       const LittlewoodPaleyFamily& family, int j);

/// Inhomogeneous Besov-type seminorm sup_j 2^{s j} ||block_j||_inf.
/// s must lie in (0, 4] and be non-integer; throws std::invalid_argument
/// otherwise, and "invalid dyadic partition" if the family defect exceeds
/// 1e-12.
double besov_seminorm(const PeriodicField& u, double s);
double besov_seminorm(const PeriodicField& u, double s,
                      const LittlewoodPaleyFamily& family);

}  // namespace fracflow
