#pragma once

#include <cstdint>
#include <vector>

#include "fracflow/grid.hpp"

namespace fracflow {

/// Forward transform: samples -> band coefficients (normalized so that
/// u(x) = sum_k u_hat(k) e^{i k.x} interpolates the samples).
SpectralField to_spectral(const PeriodicField& u);

/// Inverse transform. Throws std::invalid_argument("complex-valued
/// reconstruction") if the coefficients are not Hermitian-symmetric within
/// 1e-10 relative to the largest coefficient.
PeriodicField to_physical(const SpectralField& s);

/// Spectral derivative along axis (0-based). The Nyquist mode k = m/2 has no
/// Hermitian partner in the band, so its derivative coefficient is set to 0;
/// band-limited fields with |k| < m/2 differentiate exactly.
SpectralField derivative(const SpectralField& s, int axis);

/// Trigonometric interpolation of the band at an arbitrary point (the Nyquist
/// mode is evaluated as cos so the interpolant is real).
double point_value(const SpectralField& s, const Vec2& x);

double sup_norm(const PeriodicField& u);
/// Sup norm of du/dx_axis, computed spectrally.
double grad_sup_norm(const PeriodicField& u, int axis);
/// Arithmetic mean of the samples (= the k = 0 coefficient).
double integral_mean(const PeriodicField& u);

/// One real cosine mode: amplitude * cos(k.x + phase).
struct ModeSpec {
  Eigen::Vector2i k{0, 0};
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Superposition of cosine modes sampled on the grid.
PeriodicField make_field(const GridSpec& g, const std::vector<ModeSpec>& modes);

/// Seeded random band-limited field: modes 0 < |k|_2 <= kmax with amplitudes
/// ~ amplitude/(1+|k|^2) and uniform phases. If quantize_dyadic, samples are
/// rounded to multiples of 2^-20 (exact vertical shifts by small integers).
PeriodicField random_band_field(const GridSpec& g, int kmax, double amplitude,
                                std::uint64_t seed,
                                bool quantize_dyadic = false);

}  // namespace fracflow
