#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace fracflow {

using Array = Eigen::ArrayXd;
using CArray = Eigen::ArrayXcd;
using Vec2 = Eigen::Vector2d;
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on the n-torus [0, 2*pi)^n, n in {1, 2}.
/// Nodes are x_j = j*h with h = 2*pi/m; samples are stored row-major
/// (for n = 2, flat index = j1*m + j2 with coordinates (j1*h, j2*h)).
struct GridSpec {
  int dim = 1;
  int m = 256;

  GridSpec() = default;
  GridSpec(int dim_, int m_);  // validates; throws std::invalid_argument

  double spacing() const { return kTwoPi / m; }
  Eigen::Index size() const {
    return dim == 1 ? Eigen::Index(m) : Eigen::Index(m) * m;
  }

  /// Coordinates of the node with flat index idx.
  Vec2 node(Eigen::Index idx) const {
    if (dim == 1) return Vec2(idx * spacing(), 0.0);
    return Vec2((idx / m) * spacing(), (idx % m) * spacing());
  }

  /// Flat index of the node nearest to x; throws if x is not a grid node
  /// (within 1e-10 of one, modulo the period).
  Eigen::Index node_index(const Vec2& x) const;

  bool operator==(const GridSpec&) const = default;
};

/// Real samples of a periodic function on a GridSpec.
struct PeriodicField {
  GridSpec grid;
  Array values;  // grid.size() samples, row-major
};

/// Fourier coefficients u_hat(k) with u(x) = sum_k u_hat(k) e^{i k.x} over the
/// band k in {-m/2+1, ..., m/2}^n. Stored in DFT bin order: bin b per axis
/// corresponds to k = b for b <= m/2 and k = b - m otherwise.
struct SpectralField {
  GridSpec grid;
  CArray coeffs;  // grid.size() coefficients, row-major in bin order
};

/// Signed wavenumber of DFT bin b on an m-point axis.
inline int wavenumber(int bin, int m) { return bin <= m / 2 ? bin : bin - m; }

/// DFT bin of signed wavenumber k in {-m/2+1, ..., m/2}.
inline int bin_of(int k, int m) { return k >= 0 ? k : k + m; }

/// Wavenumber vector of a flat bin index.
inline Eigen::Vector2i wavevector(const GridSpec& g, Eigen::Index idx) {
  if (g.dim == 1) return {wavenumber(int(idx), g.m), 0};
  return {wavenumber(int(idx / g.m), g.m), wavenumber(int(idx % g.m), g.m)};
}

}  // namespace fracflow
