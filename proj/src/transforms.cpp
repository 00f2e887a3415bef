#include "fracflow/transforms.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace fracflow {

namespace {

/// Unscaled forward DFT of a contiguous complex vector.
void dft_forward(std::vector<Complex>& io) {
  thread_local Eigen::FFT<double> engine;
  std::vector<Complex> out(io.size());
  engine.fwd(out, io);
  io.swap(out);
}

/// Inverse DFT with 1/N scaling, realized through the forward transform
/// (x = conj(FWD(conj(X)))/N) so the result does not depend on the backend's
/// inverse-scaling convention.
void dft_inverse(std::vector<Complex>& io) {
  for (auto& c : io) c = std::conj(c);
  dft_forward(io);
  const double inv = 1.0 / double(io.size());
  for (auto& c : io) c = std::conj(c) * inv;
}

void transform_grid(CArray& data, const GridSpec& g, bool forward) {
  const int m = g.m;
  if (g.dim == 1) {
    std::vector<Complex> buf(data.data(), data.data() + m);
    forward ? dft_forward(buf) : dft_inverse(buf);
    for (int i = 0; i < m; ++i) data[i] = buf[i];
    return;
  }
  std::vector<Complex> buf(m);
  for (int r = 0; r < m; ++r) {  // rows: last axis contiguous
    for (int c = 0; c < m; ++c) buf[c] = data[Eigen::Index(r) * m + c];
    forward ? dft_forward(buf) : dft_inverse(buf);
    for (int c = 0; c < m; ++c) data[Eigen::Index(r) * m + c] = buf[c];
  }
  for (int c = 0; c < m; ++c) {  // columns: stride m
    for (int r = 0; r < m; ++r) buf[r] = data[Eigen::Index(r) * m + c];
    forward ? dft_forward(buf) : dft_inverse(buf);
    for (int r = 0; r < m; ++r) data[Eigen::Index(r) * m + c] = buf[r];
  }
}

Eigen::Index conjugate_partner(const GridSpec& g, Eigen::Index idx) {
  if (g.dim == 1) return idx == 0 ? 0 : g.m - idx;
  const Eigen::Index r = idx / g.m, c = idx % g.m;
  const Eigen::Index rr = r == 0 ? 0 : g.m - r;
  const Eigen::Index cc = c == 0 ? 0 : g.m - c;
  return rr * g.m + cc;
}

}  // namespace

SpectralField to_spectral(const PeriodicField& u) {
  if (u.values.size() != u.grid.size())
    throw std::invalid_argument("field sample count does not match grid");
  SpectralField s{u.grid, CArray(u.grid.size())};
  for (Eigen::Index i = 0; i < s.coeffs.size(); ++i)
    s.coeffs[i] = Complex(u.values[i], 0.0);
  transform_grid(s.coeffs, u.grid, /*forward=*/true);
  s.coeffs /= double(u.grid.size());
  return s;
}

PeriodicField to_physical(const SpectralField& s) {
  const double scale = 1.0 + s.coeffs.abs().maxCoeff();
  for (Eigen::Index i = 0; i < s.coeffs.size(); ++i) {
    const Complex defect =
        s.coeffs[i] - std::conj(s.coeffs[conjugate_partner(s.grid, i)]);
    if (std::abs(defect) > 1e-10 * scale)
      throw std::invalid_argument("complex-valued reconstruction");
  }
  CArray work = s.coeffs * double(s.grid.size());
  transform_grid(work, s.grid, /*forward=*/false);
  PeriodicField u{s.grid, Array(s.grid.size())};
  for (Eigen::Index i = 0; i < work.size(); ++i) u.values[i] = work[i].real();
  return u;
}

SpectralField derivative(const SpectralField& s, int axis) {
  if (axis < 0 || axis >= s.grid.dim)
    throw std::invalid_argument("derivative axis out of range");
  SpectralField d = s;
  for (Eigen::Index i = 0; i < d.coeffs.size(); ++i) {
    const int k = wavevector(s.grid, i)[axis];
    d.coeffs[i] *= (std::abs(k) == s.grid.m / 2) ? Complex(0.0, 0.0)
                                                 : Complex(0.0, double(k));
  }
  return d;
}

double point_value(const SpectralField& s, const Vec2& x) {
  Complex acc(0.0, 0.0);
  const int nyq = s.grid.m / 2;
  for (Eigen::Index i = 0; i < s.coeffs.size(); ++i) {
    const Eigen::Vector2i k = wavevector(s.grid, i);
    Complex factor(1.0, 0.0);
    for (int d = 0; d < s.grid.dim; ++d) {
      if (k[d] == nyq)
        factor *= std::cos(nyq * x[d]);
      else
        factor *= Complex(std::cos(k[d] * x[d]), std::sin(k[d] * x[d]));
    }
    acc += s.coeffs[i] * factor;
  }
  return acc.real();
}

double sup_norm(const PeriodicField& u) { return u.values.abs().maxCoeff(); }

double grad_sup_norm(const PeriodicField& u, int axis) {
  return sup_norm(to_physical(derivative(to_spectral(u), axis)));
}

double integral_mean(const PeriodicField& u) { return u.values.mean(); }

PeriodicField make_field(const GridSpec& g,
                         const std::vector<ModeSpec>& modes) {
  PeriodicField u{g, Array::Zero(g.size())};
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Vec2 x = g.node(i);
    double v = 0.0;
    for (const auto& mode : modes)
      v += mode.amplitude *
           std::cos(mode.k[0] * x[0] + mode.k[1] * x[1] + mode.phase);
    u.values[i] = v;
  }
  return u;
}

PeriodicField random_band_field(const GridSpec& g, int kmax, double amplitude,
                                std::uint64_t seed, bool quantize_dyadic) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {  // [0, 1), identical across standard libraries
    return double(rng() >> 11) * 0x1p-53;
  };
  std::vector<ModeSpec> modes;
  for (int k1 = (g.dim == 1 ? 1 : -kmax); k1 <= kmax; ++k1) {
    for (int k2 = (g.dim == 1 ? 0 : 0); k2 <= (g.dim == 1 ? 0 : kmax); ++k2) {
      // half-band representatives: k2 > 0, or k2 == 0 and k1 > 0
      if (g.dim == 2 && !(k2 > 0 || (k2 == 0 && k1 > 0))) continue;
      const double kk = double(k1) * k1 + double(k2) * k2;
      if (kk == 0.0 || kk > double(kmax) * kmax) continue;
      ModeSpec mode;
      mode.k = {k1, k2};
      mode.amplitude = amplitude * (2.0 * uniform() - 1.0) / (1.0 + kk);
      mode.phase = kTwoPi * uniform();
      modes.push_back(mode);
    }
  }
  PeriodicField u = make_field(g, modes);
  if (quantize_dyadic)
    for (Eigen::Index i = 0; i < u.values.size(); ++i)
      u.values[i] = std::round(u.values[i] * 0x1p20) * 0x1p-20;
  return u;
}

}  // namespace fracflow
