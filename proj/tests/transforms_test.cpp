#include "fracflow/transforms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "fracflow/grid.hpp"

namespace fracflow {
namespace {

constexpr double kPiLocal = 3.14159265358979323846;

TEST(GridSpec, ValidatesDimensionAndSize) {
  EXPECT_THROW(GridSpec(3, 16), std::invalid_argument);
  EXPECT_THROW(GridSpec(1, 7), std::invalid_argument);
  EXPECT_THROW(GridSpec(1, 4), std::invalid_argument);
  EXPECT_NO_THROW(GridSpec(2, 8));
}

TEST(GridSpec, NodeCoordinatesAndIndexRoundTrip) {
  const GridSpec g(2, 16);
  for (Eigen::Index idx : {Eigen::Index(0), Eigen::Index(17), g.size() - 1}) {
    const Vec2 x = g.node(idx);
    EXPECT_EQ(g.node_index(x), idx);
  }
  EXPECT_DOUBLE_EQ(g.node(17)[0], g.spacing());
  EXPECT_DOUBLE_EQ(g.node(17)[1], g.spacing());
  EXPECT_THROW(g.node_index(Vec2(0.1234, 0.0)), std::invalid_argument);
}

TEST(Transforms, RoundTripIsExactToRounding) {
  for (int dim : {1, 2}) {
    const GridSpec g(dim, dim == 1 ? 64 : 16);
    const PeriodicField u = random_band_field(g, g.m / 2, 1.0, 42);
    const PeriodicField back = to_physical(to_spectral(u));
    EXPECT_LT((back.values - u.values).abs().maxCoeff(), 1e-13)
        << "dim " << dim;
  }
}

TEST(Transforms, SingleModeCoefficients) {
  const GridSpec g(1, 32);
  const PeriodicField u = make_field(g, {{{3, 0}, 0.8, 0.0}});
  const SpectralField s = to_spectral(u);
  // 0.8 cos(3x) = 0.4 e^{i3x} + 0.4 e^{-i3x}
  EXPECT_NEAR(std::abs(s.coeffs[3] - Complex(0.4, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.coeffs[32 - 3] - Complex(0.4, 0.0)), 0.0, 1e-14);
  double rest = 0.0;
  for (Eigen::Index i = 0; i < s.coeffs.size(); ++i)
    if (i != 3 && i != 29) rest = std::max(rest, std::abs(s.coeffs[i]));
  EXPECT_LT(rest, 1e-15);
}

TEST(Transforms, PhaseShiftedModeSplitsIntoQuadratures) {
  const GridSpec g(1, 32);
  const double amp = 0.6, ph = 0.7;
  const PeriodicField u = make_field(g, {{{2, 0}, amp, ph}});
  // amp cos(2x + ph) = amp cos(ph) cos(2x) - amp sin(ph) sin(2x)
  const PeriodicField v{
      g, make_field(g, {{{2, 0}, amp * std::cos(ph), 0.0}}).values -
             make_field(g, {{{2, 0}, amp * std::sin(ph), -kPiLocal / 2}})
                 .values};
  // cos(2x - pi/2) = sin(2x)
  EXPECT_LT((u.values - v.values).abs().maxCoeff(), 1e-15);
}

TEST(Transforms, SpectralDerivativeIsExactForBandLimitedFields) {
  const GridSpec g(1, 64);
  const PeriodicField u = make_field(g, {{{3, 0}, 1.0, 0.0}});
  const PeriodicField du = to_physical(derivative(to_spectral(u), 0));
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double x = g.node(j)[0];
    EXPECT_NEAR(du.values[j], -3.0 * std::sin(3.0 * x), 1e-12);
  }
}

TEST(Transforms, NyquistModeDerivativeIsDropped) {
  const GridSpec g(1, 16);
  const PeriodicField u = make_field(g, {{{8, 0}, 1.0, 0.0}});  // cos(8x)
  const PeriodicField du = to_physical(derivative(to_spectral(u), 0));
  EXPECT_LT(du.values.abs().maxCoeff(), 1e-13);
}

TEST(Transforms, CrossAxisDerivativesCommute) {
  const GridSpec g(2, 16);
  const PeriodicField u = random_band_field(g, 5, 1.0, 7);
  const SpectralField s = to_spectral(u);
  const PeriodicField dxy = to_physical(derivative(derivative(s, 0), 1));
  const PeriodicField dyx = to_physical(derivative(derivative(s, 1), 0));
  EXPECT_LT((dxy.values - dyx.values).abs().maxCoeff(), 1e-11);
}

TEST(Transforms, PointValueInterpolatesOffGrid) {
  const GridSpec g(1, 32);
  const PeriodicField u = make_field(g, {{{2, 0}, 0.5, 0.3}, {{5, 0}, 0.2, 0.0}});
  const SpectralField s = to_spectral(u);
  const double x = 1.2345;
  const double expect = 0.5 * std::cos(2 * x + 0.3) + 0.2 * std::cos(5 * x);
  EXPECT_NEAR(point_value(s, Vec2(x, 0.0)), expect, 1e-13);
}

TEST(Transforms, NormsAndMeanAgainstClosedForms) {
  const GridSpec g(1, 64);
  PeriodicField u = make_field(g, {{{2, 0}, 0.2, 0.0}});
  u.values += 0.3;
  EXPECT_NEAR(integral_mean(u), 0.3, 1e-15);
  EXPECT_NEAR(sup_norm(u), 0.5, 1e-15);
  // max |d/dx 0.2 cos(2x)| = 0.4, attained at a grid node (m % 8 == 0).
  EXPECT_NEAR(grad_sup_norm(u, 0), 0.4, 1e-13);
}

TEST(Transforms, ComplexReconstructionIsRejected) {
  const GridSpec g(1, 16);
  SpectralField s{g, CArray::Zero(g.size())};
  s.coeffs[1] = Complex(1.0, 0.0);  // no Hermitian partner at m-1
  EXPECT_THROW(to_physical(s), std::invalid_argument);
}

TEST(RandomBandField, DeterministicSeededAndBandLimited) {
  const GridSpec g(2, 16);
  const PeriodicField a = random_band_field(g, 3, 0.05, 99);
  const PeriodicField b = random_band_field(g, 3, 0.05, 99);
  EXPECT_TRUE((a.values == b.values).all());
  const PeriodicField c = random_band_field(g, 3, 0.05, 100);
  EXPECT_FALSE((a.values == c.values).all());

  const SpectralField s = to_spectral(a);
  double outside = 0.0;
  for (Eigen::Index i = 0; i < s.coeffs.size(); ++i) {
    const Eigen::Vector2i k = wavevector(g, i);
    if (double(k[0]) * k[0] + double(k[1]) * k[1] > 9.0 + 1e-9)
      outside = std::max(outside, std::abs(s.coeffs[i]));
  }
  EXPECT_LT(outside, 1e-15);
  EXPECT_NEAR(integral_mean(a), 0.0, 1e-15);
}

TEST(RandomBandField, DyadicQuantizationMakesSamplesExact) {
  const GridSpec g(1, 64);
  const PeriodicField u = random_band_field(g, 6, 0.05, 5, true);
  const double scale = double(1 << 20);
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double v = u.values[j] * scale;
    EXPECT_EQ(v, std::nearbyint(v));
  }
}

}  // namespace
}  // namespace fracflow
