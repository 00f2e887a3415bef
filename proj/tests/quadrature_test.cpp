#include "fracflow/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "fracflow/adaptive.hpp"
#include "fracflow/curvature.hpp"
#include "fracflow/transforms.hpp"

namespace fracflow {
namespace {

constexpr double kPiLocal = 3.14159265358979323846;

TEST(GaussLegendre, IntegratesMaximalDegreePolynomials) {
  // n-point Gauss-Legendre is exact through degree 2n-1.
  const GaussRule& r5 = gauss_legendre(5);
  ASSERT_EQ(r5.nodes.size(), 5u);
  double wsum = 0.0, x9 = 0.0, x8 = 0.0;
  for (int i = 0; i < 5; ++i) {
    wsum += r5.weights[i];
    x9 += r5.weights[i] * std::pow(r5.nodes[i], 9);
    x8 += r5.weights[i] * std::pow(r5.nodes[i], 8);
  }
  EXPECT_NEAR(wsum, 2.0, 1e-14);
  EXPECT_NEAR(x9, 0.0, 1e-14);        // odd power
  EXPECT_NEAR(x8, 2.0 / 9.0, 1e-14);  // integral of x^8 on [-1, 1]
  // Symmetric nodes.
  EXPECT_NEAR(r5.nodes[0] + r5.nodes[4], 0.0, 1e-15);
  EXPECT_EQ(r5.nodes[2], 0.0);
}

TEST(GaussLegendre, CachedPerOrder) {
  EXPECT_EQ(&gauss_legendre(12), &gauss_legendre(12));
}

TEST(AdaptiveIntegrate, OscillatoryIntegralToClosedForm) {
  // integral_0^5 e^{-x} cos(10 x) dx has the elementary closed form below.
  const double b = 10.0;
  const double exact =
      (1.0 - std::exp(-5.0) * (std::cos(5 * b) - b * std::sin(5 * b))) /
      (1.0 + b * b);
  const double val = adaptive_integrate(
      [b](double x) { return std::exp(-x) * std::cos(b * x); }, 0.0, 5.0,
      1e-13);
  EXPECT_NEAR(val, exact, 1e-12);
}

TEST(AdaptiveIntegrate, UnachievableToleranceTerminates) {
  // A zero tolerance cannot be met in floating point; the round-off floor
  // must stop the recursion rather than degenerate to 2^depth panels.
  const double val =
      adaptive_integrate([](double x) { return std::sin(x); }, 0.0, 1.0, 0.0);
  EXPECT_NEAR(val, 1.0 - std::cos(1.0), 1e-13);
}

TEST(AdaptiveIntegrate, KinkRefinesLocally) {
  const double val = adaptive_integrate(
      [](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-12);
  // integral of |x - 0.3| on [0, 1] = (0.3^2 + 0.7^2) / 2
  EXPECT_NEAR(val, 0.5 * (0.09 + 0.49), 1e-11);
}

TEST(Scheme, DefaultsValidateAndBadCountsThrow) {
  for (int dim : {1, 2}) {
    const QuadratureScheme s = QuadratureScheme::defaults(dim);
    EXPECT_NO_THROW(s.validate(dim));
  }
  QuadratureScheme s = QuadratureScheme::defaults(2);
  s.inner_angular_nodes = 15;  // must be even
  EXPECT_THROW(s.validate(2), std::invalid_argument);
  s = QuadratureScheme::defaults(2);
  s.lattice_cells = 0;
  EXPECT_THROW(s.validate(2), std::invalid_argument);
  s = QuadratureScheme::defaults(1);
  s.inner_radius = 4.0;  // beyond pi
  EXPECT_THROW(s.validate(1), std::invalid_argument);
}

TEST(Scheme, BoostKeepsFloorsAndGrowsWithFrequency) {
  const QuadratureScheme base = QuadratureScheme::defaults(2);
  const QuadratureScheme b1 = boosted_for_mode(base, 1.0);
  const QuadratureScheme b16 = boosted_for_mode(base, 16.0);
  EXPECT_GE(b1.inner_radial_nodes, base.inner_radial_nodes);
  EXPECT_GE(b1.inner_angular_nodes, base.inner_angular_nodes);
  EXPECT_GT(b16.inner_radial_nodes, b1.inner_radial_nodes);
  EXPECT_GT(b16.inner_angular_nodes, b1.inner_angular_nodes);
  EXPECT_EQ(b16.inner_angular_nodes % 2, 0);
  EXPECT_EQ(b16.far_nodes_per_axis % 2, 0);
}

class NodeFamilies : public ::testing::TestWithParam<int> {};

TEST_P(NodeFamilies, NodesAreFiniteWithinRangeAndPositive) {
  const int dim = GetParam();
  const FlowParams p(0.5, dim);
  const QuadratureScheme s = QuadratureScheme::defaults(dim);
  const auto quad = get_quadrature(p, s);
  const double R = (2.0 * s.lattice_cells + 1.0) * kPiLocal;
  ASSERT_FALSE(quad->plain.empty());
  ASSERT_FALSE(quad->fold.empty());
  for (const PairNode& n : quad->plain) {
    EXPECT_GT(n.r, 0.0);
    EXPECT_LT(n.r, std::sqrt(double(dim)) * R * 1.0001);
    EXPECT_GT(n.w, 0.0);
    EXPECT_GT(n.ws, 0.0);
    EXPECT_TRUE(std::isfinite(n.ws));
    EXPECT_NEAR(n.y.norm(), n.r, 1e-12 * n.r);
    // ws = w * r^{1-dim-alpha}
    EXPECT_NEAR(n.ws, n.w * std::pow(n.r, 1.0 - dim - p.alpha),
                1e-9 * n.ws);
  }
  // Fold nodes live in the closed central cell.
  for (const PairNode& n : quad->fold) {
    EXPECT_LE(std::abs(n.y[0]), kPiLocal * 1.0000001);
    if (dim == 2) EXPECT_LE(std::abs(n.y[1]), kPiLocal * 1.0000001);
  }
}

TEST_P(NodeFamilies, PlainWeightsTileTheTruncationRegion) {
  // Each stored pair covers {+y, -y} with weight w per member, so the w-sum
  // equals half the Lebesgue measure of the kept region: a segment of length
  // 2R in dim 1, the square (2R)^2 in dim 2, both centered and with R =
  // (2M+1) pi.
  const int dim = GetParam();
  const FlowParams p(0.5, dim);
  const QuadratureScheme s = QuadratureScheme::defaults(dim);
  const auto quad = get_quadrature(p, s);
  double wsum = 0.0;
  for (const PairNode& n : quad->plain) wsum += n.w;
  const double R = (2.0 * s.lattice_cells + 1.0) * kPiLocal;
  const double half_measure = dim == 1 ? R : 2.0 * R * R;
  EXPECT_NEAR(wsum, half_measure, 1e-9 * half_measure);
}

INSTANTIATE_TEST_SUITE_P(Dims, NodeFamilies, ::testing::Values(1, 2));

TEST(TailBound, ScalesWithOscillationAndShrinksWithRadius) {
  const GridSpec g(1, 64);
  const FlowParams p(0.5, 1);
  const PeriodicField u = make_field(g, {{{2, 0}, 0.3, 0.0}});
  const PeriodicField u2{g, 2.0 * u.values};

  QuadratureScheme s2 = QuadratureScheme::defaults(1);
  s2.lattice_cells = 2;
  QuadratureScheme s5 = QuadratureScheme::defaults(1);
  s5.lattice_cells = 5;

  const double t2 = tail_bound(u, p, s2);
  const double t5 = tail_bound(u, p, s5);
  EXPECT_GT(t2, 0.0);
  EXPECT_GT(t2, t5);
  // Leading term scales like R^{-1-alpha}: doubling osc(u) doubles it.
  EXPECT_NEAR(tail_bound(u2, p, s2), 2.0 * t2, 1e-9 * t2);
  const double expected_ratio = std::pow(11.0 / 5.0, 1.0 + p.alpha);
  EXPECT_NEAR(t2 / t5, expected_ratio, 0.05 * expected_ratio);
}

TEST(TailBound, ReportedByBothFormsAndCoversTruncationError) {
  // Refining the truncation radius moves the value by less than the coarser
  // bound: the bound is honest for the quantity it certifies.
  const GridSpec g(1, 64);
  const FlowParams p(0.5, 1);
  const PeriodicField u = random_band_field(g, 5, 0.05, 17);

  QuadratureScheme coarse = QuadratureScheme::defaults(1);
  coarse.lattice_cells = 2;
  QuadratureScheme fine = QuadratureScheme::defaults(1);
  fine.lattice_cells = 8;

  for (CurvatureForm form :
       {CurvatureForm::gradient_corrected, CurvatureForm::principal_value}) {
    const CurvatureField hc = h_alpha_field(u, p, coarse, form);
    const CurvatureField hf = h_alpha_field(u, p, fine, form);
    const double drift = (hc.values.values - hf.values.values).abs().maxCoeff();
    EXPECT_GT(hc.tail_bound, 0.0);
    EXPECT_LE(drift, hc.tail_bound);
    EXPECT_LT(hf.tail_bound, hc.tail_bound);
  }
}

}  // namespace
}  // namespace fracflow
