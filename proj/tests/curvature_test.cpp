#include "fracflow/curvature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "fracflow/symbols.hpp"
#include "fracflow/transforms.hpp"

namespace fracflow {
namespace {

QuadratureScheme reduced_dim2_scheme() {
  QuadratureScheme s = QuadratureScheme::defaults(2);
  s.lattice_cells = 2;
  s.inner_radial_nodes = 16;
  s.inner_angular_nodes = 16;
  s.cell_nodes_per_axis = 8;
  s.far_nodes_per_axis = 24;
  return s;
}

TEST(Curvature, ConstantsAreExactlyStationary) {
  for (int dim : {1, 2}) {
    const FlowParams p(0.5, dim);
    const GridSpec g(dim, dim == 1 ? 256 : 32);
    const QuadratureScheme s =
        dim == 1 ? QuadratureScheme::defaults(1) : reduced_dim2_scheme();
    for (double c : {-3.0, 0.0, 7.0}) {
      const PeriodicField u{g, Array::Constant(g.size(), c)};
      for (CurvatureForm form : {CurvatureForm::gradient_corrected,
                                 CurvatureForm::principal_value}) {
        const CurvatureField h = h_alpha_field(u, p, s, form);
        EXPECT_EQ(h.values.values.abs().maxCoeff(), 0.0)
            << "dim=" << dim << " c=" << c;
      }
    }
  }
}

TEST(Curvature, SmallAmplitudeModeReproducesTheSymbol) {
  // In the linear regime H_alpha(eps cos(kx)) = -m0(k) eps cos(kx) + O(eps^2)
  // (the symbol is negative, the curvature positive at a crest), so the
  // node-wise ratio against the polar-route symbol isolates the quadrature
  // error of the singular-integral evaluator.
  const double eps = 1e-6;
  {
    const FlowParams p(0.5, 1);
    const GridSpec g(1, 64);
    const PeriodicField u = make_field(g, {{{3, 0}, eps, 0.0}});
    const CurvatureField h = h_alpha_field(u, p, QuadratureScheme::defaults(1),
                                           CurvatureForm::gradient_corrected);
    const double m3 = symbol_polar(Vec2(3.0, 0.0), Vec2::Zero(), p);
    const double worst =
        (h.values.values + m3 * u.values).abs().maxCoeff() / (eps * -m3);
    EXPECT_LT(worst, 1e-6);
  }
  {
    const FlowParams p(0.5, 2);
    const GridSpec g(2, 16);
    const PeriodicField u = make_field(g, {{{2, 1}, eps, 0.0}});
    const CurvatureField h = h_alpha_field(u, p, reduced_dim2_scheme(),
                                           CurvatureForm::gradient_corrected);
    const double m21 = symbol_polar(Vec2(2.0, 1.0), Vec2::Zero(), p);
    const double worst =
        (h.values.values + m21 * u.values).abs().maxCoeff() / (eps * -m21);
    EXPECT_LT(worst, 1e-3);
  }
}

TEST(Curvature, GradientCorrectedAndPrincipalValueFormsAgree) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  for (std::uint64_t seed : {3u, 4u}) {
    const PeriodicField u = random_band_field(g, 6, 0.1, seed);
    const CurvatureField a =
        h_alpha_field(u, p, s, CurvatureForm::gradient_corrected);
    const CurvatureField b =
        h_alpha_field(u, p, s, CurvatureForm::principal_value);
    EXPECT_LT((a.values.values - b.values.values).abs().maxCoeff(), 1e-5);
  }
}

TEST(Curvature, SignConventionIsDiffusive) {
  // A cosine bump at the origin (local max) must move down. The normal
  // velocity is -sqrt(1+|grad u|^2) H, so diffusive behaviour means H > 0 at
  // the crest and H < 0 at the trough.
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const PeriodicField u = make_field(g, {{{1, 0}, 0.2, 0.0}});
  const CurvatureField h = h_alpha_field(u, p, QuadratureScheme::defaults(1),
                                         CurvatureForm::gradient_corrected);
  EXPECT_GT(h.values.values[0], 0.0);          // at the crest
  EXPECT_LT(h.values.values[g.m / 2], 0.0);    // at the trough
}

TEST(Curvature, VerticalShiftByExactConstantIsBitwiseInvariant) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  const PeriodicField u = random_band_field(g, 6, 0.05, 21, true);
  const PeriodicField shifted{g, u.values + 2.5};
  const CurvatureField a =
      h_alpha_field(u, p, s, CurvatureForm::gradient_corrected);
  const CurvatureField b =
      h_alpha_field(shifted, p, s, CurvatureForm::gradient_corrected);
  for (Eigen::Index j = 0; j < g.size(); ++j)
    EXPECT_EQ(a.values.values[j], b.values.values[j]) << j;
}

TEST(Curvature, HorizontalShiftEquivariance) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  const PeriodicField u = random_band_field(g, 6, 0.05, 33);
  const int shift = 5;
  Array rolled(g.size());
  for (int j = 0; j < g.m; ++j)
    rolled[j] = u.values[((j - shift) % g.m + g.m) % g.m];
  const PeriodicField ut{g, rolled};
  const CurvatureField hu =
      h_alpha_field(u, p, s, CurvatureForm::gradient_corrected);
  const CurvatureField ht =
      h_alpha_field(ut, p, s, CurvatureForm::gradient_corrected);
  double worst = 0.0;
  for (int j = 0; j < g.m; ++j) {
    const double expect = hu.values.values[((j - shift) % g.m + g.m) % g.m];
    worst = std::max(worst, std::abs(ht.values.values[j] - expect));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Curvature, PointEvaluationMatchesFieldEvaluation) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  const PeriodicField u = random_band_field(g, 5, 0.1, 8);
  const CurvatureField h =
      h_alpha_field(u, p, s, CurvatureForm::gradient_corrected);
  for (Eigen::Index j : {Eigen::Index(0), Eigen::Index(13), Eigen::Index(40)}) {
    const CurvatureResult r = h_alpha_point(u, g.node(j), p, s);
    EXPECT_EQ(r.value, h.values.values[j]);
    EXPECT_EQ(r.tail_bound, h.tail_bound);
  }
  const CurvatureResult rp = h_alpha_point_pv(u, g.node(7), p, s);
  const CurvatureField hp =
      h_alpha_field(u, p, s, CurvatureForm::principal_value);
  EXPECT_EQ(rp.value, hp.values.values[7]);
}

TEST(Curvature, OffGridPointIsRejected) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const PeriodicField u = make_field(g, {{{1, 0}, 0.1, 0.0}});
  EXPECT_THROW(
      h_alpha_point(u, Vec2(0.05, 0.0), p, QuadratureScheme::defaults(1)),
      std::invalid_argument);
}

TEST(Quasilinear, MatchesGradientCorrectedContraction) {
  // Phi(u)[u] = -sqrt(1 + |grad u|^2) H_alpha(u), with the gradient summed
  // from the same spectral modes the evaluator uses.
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  const PeriodicField u = random_band_field(g, 6, 0.1, 12);
  const PeriodicField lhs = phi_apply(u, u, p, s);
  const CurvatureField h =
      h_alpha_field(u, p, s, CurvatureForm::gradient_corrected);
  const PeriodicField du = to_physical(derivative(to_spectral(u), 0));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double expect =
        -std::sqrt(1.0 + du.values[j] * du.values[j]) * h.values.values[j];
    worst = std::max(worst, std::abs(lhs.values[j] - expect));
  }
  EXPECT_LT(worst, 1e-11);
}

TEST(Quasilinear, GridMismatchIsRejected) {
  const FlowParams p(0.5, 1);
  const GridSpec g1(1, 64), g2(1, 32);
  const PeriodicField u = make_field(g1, {{{1, 0}, 0.1, 0.0}});
  const PeriodicField v = make_field(g2, {{{1, 0}, 0.1, 0.0}});
  EXPECT_THROW(phi_apply(u, v, p, QuadratureScheme::defaults(1)),
               std::invalid_argument);
}

TEST(FrozenOperator, IsLinear) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  const Vec2 a(0.7, 0.0);
  const PeriodicField u = random_band_field(g, 5, 0.3, 2);
  const PeriodicField v = random_band_field(g, 5, 0.2, 9);
  const PeriodicField sum{g, u.values + v.values};
  const PeriodicField au = frozen_apply(u, a, p, s);
  const PeriodicField av = frozen_apply(v, a, p, s);
  const PeriodicField asum = frozen_apply(sum, a, p, s);
  EXPECT_LT((asum.values - au.values - av.values).abs().maxCoeff(), 1e-10);

  const PeriodicField scaled{g, 3.0 * u.values};
  const PeriodicField ascaled = frozen_apply(scaled, a, p, s);
  EXPECT_LT((ascaled.values - 3.0 * au.values).abs().maxCoeff(), 1e-10);
}

TEST(TailBoundOverloads, FormSpecificBoundsBracketTheGenericOne) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const QuadratureScheme s = QuadratureScheme::defaults(1);
  const PeriodicField u = random_band_field(g, 5, 0.1, 6);
  const double generic = tail_bound(u, p, s);
  const double nmc = tail_bound(u, p, s, CurvatureForm::gradient_corrected);
  const double pv = tail_bound(u, p, s, CurvatureForm::principal_value);
  EXPECT_GT(generic, 0.0);
  EXPECT_LE(nmc, generic + 1e-18);
  EXPECT_LE(pv, generic + 1e-18);
  EXPECT_GE(generic, std::max(nmc, pv) * (1.0 - 1e-12));
}

}  // namespace
}  // namespace fracflow
