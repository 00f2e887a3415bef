#include "fracflow/flow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "fracflow/symbols.hpp"
#include "fracflow/transforms.hpp"

namespace fracflow {
namespace {

TEST(ExpFit, RecoversSyntheticRateExactly) {
  std::vector<double> t, v;
  for (int i = 0; i <= 50; ++i) {
    t.push_back(0.02 * i);
    v.push_back(3.0 * std::exp(-2.5 * t.back()));
  }
  const ExpFit fit = fit_exponential(t, v, 0.4);
  ASSERT_TRUE(fit.ok);
  EXPECT_NEAR(fit.rate, 2.5, 1e-12);
  EXPECT_NEAR(fit.log_amplitude, std::log(3.0), 1e-12);
  EXPECT_GT(fit.r2, 1.0 - 1e-12);
}

TEST(ExpFit, RefusesShortOrNonPositiveWindows) {
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3};
  const std::vector<double> v{1.0, 0.9, 0.8, 0.7};
  EXPECT_FALSE(fit_exponential(t, v, 0.9).ok);  // < 5 samples in window
  std::vector<double> t2, v2;
  for (int i = 0; i < 20; ++i) {
    t2.push_back(0.1 * i);
    v2.push_back(i % 2 ? 1.0 : -1.0);  // not positive
  }
  EXPECT_FALSE(fit_exponential(t2, v2, 0.0).ok);
}

TEST(Stepper, TrapezoidalModeFactorInTheLinearRegime) {
  // For a tiny single mode the nonlinear remainder is O(eps^2), so n steps
  // multiply the coefficient by ((1 + dt m / 2) / (1 - dt m / 2))^n up to
  // quadrature bias of the explicit leg.
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const double eps = 1e-8;
  const PeriodicField u0 = make_field(g, {{{2, 0}, eps, 0.0}});
  StepperConfig sc;
  sc.dt = 5e-3;
  sc.t_end = 10 * sc.dt;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  ASSERT_EQ(tr.termination, "completed");
  const double m2 = -omega0(p) * std::pow(2.0, 1.0 + p.alpha);
  const double factor = (1.0 + 0.5 * sc.dt * m2) / (1.0 - 0.5 * sc.dt * m2);
  const double expect = eps * std::pow(factor, 10.0);
  const SpectralField s = to_spectral(tr.snapshots.back().field);
  EXPECT_NEAR(2.0 * s.coeffs[2].real(), expect, 1e-6 * expect);
  EXPECT_NEAR(2.0 * std::abs(s.coeffs[2]), expect, 1e-6 * expect);
}

TEST(Stepper, ConstantInitialDataIsAFixedPoint) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const PeriodicField u0{g, Array::Constant(g.size(), 1.3)};
  StepperConfig sc;
  sc.dt = 1e-2;
  sc.t_end = 5e-2;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  ASSERT_EQ(tr.termination, "completed");
  EXPECT_TRUE((tr.snapshots.back().field.values == 1.3).all());
}

TEST(Stepper, TraceColumnsAreConsistent) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  PeriodicField u0 = make_field(g, {{{1, 0}, 0.05, 0.0}});
  u0.values += 0.2;
  StepperConfig sc;
  sc.dt = 2e-3;
  sc.t_end = 0.05;
  sc.snapshot_every = 5;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  ASSERT_EQ(tr.termination, "completed");
  const std::size_t n = tr.times.size();
  ASSERT_EQ(n, std::size_t(26));  // 25 steps + initial state
  ASSERT_EQ(tr.sup_norms.size(), n);
  ASSERT_EQ(tr.dt_sup_norms.size(), n);
  ASSERT_EQ(tr.means.size(), n);
  ASSERT_EQ(tr.osc_sup_norms.size(), n);
  ASSERT_EQ(tr.besov.size(), n);
  ASSERT_EQ(tr.grad_sup_norms.size(), 1u);
  ASSERT_EQ(tr.grad_sup_norms[0].size(), n);
  // Snapshots every 5 steps plus first and last.
  ASSERT_EQ(tr.snapshots.size(), std::size_t(6));
  EXPECT_EQ(tr.snapshots.front().t, 0.0);
  EXPECT_NEAR(tr.snapshots.back().t, 0.05, 1e-12);
  EXPECT_NEAR(tr.times[1] - tr.times[0], sc.dt, 1e-15);
  // First dt_sup entry is the exact initial velocity sup-norm.
  EXPECT_GT(tr.dt_sup_norms[0], 0.0);
  // Oscillation = sup - mean consistency on the initial row.
  EXPECT_NEAR(tr.osc_sup_norms[0], 0.05, 1e-12);
  EXPECT_NEAR(tr.means[0], 0.2, 1e-14);
}

TEST(Stepper, ExplicitSchemeBlowsUpBeyondItsBudget) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const PeriodicField u0 = random_band_field(g, 20, 0.5, 5);
  // Budget formula: 2 / (omega0 kmax^{1+alpha}) with kmax = m/2.
  StepperConfig probe_cfg;
  probe_cfg.scheme = TimeScheme::explicit_rk2;
  probe_cfg.dt = 1e-9;
  probe_cfg.t_end = 1e-9;
  const FlowTrace probe =
      simulate(u0, p, QuadratureScheme::defaults(1), probe_cfg);
  const double budget = probe.rk2_dt_budget;
  EXPECT_GT(budget, 0.0);
  EXPECT_NEAR(budget,
              2.0 / (omega0(p) * std::pow(32.0, 1.0 + p.alpha)), 1e-12);

  StepperConfig sc;
  sc.scheme = TimeScheme::explicit_rk2;
  sc.dt = 50.0 * budget;
  sc.t_end = 400.0 * budget;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  EXPECT_EQ(tr.termination, "blow-up detected");
  EXPECT_LT(tr.times.size(), std::size_t(9));

  // A single step at a grossly unstable size escapes the admissible range
  // immediately and surfaces as the typed error.
  const PeriodicField spike = make_field(g, {{{30, 0}, 0.3, 0.0}});
  StepperConfig huge = sc;
  huge.dt = 1e4 * budget;
  EXPECT_THROW(flow_step(spike, p, QuadratureScheme::defaults(1), huge),
               BlowUpError);
}

TEST(Stepper, ImplicitSchemeIsStableAtLargeSteps) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const PeriodicField u0 = random_band_field(g, 10, 0.05, 9);
  StepperConfig sc;
  sc.dt = 0.1;  // far beyond the explicit budget
  sc.t_end = 2.0;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  ASSERT_EQ(tr.termination, "completed");
  EXPECT_LE(tr.sup_norms.back(), tr.sup_norms.front() * 1.001);
  EXPECT_LT(tr.osc_sup_norms.back(), 1e-4);
}

TEST(Decay, SmallDataRunCertifiesItsFlatLimit) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  PeriodicField u0 = make_field(g, {{{1, 0}, 1e-2, 0.0}});
  u0.values += 0.5;
  StepperConfig sc;
  sc.dt = 5e-3;
  sc.t_end = 1.2;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  ASSERT_EQ(tr.termination, "completed");
  ASSERT_TRUE(tr.certified);
  ASSERT_TRUE(tr.osc_fit.ok);
  const double expected_rate = omega0(p);
  EXPECT_NEAR(tr.osc_fit.rate, expected_rate, 0.05 * expected_rate);
  EXPECT_LE(std::abs(tr.c_limit), sup_norm(u0));
  // The mean at the end sits within the certified geometric tail.
  const double M = std::exp(tr.osc_fit.log_amplitude);
  const double bound = 2.0 * M * std::exp(-tr.osc_fit.rate * sc.t_end);
  EXPECT_LE(std::abs(tr.means.back() - tr.c_limit), bound);
}

TEST(Rescaling, IntegerFactorIsExactDecimation) {
  const FlowParams p(0.5, 1);
  const GridSpec g(1, 64);
  const PeriodicField u0 = make_field(g, {{{1, 0}, 0.04, 0.0}});
  StepperConfig sc;
  sc.dt = 2e-3;
  sc.t_end = 0.1;
  sc.snapshot_every = 10;
  const FlowTrace tr = simulate(u0, p, QuadratureScheme::defaults(1), sc);
  ASSERT_EQ(tr.termination, "completed");
  const double lambda = 2.0;
  const FlowTrace rs = rescale_solution(tr, lambda, p);
  const double ts = std::pow(lambda, 1.0 + p.alpha);
  ASSERT_EQ(rs.times.size(), tr.times.size());
  EXPECT_EQ(rs.grid.m, g.m);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    EXPECT_DOUBLE_EQ(rs.times[i], tr.times[i] / ts);
    EXPECT_DOUBLE_EQ(rs.sup_norms[i], tr.sup_norms[i] / lambda);
  }
  // Sample decimation: v(x) = u(lambda x) / lambda on the same grid.
  const PeriodicField& last = tr.snapshots.back().field;
  const PeriodicField& rlast = rs.snapshots.back().field;
  for (int j = 0; j < g.m; ++j)
    EXPECT_EQ(rlast.values[j], last.values[(2 * j) % g.m] / 2.0);
  // Besov column scales by lambda^{s-1} with s = 1.5.
  for (std::size_t i = 0; i < tr.besov.size(); ++i)
    EXPECT_NEAR(rs.besov[i], tr.besov[i] * std::pow(lambda, 0.5),
                1e-12 * tr.besov[i] * std::pow(lambda, 0.5) + 1e-18);

  EXPECT_THROW(rescale_solution(tr, 1.5, p), std::invalid_argument);
}

TEST(MeanDecomposition, ExactSplitAndReassembly) {
  const GridSpec g(1, 64);
  PeriodicField u = random_band_field(g, 8, 0.3, 14);
  u.values += 1.7;
  const auto [q, v] = decompose_mean(u);
  EXPECT_DOUBLE_EQ(q, integral_mean(u));
  for (Eigen::Index j = 0; j < g.size(); ++j)
    EXPECT_EQ(v.values[j], u.values[j] - q);
  EXPECT_NEAR(integral_mean(v), 0.0, 1e-15);
}

}  // namespace
}  // namespace fracflow
