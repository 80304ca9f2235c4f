#include <cmath>

#include <gtest/gtest.h>

#include "pmlab/error.hpp"
#include "pmlab/limit_solver.hpp"
#include "pmlab/variational.hpp"

using namespace pmlab;

TEST(GridRule, SpacingBound) {
  for (double eps : {0.3, 0.1, 0.05}) {
    const std::size_t n = pmf_grid_size(eps);
    const double bound = eps * eps * omega(eps) / 8.0;
    EXPECT_LE(1.0 / double(n - 1), bound);
    if (n > 64) EXPECT_GT(1.0 / double(n - 2), bound);
  }
  EXPECT_EQ(rpmf_grid_size(0.5, 0.01), 64u);
  EXPECT_THROW(pmf_grid_size(0.1, 0.0), Error);
}

TEST(MinimizePmf, CoarseGridIsResolutionError) {
  const SampledFunction f = SampledFunction::sample(0, 1, 100, [](double x) { return x; });
  try {
    minimize_pmf(0.1, 1.0, f, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
    EXPECT_NE(std::string(e.what()).find("use at least"), std::string::npos);
  }
}

TEST(MinimizePmf, ConstantForcingIsReproduced) {
  const double eps = 0.3;
  const SampledFunction f =
      SampledFunction::sample(0, 1, pmf_grid_size(eps), [](double) { return -1.25; });
  const SolveResult r = minimize_pmf(eps, 1.0, f, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.energy.total, 0.0, 1e-20);
  for (double v : r.minimizer.values()) EXPECT_NEAR(v, -1.25, 1e-10);
}

TEST(MinimizePmf, LbfgsAgreesWithNewton) {
  const double eps = 0.3;
  const SampledFunction f =
      SampledFunction::sample(0, 1, pmf_grid_size(eps), [](double x) { return std::sin(3 * x); });
  SolveOptions o;
  o.gradient_tolerance = 1e-7;
  o.multistart_seeds = {"forcing"};
  const SolveResult a = minimize_pmf(eps, 1.0, f, o);
  o.optimizer = Optimizer::lbfgs;
  o.max_iterations = 20000;
  const SolveResult b = minimize_pmf(eps, 1.0, f, o);
  ASSERT_TRUE(a.converged);
  // the quasi-Newton iteration stalls on this stiff problem before the tight
  // tolerance but lands on the same minimum
  EXPECT_LT(b.gradient_norm, 1e-3);
  EXPECT_GE(b.energy.total, a.energy.total - 1e-12);
  EXPECT_NEAR(a.energy.total, b.energy.total, 1e-6 * a.energy.total);
}

TEST(MinimizePmf, UnknownSeedIsUsageError) {
  const double eps = 0.3;
  const SampledFunction f = SampledFunction::sample(0, 1, pmf_grid_size(eps), [](double x) { return x; });
  SolveOptions o;
  o.multistart_seeds = {"bogus"};
  try {
    minimize_pmf(eps, 1.0, f, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

TEST(MinimizeRpmf, PinnedDataIsKept) {
  const double eps = 0.25, M = 0.5, L = 6.0;
  const SampledFunction g =
      SampledFunction::sample(0, L, rpmf_grid_size(eps, L), [&](double y) { return M * y; });
  const SolveResult r = minimize_rpmf(eps, 1.0, g, {}, BoundaryData{0.0, M, M * L, M});
  const auto v = r.minimizer.values();
  const double h = r.minimizer.spacing();
  const std::size_t n = v.size();
  EXPECT_NEAR(v[0], 0.0, 1e-12);
  EXPECT_NEAR((v[1] - v[0]) / h, M, 1e-9);
  EXPECT_NEAR(v[n - 1], M * L, 1e-12);
  EXPECT_NEAR((v[n - 1] - v[n - 2]) / h, M, 1e-9);
}

TEST(OptimizeEnergy, AllPinnedIsUnchanged) {
  const SampledFunction u = SampledFunction::sample(0, 1, 64, [](double x) { return x * x; });
  std::vector<std::size_t> pinned(64);
  for (std::size_t i = 0; i < 64; ++i) pinned[i] = i;
  const SolveResult r = optimize_energy(u, {1e-4, 1.0, 0.0}, nullptr, pinned, {});
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(r.minimizer[i], u[i]);
}

TEST(Recovery, ProfileAndEnergy) {
  const double L = 10.0;
  const PureJumpFunction target(0.0, {{5.0, 2.0}}, {0.0, L});
  double prev = 1e300;
  for (double eps : {0.2, 0.05, 0.01}) {
    const SampledFunction grid =
        SampledFunction::sample(0, L, rpmf_grid_size(eps, L), [](double) { return 0.0; });
    const RecoveryReport r = recovery_construction(target, eps, grid);
    ASSERT_EQ(r.half_widths.size(), 1u);
    EXPECT_EQ(r.profile[0], 0.0);
    EXPECT_EQ(r.profile[r.profile.size() - 1], 2.0);
    for (std::size_t i = 1; i < r.profile.size(); ++i) EXPECT_GE(r.profile[i], r.profile[i - 1]);
    // the energy ratio tends to one as eps decreases
    EXPECT_LT(std::fabs(r.delta), prev);
    prev = std::fabs(r.delta);
  }
}

TEST(Recovery, UnresolvedTransitionIsResolutionError) {
  const PureJumpFunction target(0.0, {{5.0, 2.0}}, {0.0, 10.0});
  const SampledFunction grid = SampledFunction::sample(0, 10, 64, [](double) { return 0.0; });
  try {
    recovery_construction(target, 0.05, grid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resolution);
  }
}

TEST(TransitionHalfWidth, ScalesWithJump) {
  const EnergyCoefficients c = rpmf_coefficients(0.1, 0.0);
  const double e1 = transition_half_width(1.0, c), e4 = transition_half_width(4.0, c);
  EXPECT_GT(e1, 0.0);
  EXPECT_GT(e4, e1);
  EXPECT_THROW(transition_half_width(0.0, c), Error);
}

TEST(BoundaryPatch, DataAndBounds) {
  const double eps = 0.1;
  const PatchCertificate p = boundary_patch(0.0, 2.0, 1.0, -0.5, -0.3, 2.0, eps);
  const auto& u = p.profile;
  EXPECT_NEAR(u[0], 1.0, 1e-12);
  EXPECT_NEAR(u[u.size() - 1], -0.3, 1e-12);
  // Hermite cubic from (0, 1, -0.5) to (eta, 0, 0)
  const double e = p.eta;
  for (std::size_t i = 0; u.x(i) < e; ++i) {
    const double t = u.x(i) / e;
    const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    EXPECT_NEAR(u[i], h00 * 1.0 + h10 * e * -0.5, 1e-12) << i;
  }
  EXPECT_NEAR(u.interpolate(1.0), 0.0, 1e-15);
  EXPECT_LE(p.rpm, p.rpm_bound);
  EXPECT_LE(p.l2_squared, p.l2_bound);
  EXPECT_NEAR(p.eta, eps * eps * (1.0 + eps * eps * 2.0), 1e-15);
  EXPECT_THROW(boundary_patch(0.0, 1e-4, 1.0, 0.0, 1.0, 0.0, eps), Error);
}

TEST(Skeleton, AffineUsesLimitMinimizer) {
  const double eps = 0.03;
  const SampledFunction f = SampledFunction::sample(0, 1, 200, [](double x) { return x; });
  const PureJumpFunction s = staircase_skeleton(f, eps, 1.0);
  ASSERT_GE(s.jumps().size(), 2u);
  const double w = omega(eps);
  const LimitSolution m = mu0({alpha0(), 1.0, 1.0 / w, 1.0});
  ASSERT_EQ(m.minimizer.jumps().size(), s.jumps().size());
  for (std::size_t k = 0; k < s.jumps().size(); ++k) {
    EXPECT_NEAR(s.jumps()[k].location, w * m.minimizer.jumps()[k].location, 1e-9);
    EXPECT_NEAR(s.jumps()[k].height, w * m.minimizer.jumps()[k].height, 1e-9);
  }
}

TEST(MinimizePmf, LinearForcingBracketAndRecoveryCeiling) {
  const double eps = 0.1, w = omega(eps);
  const SampledFunction f =
      SampledFunction::sample(0, 1, pmf_grid_size(eps), [](double x) { return x; });
  const SolveResult r = minimize_pmf(eps, 1.0, f, {});
  const double c1 = 10.0 * std::pow(2.0 / 27.0, 0.2);
  EXPECT_GE(r.energy.total / (w * w), 0.2 * c1);
  EXPECT_LE(r.energy.total / (w * w), 3.0 * c1);
  // one of the starting points is the recovery profile of the skeleton
  const RecoveryReport rec = recovery_with(staircase_skeleton(f, eps, 1.0), pmf_coefficients(eps, 1.0), f);
  EXPECT_LE(r.energy.total, eval_pmf(rec.profile, eps, 1.0, f).total);
}

TEST(MinimizeRpmf, ZeroForcingAndLengthScaling) {
  const double eps = 0.25;
  const SampledFunction z =
      SampledFunction::sample(0, 5, rpmf_grid_size(eps, 5), [](double) { return 0.0; });
  const SolveResult r = minimize_rpmf(eps, 1.0, z, {});
  EXPECT_EQ(r.energy.total, 0.0);
  for (double v : r.minimizer.values()) EXPECT_EQ(v, 0.0);

  const double M = 0.5;
  auto pinned = [&](double L) {
    const SampledFunction g =
        SampledFunction::sample(0, L, rpmf_grid_size(eps, L), [&](double y) { return M * y; });
    return minimize_rpmf(eps, 1.0, g, {}, BoundaryData{0.0, M, M * L, M}).energy.total;
  };
  const double L1 = 6.0, L2 = 8.0;
  EXPECT_LE(pinned(L2), 1.05 * std::pow(L2 / L1, 3) * pinned(L1));
}

TEST(Recovery, SingleUnitJumpRatio) {
  // eval_rpm / alpha0 for one unit jump; the ratio sits below one and climbs toward it
  const PureJumpFunction target(0.0, {{5.0, 1.0}}, {0.0, 10.0});
  double prev = 0.0;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const SampledFunction grid =
        SampledFunction::sample(0, 10, rpmf_grid_size(eps, 10), [](double) { return 0.0; });
    const RecoveryReport r = recovery_construction(target, eps, grid);
    const double ratio = eval_rpm(r.profile, eps) / alpha0();
    EXPECT_NEAR(ratio, 1.0 + r.delta, 1e-12);
    EXPECT_GT(ratio, prev);
    EXPECT_LT(ratio, 1.0);
    prev = ratio;
  }
  EXPECT_GT(prev, 0.9);
}

TEST(Recovery, ConstantTargetIsExact) {
  const PureJumpFunction target = PureJumpFunction::constant(1.5, {0.0, 3.0});
  const SampledFunction grid = SampledFunction::sample(0, 3, 301, [](double) { return 0.0; });
  const RecoveryReport r = recovery_construction(target, 0.1, grid);
  for (double v : r.profile.values()) EXPECT_EQ(v, 1.5);
  EXPECT_EQ(r.rpm, 0.0);
}

TEST(BoundaryPatch, ReferenceCertificates) {
  const PatchCertificate z = boundary_patch(0.0, 1.0, 0, 0, 0, 0, 0.1);
  for (double v : z.profile.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(z.rpm, 0.0);
  EXPECT_EQ(z.l2_squared, 0.0);

  const double eps = 0.05;
  const PatchCertificate p = boundary_patch(0.0, 10.0, 1.0, 0.0, 1.0, 0.0, eps);
  EXPECT_LE(eval_rpm(p.profile, eps), 80.0);
  EXPECT_NEAR(eval_rpm(p.profile, eps), p.rpm, 1e-12 * p.rpm);
  std::vector<double> sq(p.profile.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = p.profile[i] * p.profile[i];
  EXPECT_LE(trapezoid(sq, p.profile.spacing()), 10.0 * eps * eps);
}

TEST(MinimizePmf, MinimizerEquivarianceAndEnergyRecomputation) {
  const double eps = 0.3;
  const std::size_t n = pmf_grid_size(eps);
  auto f = [](double x) { return 1.5 * x - x * x * x / 14.0; };
  SolveOptions o;
  o.gradient_tolerance = 1e-9;
  const auto base = SampledFunction::sample(0, 1, n, f);
  const SolveResult r = minimize_pmf(eps, 1.0, base, o);
  EXPECT_NEAR(eval_pmf(r.minimizer, eps, 1.0, base).total, r.energy.total, 1e-12 * r.energy.total);
  const SolveResult s = minimize_pmf(eps, 1.0, SampledFunction::sample(0, 1, n, [&](double x) { return f(x) + 2.0; }), o);
  const SolveResult q = minimize_pmf(eps, 1.0, SampledFunction::sample(0, 1, n, [&](double x) { return f(1 - x); }), o);
  for (std::size_t i = 0; i < n; i += 37) {
    EXPECT_NEAR(s.minimizer[i], r.minimizer[i] + 2.0, 1e-6) << i;
    EXPECT_NEAR(q.minimizer[n - 1 - i], r.minimizer[i], 1e-6) << i;
  }
}
