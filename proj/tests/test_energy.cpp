#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "pmlab/banded.hpp"
#include "pmlab/energy.hpp"
#include "pmlab/error.hpp"
#include "pmlab/sampled_function.hpp"

using namespace pmlab;

namespace {

// Adaptive Simpson quadrature, used as an independent oracle.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-13, 50);
}

}  // namespace

TEST(Omega, MatchesDefinition) {
  EXPECT_DOUBLE_EQ(omega(0.1), 0.1 * std::sqrt(std::log(10.0)));
  EXPECT_NEAR(omega(std::exp(-4.0)), 2.0 * std::exp(-4.0), 1e-15);
  EXPECT_THROW(omega(0.0), Error);
  EXPECT_THROW(omega(1.0), Error);
}

TEST(Coefficients, RescalingIdentity) {
  // PMF(u) = omega^3 RPMF(w) for w(y) = u(omega y) / omega; checked on the coefficients
  const double eps = 0.13, w = omega(eps);
  const auto p = pmf_coefficients(eps, 2.0);
  const auto r = rpmf_coefficients(eps, 2.0);
  EXPECT_NEAR(p.bending, std::pow(w, 3) * r.bending * w, 1e-14 * p.bending);
  EXPECT_NEAR(p.log_weight * w, std::pow(w, 3) * r.log_weight, 1e-14);
}

TEST(EvalPmf, QuadraticAgainstAdaptiveSimpson) {
  const double eps = 0.3, beta = 2.0;
  const std::size_t n = 2001;
  const SampledFunction u = SampledFunction::sample(0, 1, n, [](double x) { return x * x; });
  const SampledFunction f = SampledFunction::sample(0, 1, n, [](double) { return 0.0; });
  const EnergyBreakdown e = eval_pmf(u, eps, beta, f);
  const double w = omega(eps);
  const double bend = std::pow(eps, 6) * std::pow(w, 4) * integrate([](double) { return 4.0; }, 0, 1);
  const double logt = integrate([](double x) { return std::log1p(4 * x * x); }, 0, 1);
  const double fid = beta * integrate([](double x) { return std::pow(x, 4); }, 0, 1);
  EXPECT_NEAR(e.bending, bend, 1e-9 * bend);
  EXPECT_NEAR(e.gradient_log, logt, 1e-6 * logt);
  EXPECT_NEAR(e.fidelity, fid, 1e-6 * fid);
  EXPECT_NEAR(e.total, e.bending + e.gradient_log + e.fidelity, 1e-15);
  // closed form for the log term as a cross-check of the oracle
  EXPECT_NEAR(logt, std::log(5.0) - 2.0 + std::atan(2.0), 1e-12);
}

TEST(EvalPmf, GridMismatchIsShapeError) {
  const SampledFunction u = SampledFunction::sample(0, 1, 11, [](double x) { return x; });
  const SampledFunction f = SampledFunction::sample(0, 1, 12, [](double x) { return x; });
  try {
    eval_pmf(u, 0.1, 1.0, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
}

TEST(EvalRpm, ConstantHasZeroEnergy) {
  const SampledFunction v = SampledFunction::sample(0, 5, 101, [](double) { return 3.0; });
  EXPECT_NEAR(eval_rpm(v, 0.2), 0.0, 1e-24);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  const std::size_t n = 60;
  const double h = 0.05;
  std::vector<double> u(n), f(n), g(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::sin(0.3 * double(i)) + 0.1 * U(rng);
    f[i] = U(rng);
  }
  const EnergyCoefficients c{1e-2, 0.7, 1.3};
  evaluate_energy_gradient(u, h, c, f, g);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 1e-6;
    auto up = u, um = u;
    up[i] += d;
    um[i] -= d;
    const double fd = (evaluate_energy(up, h, c, f).total - evaluate_energy(um, h, c, f).total) / (2 * d);
    EXPECT_NEAR(g[i], fd, 1e-7 * (1 + std::fabs(fd))) << "node " << i;
  }
}

TEST(Hessian, MatchesDifferencesOfGradient) {
  const std::size_t n = 30;
  const double h = 0.1;
  std::vector<double> u(n), f(n, 0.2), g0(n), gp(n), gm(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::cos(0.5 * double(i));
  const EnergyCoefficients c{1e-3, 1.0, 0.5};
  SymmetricBandedMatrix H(n, 3);
  assemble_hessian(u, h, c, false, H);
  for (std::size_t j = 0; j < n; ++j) {
    auto up = u, um = u;
    const double d = 1e-6;
    up[j] += d;
    um[j] -= d;
    evaluate_energy_gradient(up, h, c, f, gp);
    evaluate_energy_gradient(um, h, c, f, gm);
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = (gp[i] - gm[i]) / (2 * d);
      const double an = (i > j ? i - j : j - i) <= 3 ? H.get(i, j) : 0.0;
      EXPECT_NEAR(an, fd, 1e-5 * (1 + std::fabs(fd))) << i << "," << j;
    }
  }
}

TEST(Hessian, ConvexifiedIsPositiveDefinite) {
  const std::size_t n = 40;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (i % 7 < 3) ? 0.0 : 5.0;  // steep, concave region of the log
  SymmetricBandedMatrix H(n, 3);
  assemble_hessian(u, 0.01, {1e-8, 1.0, 1.0}, true, H);
  EXPECT_TRUE(H.factorize());
}

TEST(Banded, SolveMatchesDenseElimination) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  const std::size_t n = 25, p = 3;
  SymmetricBandedMatrix A(n, p);
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    A.add(i, i, 10.0);
    D[i][i] += 10.0;
    for (std::size_t k = 1; k <= p && k <= i; ++k) {
      const double v = U(rng);
      A.add(i, i - k, v);
      D[i][i - k] += v;
      D[i - k][i] += v;
    }
  }
  std::vector<double> b(n), x(n);
  for (auto& v : b) v = U(rng);
  x = b;
  ASSERT_TRUE(A.factorize());
  A.solve(x);
  // dense Gaussian elimination with partial pivoting
  auto M = D;
  auto y = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(M[i][k]) > std::fabs(M[piv][k])) piv = i;
    std::swap(M[k], M[piv]);
    std::swap(y[k], y[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = M[i][k] / M[k][k];
      for (std::size_t j = k; j < n; ++j) M[i][j] -= l * M[k][j];
      y[i] -= l * y[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = k + 1; j < n; ++j) y[k] -= M[k][j] * y[j];
    y[k] /= M[k][k];
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], y[i], 1e-12);
}

TEST(Banded, IndefiniteFailsToFactorize) {
  SymmetricBandedMatrix A(3, 1);
  A.add(0, 0, 1.0);
  A.add(1, 1, -1.0);
  A.add(2, 2, 1.0);
  EXPECT_FALSE(A.factorize());
}

TEST(CubicInterpolant, HermiteDataAndBending) {
  const double a = 0.5, b = 2.0;
  const CubicSolution s = cubic_interpolant(a, b, 1.0, -2.0, 3.0, 0.5);
  EXPECT_NEAR(s.value(a), 1.0, 1e-12);
  EXPECT_NEAR(s.slope(a), -2.0, 1e-12);
  EXPECT_NEAR(s.value(b), 3.0, 1e-12);
  EXPECT_NEAR(s.slope(b), 0.5, 1e-12);
  const double bend = integrate([&](double y) { return std::pow(s.curvature(y), 2); }, a, b);
  EXPECT_NEAR(s.min_bending, bend, 1e-10 * bend);
  // sup bounds are bounds
  for (int k = 0; k <= 100; ++k) {
    const double y = a + (b - a) * k / 100.0;
    EXPECT_LE(std::fabs(s.value(y)), s.sup_value_bound + 1e-12);
    EXPECT_LE(std::fabs(s.slope(y)), s.sup_slope_bound + 1e-12);
  }
}

TEST(CubicInterpolant, ZeroDataGivesZero) {
  const CubicSolution s = cubic_interpolant(0, 1, 0, 0, 0, 0);
  EXPECT_EQ(s.min_bending, 0.0);
  EXPECT_EQ(s.value(0.3), 0.0);
}

TEST(Derivatives, ExactOnQuadratics) {
  const SampledFunction u = SampledFunction::sample(-1, 2, 31, [](double x) { return 3 * x * x - x; });
  const auto d1 = first_derivative(u.values(), u.spacing());
  const auto d2 = second_derivative(u.values(), u.spacing());
  for (std::size_t i = 0; i < u.size(); ++i) {
    EXPECT_NEAR(d1[i], 6 * u.x(i) - 1, 1e-10);
    EXPECT_NEAR(d2[i], 6.0, 1e-9);
  }
}

TEST(Omega, ReferenceValuesAndMonotonicity) {
  EXPECT_NEAR(omega(std::exp(-1.0)), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(omega(0.01), 0.021460, 5e-7);
  double prev = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double w = omega(std::exp(-1.0) * k / 1000.0);
    EXPECT_GT(w, prev);
    prev = w;
  }
  EXPECT_LT(omega(1e-12), 1e-10);
}

TEST(EvalPmf, IdentityOnTheDiagonal) {
  const SampledFunction u = SampledFunction::sample(0, 1, 501, [](double x) { return x; });
  for (double eps : {0.3, 0.05}) {
    const EnergyBreakdown e = eval_pmf(u, eps, 1.7, u);
    EXPECT_NEAR(e.bending, 0.0, 1e-18);
    EXPECT_NEAR(e.gradient_log, std::log(2.0), 1e-12);
    EXPECT_EQ(e.fidelity, 0.0);
  }
}

TEST(EvalPmf, QuadraticOnFineGrid) {
  const double eps = 0.1, w = omega(eps);
  const SampledFunction u = SampledFunction::sample(0, 1, 10000, [](double x) { return x * x; });
  const SampledFunction f = SampledFunction::sample(0, 1, 10000, [](double) { return 0.0; });
  const double exact = std::pow(eps, 6) * std::pow(w, 4) * 4.0 +
                       integrate([](double x) { return std::log1p(4 * x * x); }, 0, 1) + 0.2;
  EXPECT_NEAR(eval_pmf(u, eps, 1.0, f).total, exact, 1e-4 * exact);
}

TEST(EvalRpm, LineAndConstantValues) {
  const double eps = 0.07, L = 3.0, w = omega(eps);
  const SampledFunction v = SampledFunction::sample(0, L, 301, [](double x) { return x; });
  EXPECT_NEAR(eval_rpm(v, eps), L / (w * w) * std::log(2.0), 1e-10);
}

TEST(CubicInterpolant, ReferenceBendingValues) {
  EXPECT_EQ(cubic_interpolant(0, 1, 0, 0, 1, 0).min_bending, 12.0);
  const CubicSolution c = cubic_interpolant(-1, 2, 0.4, 0, 0.4, 0);
  EXPECT_EQ(c.min_bending, 0.0);
  EXPECT_EQ(c.value(0.5), 0.4);
}

TEST(EvalPmf, RescalingIdentity) {
  const double eps = 0.08, beta = 1.6, w = omega(eps), x0 = 0.37;
  const std::size_t n = 3001;
  const SampledFunction u = SampledFunction::sample(0, 1, n, [](double x) { return std::sin(5 * x) + x * x; });
  const SampledFunction f = SampledFunction::sample(0, 1, n, [](double x) { return 2 * x - 0.3; });
  const double f0 = 2 * x0 - 0.3;
  std::vector<double> wv(n), gv(n);
  for (std::size_t i = 0; i < n; ++i) {
    wv[i] = (u[i] - f0) / w;
    gv[i] = (f[i] - f0) / w;
  }
  const SampledFunction W(-x0 / w, u.spacing() / w, wv), G(-x0 / w, u.spacing() / w, gv);
  const double lhs = eval_pmf(u, eps, beta, f).total;
  const double rhs = std::pow(w, 3) * eval_rpmf(W, eps, beta, G).total;
  EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
}

TEST(EvalPmf, AdditiveOverAdjacentIntervals) {
  const double eps = 0.2, beta = 1.0;
  const auto fn = [](double x) { return std::cos(4 * x); };
  const auto fo = [](double x) { return x; };
  const std::size_t n = 2001;  // node 1000 sits at x = 0.5
  const auto whole = eval_pmf(SampledFunction::sample(0, 1, n, fn), eps, beta,
                              SampledFunction::sample(0, 1, n, fo));
  const auto left = eval_pmf(SampledFunction::sample(0, 0.5, 1001, fn), eps, beta,
                             SampledFunction::sample(0, 0.5, 1001, fo));
  const auto right = eval_pmf(SampledFunction::sample(0.5, 1, 1001, fn), eps, beta,
                              SampledFunction::sample(0.5, 1, 1001, fo));
  const double h = 1.0 / double(n - 1);
  const double max_integrand = std::log1p(16.0) + beta * 4.0 + 1.0;
  EXPECT_NEAR(whole.total, left.total + right.total, 2 * h * max_integrand);
  EXPECT_GE(whole.bending, 0.0);
  EXPECT_GE(whole.gradient_log, 0.0);
  EXPECT_GE(whole.fidelity, 0.0);
  EXPECT_THROW(SampledFunction::sample(0, 1, 2, fn), Error);
}

TEST(CubicInterpolant, BendingIsALowerBound) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int k = 0; k < 10; ++k) {
    const double A0 = U(rng), A1 = U(rng), B0 = U(rng), B1 = U(rng);
    const CubicSolution c = cubic_interpolant(0, 1, A0, A1, B0, B1);
    const double d = U(rng);
    // perturbation with vanishing values and slopes at both ends
    const SampledFunction u = SampledFunction::sample(0, 1, 4001, [&](double t) {
      return c.value(t) + d * t * t * (1 - t) * (1 - t) * (1 + t);
    });
    const auto d2 = second_derivative(u.values(), u.spacing());
    std::vector<double> sq(d2.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = d2[i] * d2[i];
    EXPECT_GE(trapezoid(sq, u.spacing()), c.min_bending * (1 - 1e-6)) << k;
  }
}
