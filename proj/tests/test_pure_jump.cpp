#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pmlab/error.hpp"
#include "pmlab/limit_solver.hpp"
#include "pmlab/pure_jump.hpp"

using namespace pmlab;

namespace {

// Midpoint sum of |u_interp - v| on a much finer grid than u's.
double l1_by_sampling(const SampledFunction& u, const PureJumpFunction& v, Interval w, int n) {
  const double h = w.length() / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = w.a + (k + 0.5) * h;
    s += std::fabs(u.interpolate(x) - v.value(x)) * h;
  }
  return s;
}

}  // namespace

TEST(PureJump, ValuesAreRightContinuous) {
  const PureJumpFunction u(1.0, {{0.2, -1.0}, {0.5, 2.0}}, {0.0, 1.0});
  EXPECT_EQ(u.value(0.1), 1.0);
  EXPECT_EQ(u.value(0.2), 0.0);
  EXPECT_EQ(u.value(0.49), 0.0);
  EXPECT_EQ(u.value(0.5), 2.0);
  EXPECT_EQ(u.right_value(), 2.0);
  EXPECT_EQ(u.total_variation(), 3.0);
}

TEST(PureJump, RejectsJumpsOutsideDomain) {
  EXPECT_THROW(PureJumpFunction(0.0, {{1.5, 1.0}}, {0.0, 1.0}), Error);
  EXPECT_THROW(PureJumpFunction(0.0, {{0.5, 1.0}, {0.2, 1.0}}, {0.0, 1.0}), Error);
}

TEST(PureJump, JHalfCountsInteriorJumps) {
  const PureJumpFunction u(0.0, {{0.2, 4.0}, {0.5, -9.0}, {0.9, 1.0}}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(j_half(u, {0.0, 1.0}), 2.0 + 3.0 + 1.0);
  EXPECT_DOUBLE_EQ(j_half(u, {0.3, 0.8}), 3.0);
}

TEST(PureJump, FidelityAgainstSampling) {
  const PureJumpFunction u(0.3, {{0.25, 1.0}, {0.7, -0.4}}, {0.0, 1.0});
  const LinearForcing f{1.3, -0.2};
  const int n = 400000;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = (k + 0.5) / n;
    s += std::pow(u.value(x) - f(x), 2) / n;
  }
  EXPECT_NEAR(fidelity_integral(u, f, {0.0, 1.0}), s, 1e-9);
  const PureJumpFunction g(0.0, {{0.5, 1.0}}, {0.0, 1.0});
  double s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = (k + 0.5) / n;
    s2 += std::pow(u.value(x) - g.value(x), 2) / n;
  }
  EXPECT_NEAR(fidelity_integral(u, g, {0.0, 1.0}), s2, 1e-9);
  EXPECT_NEAR(jf_half(u, 2.0, 3.0, f, {0.0, 1.0}),
              2.0 * j_half(u, {0.0, 1.0}) + 3.0 * fidelity_integral(u, f, {0.0, 1.0}), 1e-12);
}

TEST(PureJump, TruncationKeepsLargestJumps) {
  std::vector<Jump> js;
  for (int k = 1; k <= 10; ++k) js.push_back({0.05 * k, std::pow(0.5, k)});
  double tail = 0.0;
  const PureJumpFunction t = truncate_jumps(0.0, js, {0.0, 1.0}, 3, &tail);
  ASSERT_EQ(t.jumps().size(), 3u);
  EXPECT_DOUBLE_EQ(t.jumps()[0].height, 0.5);
  EXPECT_NEAR(tail, 0.125 - std::pow(0.5, 10), 1e-15);
}

TEST(Staircase, UnitAndCanonicalValues) {
  EXPECT_EQ(unit_staircase(0.0), 0.0);
  EXPECT_EQ(unit_staircase(0.99), 0.0);
  EXPECT_EQ(unit_staircase(1.0), 2.0);
  EXPECT_EQ(unit_staircase(-1.01), -2.0);
  const Staircase s = canonical_staircase(2.0, 3.0);
  // plateau midpoints lie on the line V x / H
  for (int k = -3; k <= 3; ++k) EXPECT_NEAR(s.value(4.0 * k), 3.0 * 4.0 * k / 2.0, 1e-12);
  const auto pj = s.on_window({-5.0, 5.0});
  ASSERT_EQ(pj.jumps().size(), 2u);  // at -2 and 2
  for (const auto& j : pj.jumps()) EXPECT_DOUBLE_EQ(j.height, 6.0);
}

TEST(Staircase, TranslationFamilies) {
  const double H = 1.5, V = 0.7, t = 0.3;
  const Staircase c = canonical_staircase(H, V);
  const Staircase ob = translate(H, V, TranslationKind::oblique, t);
  const Staircase ho = translate(H, V, TranslationKind::horizontal, t);
  const Staircase ve = translate(H, V, TranslationKind::vertical, t);
  for (double x : {-2.9, -0.4, 0.1, 1.7, 3.3}) {
    EXPECT_NEAR(ob.value(x), c.value(x - t * H) + t * V, 1e-12);
    EXPECT_NEAR(ho.value(x), c.value(x - t * H), 1e-12);
    EXPECT_NEAR(ve.value(x), c.value(x - H) + (1 - t) * V, 1e-12);
  }
}

TEST(Staircase, ParamsFormula) {
  const auto p = staircase_params(2.0, 0.5);
  EXPECT_NEAR(p.H, std::pow(24.0 / (4.0 * 0.125), 0.2), 1e-12);
  EXPECT_NEAR(p.V, 0.5 * p.H, 1e-12);
  EXPECT_TRUE(staircase_params(1.0, 0.0).degenerate());
  const auto g = staircase_params_general(1.0, 1.0, 1.0);
  EXPECT_NEAR(g.H, 0.5 * std::pow(9.0, 0.2), 1e-12);
}

TEST(SemiEntire, FirstPlateauOffset) {
  const auto p = staircase_params_general(alpha0(), 1.0, 1.0);
  const PureJumpFunction s = semi_entire_minimizer(alpha0(), 1.0, 1.0, 20.0);
  const double z0 = std::sqrt(5.0 / 3.0) * p.H;
  EXPECT_NEAR(s.base(), z0, 1e-12);
  ASSERT_FALSE(s.jumps().empty());
  EXPECT_NEAR(s.jumps()[0].location, z0 + p.H, 1e-12);
  for (std::size_t k = 1; k < s.jumps().size(); ++k)
    EXPECT_NEAR(s.jumps()[k].location - s.jumps()[k - 1].location, 2 * p.H, 1e-12);
}

TEST(StrictDistance, AgainstFineSampling) {
  const SampledFunction u =
      SampledFunction::sample(0.0, 4.0, 801, [](double x) { return std::sin(x) + 0.3 * x; });
  const PureJumpFunction v(0.1, {{1.003, 0.8}, {2.517, -0.4}}, {0.0, 4.0});
  const Interval w{0.25, 3.75};
  const StrictGap g = strict_distance(u, v, w);
  EXPECT_NEAR(g.l1_gap, l1_by_sampling(u, v, w, 2000000), 1e-6);
  EXPECT_NEAR(g.tv_gap, std::fabs(discrete_total_variation(u, w) - 1.2), 1e-12);
}

TEST(StrictDistance, EndpointOnJumpIsAnError) {
  const SampledFunction u = SampledFunction::sample(0.0, 1.0, 11, [](double x) { return x; });
  const PureJumpFunction v(0.0, {{0.5, 1.0}}, {0.0, 1.0});
  EXPECT_THROW(strict_distance(u, v, {0.5, 1.0}), Error);
}

TEST(DiscreteTotalVariation, PartialCells) {
  const SampledFunction u = SampledFunction::sample(0.0, 1.0, 3, [](double x) { return x < 0.75 ? 2 * x : 1.0; });
  // nodes 0, 0.5, 1 with values 0, 1, 1
  EXPECT_NEAR(discrete_total_variation(u, {0.0, 1.0}), 1.0, 1e-15);
  EXPECT_NEAR(discrete_total_variation(u, {0.25, 1.0}), 0.5, 1e-15);
}

TEST(NearestTranslation, RecoversKnownShift) {
  const double H = 1.2, V = 0.9, tau = 0.37;
  const Staircase s = translate(H, V, TranslationKind::oblique, tau);
  const SampledFunction u = SampledFunction::sample(-6.0, 6.0, 24001, [&](double x) { return s.value(x); });
  const TranslationFit f = nearest_translation(u, H, V, TranslationKind::oblique, {-5.0, 5.0});
  EXPECT_NEAR(f.tau0, tau, 2e-3);
  EXPECT_LT(f.distance, 5e-3);
}

TEST(NearestTranslation, DegenerateIsL1Norm) {
  const SampledFunction u = SampledFunction::sample(0.0, 2.0, 201, [](double x) { return x - 1.0; });
  const TranslationFit f = nearest_translation(u, 1.0, 0.0, TranslationKind::oblique, {0.0, 2.0});
  EXPECT_NEAR(f.distance, 1.0, 1e-12);
}

TEST(Serialization, RoundTrip) {
  const PureJumpFunction u(0.5, {{0.1, 1.0}, {0.6, -0.25}}, {0.0, 2.0});
  nlohmann::json j;
  to_json(j, u);
  const PureJumpFunction v = pure_jump_from_json(j);
  EXPECT_EQ(v.base(), u.base());
  ASSERT_EQ(v.jumps().size(), 2u);
  EXPECT_EQ(v.jumps()[1].height, -0.25);
  EXPECT_EQ(v.domain().b, 2.0);

  const StaircaseSpec s{1.5, -0.5, TranslationKind::vertical, 0.25};
  nlohmann::json k;
  to_json(k, s);
  const StaircaseSpec t = staircase_spec_from_json(k);
  EXPECT_EQ(t.H, 1.5);
  EXPECT_EQ(t.V, -0.5);
  EXPECT_EQ(t.kind, TranslationKind::vertical);
  EXPECT_EQ(t.tau0, 0.25);
  EXPECT_THROW(translation_kind_from_string("diagonal"), Error);
}

TEST(PureJump, ReferenceValues) {
  const PureJumpFunction c = PureJumpFunction::constant(0.7, {0.0, 1.0});
  EXPECT_EQ(c.value(0.3), 0.7);
  EXPECT_EQ(j_half(c, {0.0, 1.0}), 0.0);
  const PureJumpFunction u(0.0, {{0.5, 2.0}}, {0.0, 1.0});
  EXPECT_EQ(u.value(0.25), 0.0);
  EXPECT_EQ(u.value(0.75), 2.0);
  const PureJumpFunction v(-1.0, {{0.2, 1.0}, {0.6, 4.0}}, {0.0, 1.0});
  EXPECT_EQ(v.value(0.0), -1.0);
  EXPECT_EQ(v.right_value(), -1.0 + 5.0);
  EXPECT_EQ(j_half(v, {0.0, 1.0}), 3.0);
  // merging both jumps into one never raises j_half
  const PureJumpFunction m(-1.0, {{0.4, 5.0}}, {0.0, 1.0});
  EXPECT_LE(j_half(m, {0.0, 1.0}), j_half(v, {0.0, 1.0}));
}

TEST(Fidelity, ReferenceValues) {
  const double beta = 1.3, L = 2.5;
  const PureJumpFunction z = PureJumpFunction::constant(0.0, {0.0, L});
  EXPECT_EQ(fidelity_integral(z, LinearForcing{0.0, 0.0}, {0.0, L}), 0.0);
  EXPECT_NEAR(beta * fidelity_integral(z, LinearForcing{1.0, 0.0}, {0.0, L}), beta * L * L * L / 3.0,
              1e-12);
  // one full step of the canonical staircase against the line M x
  const double H = 1.4, M = 0.6;
  const PureJumpFunction s = canonical_staircase(H, M * H).on_window({-H, H});
  EXPECT_NEAR(beta * fidelity_integral(s, LinearForcing{M, 0.0}, {-H, H}),
              beta * M * M * std::pow(2 * H, 3) / 12.0, 1e-12);
}

TEST(Staircase, ReferenceValuesAndPeriodicity) {
  const Staircase s = canonical_staircase(1.0, 1.0);
  EXPECT_EQ(s.value(0.0), 0.0);
  EXPECT_EQ(s.value(1.5), 2.0);
  const auto pj = s.on_window({0.0, 1.9});
  ASSERT_EQ(pj.jumps().size(), 1u);
  EXPECT_EQ(pj.jumps()[0].location, 1.0);
  EXPECT_EQ(pj.jumps()[0].height, 2.0);
  const Staircase t = canonical_staircase(0.8, 0.3);
  for (double x : {-3.3, -0.1, 0.5, 2.9}) EXPECT_NEAR(t.value(x + 1.6), t.value(x) + 0.6, 1e-12);
  const Staircase z = canonical_staircase(2.0, 0.0);
  for (double x : {-5.0, 0.3, 7.7}) EXPECT_EQ(z.value(x), 0.0);
}

TEST(Staircase, ParamsReferenceValues) {
  const auto p = staircase_params(1.0, 1.0);
  EXPECT_NEAR(p.H, std::pow(24.0, 0.2), 1e-12);
  EXPECT_NEAR(p.H, 1.88818, 1e-5);
  EXPECT_EQ(p.V, p.H);
  for (double b : {0.5, 2.0})
    for (double m : {-1.5, 0.3}) {
      const auto q = staircase_params(b, m), r = staircase_params_general(alpha0(), b, m);
      EXPECT_NEAR(q.H, r.H, 1e-12 * q.H);
      EXPECT_NEAR(q.V, r.V, 1e-12 * std::fabs(q.V));
    }
  EXPECT_EQ(canonical_staircase(staircase_params(1.0, 0.0).H, 0.0).value(3.0), 0.0);
}

TEST(Staircase, TranslationCoincidences) {
  const double H = 1.1, V = 0.6;
  const Staircase c = canonical_staircase(H, V);
  const Staircase o0 = translate(H, V, TranslationKind::oblique, 0.0);
  for (int k = 0; k < 200; ++k) {
    const double x = -5.0 + 10.0 * (k + 0.37) / 200;
    EXPECT_EQ(o0.value(x), c.value(x));
    for (double t : {-1.0, 1.0})
      EXPECT_NEAR(translate(H, V, TranslationKind::horizontal, t).value(x),
                  translate(H, V, TranslationKind::vertical, t).value(x), 1e-12);
    EXPECT_NEAR(translate(H, V, TranslationKind::oblique, 1.0).value(x),
                translate(H, V, TranslationKind::oblique, -1.0).value(x), 1e-12);
  }
}

TEST(SemiEntire, ZeroSlopeAndStationarity) {
  const PureJumpFunction z = semi_entire_minimizer(alpha0(), 1.0, 0.0, 10.0);
  EXPECT_TRUE(z.jumps().empty());
  EXPECT_EQ(z.base(), 0.0);
  for (double b : {0.5, 2.0}) {
    const double H = staircase_params_general(alpha0(), b, 1.0).H;
    const double z0 = std::sqrt(5.0 / 3.0) * H, d = 1e-5;
    const double fd = (semi_entire_phi(alpha0(), b, 1.0, z0, d) -
                       semi_entire_phi(alpha0(), b, 1.0, z0, -d)) / (2 * d);
    EXPECT_NEAR(fd, 0.0, 1e-8);
  }
}

TEST(StrictDistance, ReferenceCases) {
  const PureJumpFunction v(0.2, {{1.0, 1.0}, {2.5, -0.5}}, {0.0, 4.0});
  const Interval w{0.3, 3.7};
  const SampledFunction u = SampledFunction::sample(0, 4, 4001, [&](double x) { return v.value(x); });
  const StrictGap g = strict_distance(u, v, w);
  EXPECT_LE(g.l1_gap, 2 * u.spacing() * 1.5);
  EXPECT_LE(g.tv_gap, 2 * u.spacing() * 1.5);
  const double delta = 0.05;
  const SampledFunction ud =
      SampledFunction::sample(0, 4, 4001, [&](double x) { return v.value(x) + delta; });
  const StrictGap gd = strict_distance(ud, v, w);
  EXPECT_NEAR(gd.l1_gap, delta * w.length(), 2 * u.spacing() * 1.5);
  EXPECT_NEAR(gd.tv_gap, 0.0, 1e-12);
  // linear ramps of width h around each jump: no TV gap, L1 gap J h / 4 per jump
  const double h = 0.02;
  const SampledFunction r = SampledFunction::sample(0, 4, 40001, [&](double x) {
    double s = 0.2;
    for (const auto& j : v.jumps()) s += j.height * std::clamp((x - j.location) / h + 0.5, 0.0, 1.0);
    return s;
  });
  const StrictGap gr = strict_distance(r, v, w);
  EXPECT_NEAR(gr.tv_gap, 0.0, 1e-12);
  EXPECT_NEAR(gr.l1_gap, (1.0 + 0.5) * h / 4, 1e-6);
}

TEST(NearestTranslation, ReferenceFits) {
  const double H = 1.2, V = 0.9;
  const Staircase s = translate(H, V, TranslationKind::oblique, 0.3);
  const SampledFunction u = SampledFunction::sample(-8.0, 8.0, 32001, [&](double x) { return s.value(x); });
  const TranslationFit f = nearest_translation(u, H, V, TranslationKind::oblique, {-6.0, 6.0});
  EXPECT_NEAR(f.tau0, 0.3, 1e-2);
  EXPECT_LT(f.distance, 10 * u.spacing() * V);
  // the line V x / H is equally far from every oblique translate
  const SampledFunction line = SampledFunction::sample(-8.0, 8.0, 32001, [&](double x) { return V * x / H; });
  const Interval w{-4 * H, 4 * H};
  const TranslationFit fl = nearest_translation(line, H, V, TranslationKind::oblique, w);
  const double per_period = V * H;  // integral of |V x / H| over one step
  EXPECT_NEAR(fl.distance, 4 * per_period, 0.3 * per_period);
  const TranslationFit z = nearest_translation(u, H, 0.0, TranslationKind::oblique, {-6.0, 6.0});
  EXPECT_EQ(z.tau0, 0.0);
}

TEST(Staircase, TranslatesArePeriodicModuloTheLine) {
  const double H = 0.9, V = 1.3;
  for (auto kind : {TranslationKind::oblique, TranslationKind::horizontal, TranslationKind::vertical})
    for (double t : {-0.6, 0.2, 0.95}) {
      const Staircase s = translate(H, V, kind, t);
      for (double x : {-2.11, 0.03, 1.47}) EXPECT_NEAR(s.value(x + 2 * H), s.value(x) + 2 * V, 1e-12);
    }
  const Staircase c = canonical_staircase(H, V);
  for (int k = -4; k <= 4; ++k) EXPECT_EQ(c.value(2 * k * H), 2 * k * V);
}
