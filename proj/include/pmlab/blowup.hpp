#pragma once

#include <string>
#include <vector>

#include "pmlab/pure_jump.hpp"
#include "pmlab/sampled_function.hpp"

namespace pmlab {

enum class BlowUpKind { fake, true_, lowres };

std::string to_string(BlowUpKind kind);

struct BlowUp {
  BlowUpKind kind = BlowUpKind::fake;
  double center = 0.5;
  double scale = 1.0;
  double eps = 0.5;
  SampledFunction profile;
};

/// Fake blow-up (u(c + omega y) - f(c)) / omega or true blow-up
/// (u(c + omega y) - u(c)) / omega on [-W, W], resampled linearly with the
/// original node density.
BlowUp extract_blowup(const SampledFunction& u, const SampledFunction& f, double center,
                      double eps, double halfwidth, BlowUpKind kind);

/// (u(c + a y) - u(c)) / a on [-W, W] for a scale a >= omega(eps); a = omega(eps)
/// gives the true blow-up.
BlowUp lowres_blowup(const SampledFunction& u, double center, double scale, double eps,
                     double halfwidth);

struct StaircaseFit {
  TranslationKind best_kind = TranslationKind::oblique;
  double tau0 = 0.0;
  double distance = 0.0;
  double step_length_estimate = 0.0;
  double step_height_estimate = 0.0;
  std::size_t detected_jumps = 0;
  double H = 1.0;
  double V = 0.0;
};

/// Fits translates of the staircase predicted by (beta, slope) to a blow-up:
/// oblique ones for fake blow-ups, horizontal and vertical ones for true
/// blow-ups, all kinds for low-resolution blow-ups. The window is shrunk by
/// H/2 at both sides.
StaircaseFit fit_staircase(const BlowUp& b, double beta, double slope_at_center);

/// Blow-up at a domain end (side 0: left, 1: right) compared with the
/// semi-entire minimizer of the limit problem; returns the strict distance on
/// [0, W - H/2] in the rescaled variable measured from the end.
double fit_boundary_staircase(const SampledFunction& u, const SampledFunction& f, double eps,
                              double beta, double slope, int side, double halfwidth);

/// Test functions phi(x, s, theta) built as products of factors from the
/// catalog: "one", "cos_theta", "sin_theta", "x_poly_k" (x^k), "s_poly_k" (s^k),
/// joined by '*', e.g. "x_poly_1*sin_theta".
class TestFunction {
 public:
  static TestFunction parse(const std::string& id);

  double operator()(double x, double s, double theta) const noexcept;
  const std::string& id() const noexcept { return id_; }

 private:
  enum class Factor { cos_theta, sin_theta, x_power, s_power };
  struct Term {
    Factor factor;
    int power;
  };
  std::string id_;
  std::vector<Term> terms_;
};

/// Integral over the grid interval of phi(x, u, arctan u') sqrt(1 + u'^2).
double varifold_pair(const SampledFunction& u, const TestFunction& phi);

/// Integral of phi(x, f, 0) plus the +-pi/2 branches weighted by |f'| on the
/// sets where f' is positive or negative. `df` may be null (then computed by
/// differences).
double varifold_limit(const SampledFunction& f, const SampledFunction* df,
                      const TestFunction& phi);

}  // namespace pmlab
