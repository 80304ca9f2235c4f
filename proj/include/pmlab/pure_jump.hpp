#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pmlab/sampled_function.hpp"

namespace pmlab {

struct Jump {
  double location = 0.0;
  double height = 0.0;
};

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double length() const noexcept { return b - a; }
};

/// u(x) = base + sum over jumps with location <= x of height, on (a, b).
///
/// Values are right-continuous: at a jump location the right limit is
/// returned. The boundary values are u(a) = base and u(b) = base + sum of
/// heights.
class PureJumpFunction {
 public:
  PureJumpFunction(double base, std::vector<Jump> jumps, Interval domain);

  static PureJumpFunction constant(double value, Interval domain) {
    return PureJumpFunction(value, {}, domain);
  }

  double base() const noexcept { return base_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  const Interval& domain() const noexcept { return domain_; }

  double value(double x) const;
  double left_value() const noexcept { return base_; }
  double right_value() const noexcept;
  double total_variation() const noexcept;

  /// Restriction to a sub-interval; the base becomes the value just after `window.a`.
  PureJumpFunction restricted(Interval window) const;

  /// Index of the plateau containing x (0 .. jumps().size()).
  std::size_t plateau_index(double x) const noexcept;
  /// Level of plateau k (k = 0 is the base).
  double plateau_level(std::size_t k) const noexcept;

 private:
  double base_;
  std::vector<Jump> jumps_;
  Interval domain_;
  std::vector<double> prefix_;  // prefix_[k] = base + sum of first k heights
};

/// Keeps the `max_jumps` largest jumps of a (possibly long) jump list. The
/// dropped heights are reported through `tail_bound` (sum of their absolute
/// values, an upper bound for the sup-distance to the untruncated function).
PureJumpFunction truncate_jumps(double base, std::vector<Jump> jumps, Interval domain,
                                std::size_t max_jumps, double* tail_bound);

/// Sum of |J|^(1/2) over jumps strictly inside `window`.
double j_half(const PureJumpFunction& u, Interval window);

/// Linear forcing slope * x + intercept.
struct LinearForcing {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double x) const noexcept { return slope * x + intercept; }
};

using LimitForcing = std::variant<LinearForcing, PureJumpFunction>;

/// Exact integral of (u - f)^2 over `window`.
double fidelity_integral(const PureJumpFunction& u, const LimitForcing& f, Interval window);

/// alpha * j_half + beta * integral of (u - f)^2 over `window`, in closed form.
double jf_half(const PureJumpFunction& u, double alpha, double beta, const LimitForcing& f,
               Interval window);

enum class TranslationKind { oblique, horizontal, vertical };

std::string to_string(TranslationKind kind);
TranslationKind translation_kind_from_string(const std::string& s);

struct StaircaseSpec {
  double H = 1.0;
  double V = 0.0;
  TranslationKind kind = TranslationKind::oblique;
  double tau0 = 0.0;
};

/// A translate of the canonical (H,V)-staircase S_{H,V}(x) = V * 2 floor((x/H + 1)/2),
/// evaluable on the whole line.
class Staircase {
 public:
  explicit Staircase(StaircaseSpec spec);

  const StaircaseSpec& spec() const noexcept { return spec_; }
  bool degenerate() const noexcept { return spec_.V == 0.0; }

  double value(double x) const noexcept;
  /// Jump locations are shift + (2k+1) H, all with height 2V.
  double shift() const noexcept;
  double vertical_offset() const noexcept;

  /// Pure jump function with the jumps inside `domain`.
  PureJumpFunction on_window(Interval domain) const;

 private:
  StaircaseSpec spec_;
};

/// S(x) = 2 floor((x + 1) / 2).
double unit_staircase(double x) noexcept;

Staircase canonical_staircase(double H, double V);

struct StaircaseParams {
  double H = 1.0;
  double V = 0.0;
  bool degenerate() const noexcept { return V == 0.0; }
};

/// H = (24 / (beta^2 |slope|^3))^(1/5), V = slope * H; degenerate (V = 0,
/// H = 1) for zero slope.
StaircaseParams staircase_params(double beta, double slope);
/// H = (1/2) (9 alpha^2 / (beta^2 |M|^3))^(1/5), V = M H.
StaircaseParams staircase_params_general(double alpha, double beta, double M);

Staircase translate(double H, double V, TranslationKind kind, double tau0);

/// Half-length of the first plateau of the semi-entire minimizer, sqrt(5/3) H.
double semi_entire_offset(double H);

/// Right-hand semi-entire local minimizer restricted to (0, L).
PureJumpFunction semi_entire_minimizer(double alpha, double beta, double M, double L);

/// Energy of the first period of the semi-entire minimizer when the first
/// plateau is raised by M * tau (the function whose derivative at tau = 0
/// vanishes exactly when the first intersection is sqrt(5/3) H).
double semi_entire_phi(double alpha, double beta, double M, double z0, double tau);

struct StrictGap {
  double l1_gap = 0.0;
  double tv_gap = 0.0;
  double sum() const noexcept { return l1_gap + tv_gap; }
};

/// L1 distance and total-variation mismatch between the piecewise-linear
/// interpolant of `u` and `v` over `window`. Fails when a window endpoint is a
/// jump point of v (the message suggests a shift).
StrictGap strict_distance(const SampledFunction& u, const PureJumpFunction& v, Interval window);

/// Discrete total variation of the piecewise-linear interpolant over `window`.
double discrete_total_variation(const SampledFunction& u, Interval window);

struct TranslationFit {
  double tau0 = 0.0;
  double distance = 0.0;
};

/// Best translate of the (H,V)-staircase of the given kind in the strict
/// distance: 401-point scan of [-1,1] followed by golden-section refinement.
/// For V = 0 the distance is the L1 norm of u on the window.
TranslationFit nearest_translation(const SampledFunction& u, double H, double V,
                                   TranslationKind kind, Interval window);

void to_json(nlohmann::json& j, const PureJumpFunction& u);
PureJumpFunction pure_jump_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const StaircaseSpec& s);
StaircaseSpec staircase_spec_from_json(const nlohmann::json& j);

}  // namespace pmlab
