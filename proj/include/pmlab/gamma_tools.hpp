#pragma once

#include <cstddef>
#include <vector>

#include "pmlab/pure_jump.hpp"
#include "pmlab/sampled_function.hpp"

namespace pmlab {

/// Constant of the substitution lemma,
/// 4 (2/3)^(1/2) (log(1 + eps^-4 |log eps|^-8) / |log eps|)^(3/4).
double substitution_constant(double eps);

/// Slope threshold 1 / (eps^2 |log eps|^4) of the substitution lemma.
double substitution_threshold(double eps);

struct SubstitutionCertificate {
  PureJumpFunction skeleton = PureJumpFunction::constant(0.0, {0.0, 1.0});
  double M_n = 0.0;
  double rpm_value = 0.0;
  double jhalf_value = 0.0;
  double lp_gap = 0.0;  // L1 distance between u and the skeleton
  double tv_gap = 0.0;
  std::size_t clipped = 0;  // runs whose excess variation was negative

  /// rpm_value >= M_n * jhalf_value up to `rel_tol`.
  bool inequality_holds(double rel_tol = 1e-6) const;
};

/// Replaces the steep runs of `u` (|u'| above the threshold) by jumps at the
/// run midpoints whose heights are the variation over the run minus
/// threshold times run length. `u` is a function of the rescaled variable.
SubstitutionCertificate substitute(const SampledFunction& u, double eps);

/// Lower bound for the rescaled energy of a function whose slope stays above
/// D in absolute value, with equality at both ends. Throws naming the first
/// violating sample otherwise.
double basic_lower_bound(const SampledFunction& u, double eps, double D);

/// Exact L1 distance between two pure jump functions on a window.
double pj_l1_distance(const PureJumpFunction& u, const PureJumpFunction& v, Interval window);

struct LscReport {
  std::vector<double> jhalf;       // j_half of each term on the window
  std::vector<double> total_variation;
  std::vector<double> l1_to_limit;
  double liminf_jhalf = 0.0;       // minimum over the second half of the sequence
  double limit_jhalf = 0.0;
  double limit_total_variation = 0.0;
  bool converges_in_l1 = false;    // last L1 gap below tolerance and shrinking
  bool lsc_holds = false;          // liminf j_half >= j_half(limit)
  bool jhalf_converges = false;
  bool tv_converges = false;
  bool strict_implication = true;  // j_half converges => total variation converges
};

LscReport jhalf_lsc_probe(const std::vector<PureJumpFunction>& sequence,
                          const PureJumpFunction& limit, Interval window,
                          double tolerance = 1e-6);

}  // namespace pmlab
