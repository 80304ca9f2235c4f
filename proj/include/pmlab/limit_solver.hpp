#pragma once

#include <cstddef>

#include "pmlab/pure_jump.hpp"

namespace pmlab {

/// 16 / sqrt(3), the constant of the Gamma-limit of the rescaled energy.
double alpha0();

/// Limit problem on (0, L) with linear forcing M x.
struct LimitProblem {
  double alpha = 1.0;
  double beta = 1.0;
  double L = 1.0;
  double M = 0.0;

  void validate() const;
};

struct LimitSolution {
  double value = 0.0;
  PureJumpFunction minimizer = PureJumpFunction::constant(0.0, {0.0, 1.0});
  std::size_t steps = 1;  // n* for mu0_star, number of intersections for mu0
};

/// Minimum with boundary data v(0) = 0, v(L) = M L over equal-step staircases.
LimitSolution mu0_star(const LimitProblem& p);

/// Minimum without boundary conditions over structured candidates: equispaced
/// intersections a_1 < ... < a_n with jumps at the midpoints and end plateaus
/// at levels M a_1 and M a_n.
LimitSolution mu0(const LimitProblem& p);

/// Energy of the structured candidate with n intersections spanning [a1, an].
double structured_energy(const LimitProblem& p, std::size_t n, double a1, double an);
PureJumpFunction structured_candidate(const LimitProblem& p, std::size_t n, double a1,
                                      double an);

struct OracleResult {
  double value = 0.0;
  /// Bound on |value - mu| derived from rounding the structured minimizer
  /// onto the grids (jump positions to cell edges, levels to the level grid).
  double resolution_bound = 0.0;
  std::size_t cells = 0;
  std::size_t levels = 0;
};

/// Brute-force dynamic program over piecewise constant functions with jumps
/// at multiples of dx and levels on the dv-grid spanning
/// [min(0, M L) - |M| L / 2, max(0, M L) + |M| L / 2].
OracleResult mu0_oracle(const LimitProblem& p, double dx, double dv, bool with_bc);

struct MuBounds {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

MuBounds mu_bounds(const LimitProblem& p);

/// Length L_0 = (64 alpha^2 / (beta^2 |M|^3))^(1/5) below which no jump pays off.
double critical_length(double alpha, double beta, double M);

/// Minimizer of l -> alpha sqrt(|M| l) / l + beta M^2 l^2 / 12, from the root
/// of its derivative.
double relaxed_step_length(double alpha, double beta, double M);

struct EquipartitionResult {
  double t = 0.0;
  bool interior = false;
  double value = 0.0;
};

/// Global minimum on [0, 1] of C0 (sqrt t + sqrt(1 - t)) + C1 (t^3 + (1 - t)^3).
EquipartitionResult equipartition_minimize(double C0, double C1);

struct LocalMinReport {
  double jump_symmetry_residual = 0.0;
  double equipartition_residual = 0.0;
  double perturbation_margin = 0.0;
  bool is_local_min = false;
  double energy = 0.0;
};

/// Tests a pure jump function against compactly supported perturbations inside
/// `window`: moving a jump, shifting an interior plateau, merging two jumps,
/// splitting a jump and re-partitioning the intersections with one gap more or
/// less. Steps are {1e-3, 1e-2, 1e-1} times the predicted H.
LocalMinReport verify_local_minimizer(const PureJumpFunction& v, double alpha, double beta,
                                      double M, Interval window);

}  // namespace pmlab
