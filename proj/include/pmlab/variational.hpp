#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pmlab/energy.hpp"
#include "pmlab/pure_jump.hpp"
#include "pmlab/sampled_function.hpp"

namespace pmlab {

enum class Optimizer {
  newton,  // banded Newton with convexified fallback
  lbfgs,   // limited-memory quasi-Newton
};

struct SolveOptions {
  /// Number of grid nodes; 0 selects the smallest grid allowed by the grid rule.
  std::size_t grid_size = 0;
  int max_iterations = 500;
  /// Bound on the max-norm of the gradient density g_i / (w_i h). Its
  /// round-off floor grows like eps^-2 on rule-sized grids (about 1e-5 at eps = 0.03).
  double gradient_tolerance = 1e-4;
  /// Initializer ids, tried in order: "forcing", "recovery", "mollified", "warm".
  std::vector<std::string> multistart_seeds = {"forcing", "recovery", "mollified"};
  Optimizer optimizer = Optimizer::newton;
  /// Grid points per transition width in the grid rule.
  double points_per_transition = 8.0;
  int lbfgs_memory = 12;
  /// Previous minimizer used by the "warm" initializer (resampled onto the grid).
  std::optional<SampledFunction> warm_start;
  /// Jump skeleton for the recovery initializers; derived from the forcing when absent.
  std::optional<PureJumpFunction> skeleton;
};

struct SolveResult {
  SampledFunction minimizer;
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  std::string initializer_id;
  double gradient_norm = 0.0;
};

/// Pinned boundary data (v(0), v'(0), v(L), v'(L)).
struct BoundaryData {
  double A0 = 0.0;
  double A1 = 0.0;
  double B0 = 0.0;
  double B1 = 0.0;
};

/// Smallest grid size satisfying spacing <= eps^2 omega(eps) / ppt on (0, 1).
std::size_t pmf_grid_size(double eps, double points_per_transition = 8.0);
/// Smallest grid size satisfying spacing <= eps^2 / ppt on an interval of given length.
std::size_t rpmf_grid_size(double eps, double length, double points_per_transition = 8.0);

/// Local minimization of the discretized original functional on (0, 1) with
/// natural boundary conditions. The forcing fixes the grid unless
/// opts.grid_size asks for another one, in which case it is resampled.
SolveResult minimize_pmf(double eps, double beta, const SampledFunction& forcing,
                         const SolveOptions& opts);

/// Same for the rescaled functional on the forcing's interval; with
/// `boundary`, the two end cells carry the prescribed values and slopes.
SolveResult minimize_rpmf(double eps, double beta, const SampledFunction& g,
                          const SolveOptions& opts,
                          std::optional<BoundaryData> boundary = std::nullopt);

/// Optimizes a given starting point with fixed coefficients; the building
/// block of the two solvers. `pinned` lists node indices that are held fixed.
SolveResult optimize_energy(SampledFunction start, const EnergyCoefficients& c,
                            const SampledFunction* forcing,
                            const std::vector<std::size_t>& pinned, const SolveOptions& opts);

struct RecoveryReport {
  SampledFunction profile;
  std::vector<double> half_widths;  // eta per jump
  double rpm = 0.0;
  double delta = 0.0;  // rpm / (alpha0 j_half) - 1
};

/// Cubic transitions with zero end slopes across each jump of `target`,
/// sampled on `grid` (only its nodes are used). Energies are those of the
/// rescaled functional.
RecoveryReport recovery_construction(const PureJumpFunction& target, double eps,
                                     const SampledFunction& grid);

/// Same construction with arbitrary coefficients (used to initialize the
/// original functional, where bending is eps^6 omega^4 and the log weight 1).
RecoveryReport recovery_with(const PureJumpFunction& target, const EnergyCoefficients& c,
                             const SampledFunction& grid);

/// Half-width minimizing the two-term transition cost, refined on the exact
/// cubic over [eta/4, 4 eta].
double transition_half_width(double jump, const EnergyCoefficients& c);

struct PatchCertificate {
  SampledFunction profile;
  double eta = 0.0;
  double rpm = 0.0;
  double rpm_bound = 0.0;
  double l2_squared = 0.0;
  double l2_bound = 0.0;
};

/// Cubic caps of width eps^2 (sqrt(H) + eps^2 D) at both ends of (a, b)
/// carrying the data (A0, A1) and (B0, B1), zero in the middle, sampled on
/// `nodes` equispaced points.
PatchCertificate boundary_patch(double a, double b, double A0, double A1, double B0, double B1,
                                double eps, std::size_t nodes = 0);

/// Staircase skeleton of a C^1 forcing on (0, 1) for the original functional:
/// intersections spaced 2 H(x) omega(eps) following the local slope, first and
/// last ones at the semi-entire offset from the ends. Affine forcing uses the
/// structured limit minimizer.
PureJumpFunction staircase_skeleton(const SampledFunction& forcing, double eps, double beta);

}  // namespace pmlab
