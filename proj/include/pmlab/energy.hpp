#pragma once

#include <array>
#include <span>
#include <vector>

#include "pmlab/banded.hpp"
#include "pmlab/sampled_function.hpp"

namespace pmlab {

/// Microstructure scale eps * |log eps|^(1/2), defined for 0 < eps < 1.
double omega(double eps);

/// The three integrals of a Perona-Malik type energy and their sum.
struct EnergyBreakdown {
  double bending = 0.0;       // weighted integral of u''^2
  double gradient_log = 0.0;  // weighted integral of log(1 + u'^2)
  double fidelity = 0.0;      // beta * integral of (u - f)^2
  double total = 0.0;
};

/// Coefficients of the generic discrete functional
///   sum_i w_i h [ bending * D2u_i^2 + log_weight * log(1 + D1u_i^2) + beta (u_i - f_i)^2 ]
/// with trapezoid weights w_i.
struct EnergyCoefficients {
  double bending = 0.0;
  double log_weight = 1.0;
  double beta = 0.0;
};

/// Coefficients of the original functional PMF_eps (bending eps^6 omega^4).
EnergyCoefficients pmf_coefficients(double eps, double beta);
/// Coefficients of the rescaled functional RPMF_eps (bending eps^6, log / omega^2).
EnergyCoefficients rpmf_coefficients(double eps, double beta);

/// Centered first differences inside, one-sided second order at the ends.
std::vector<double> first_derivative(std::span<const double> u, double h);
/// Centered second differences inside, one-sided second order at the ends
/// (first order when only three samples exist).
std::vector<double> second_derivative(std::span<const double> u, double h);
/// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> values, double h);

/// Evaluates the discrete functional. `forcing` may be empty when beta == 0.
EnergyBreakdown evaluate_energy(std::span<const double> u, double h,
                                const EnergyCoefficients& c,
                                std::span<const double> forcing);

/// Same as evaluate_energy, also filling `grad` (size u.size()) with the exact
/// gradient of the discrete functional.
EnergyBreakdown evaluate_energy_gradient(std::span<const double> u, double h,
                                         const EnergyCoefficients& c,
                                         std::span<const double> forcing,
                                         std::span<double> grad);

/// Assembles the Hessian of the discrete functional into `hess` (bandwidth 3).
/// With `convexify`, the concave part of log(1 + p^2) is dropped, which makes
/// the matrix positive definite whenever beta > 0.
void assemble_hessian(std::span<const double> u, double h,
                      const EnergyCoefficients& c, bool convexify,
                      SymmetricBandedMatrix& hess);

EnergyBreakdown eval_pmf(const SampledFunction& u, double eps, double beta,
                         const SampledFunction& f);
double eval_rpm(const SampledFunction& v, double eps);
EnergyBreakdown eval_rpmf(const SampledFunction& v, double eps, double beta,
                          const SampledFunction& g);

/// Minimal-bending cubic with prescribed values and slopes at both ends.
struct CubicSolution {
  std::array<double, 4> coefficients{};  // in powers of (y - center)
  double center = 0.0;
  double min_bending = 0.0;     // integral of w''^2 over [a, b]
  double sup_value_bound = 0.0; // bound on |w| over [a, b]
  double sup_slope_bound = 0.0; // bound on |w'| over [a, b]

  double value(double y) const noexcept;
  double slope(double y) const noexcept;
  double curvature(double y) const noexcept;
};

CubicSolution cubic_interpolant(double a, double b, double A0, double A1,
                                double B0, double B1);

}  // namespace pmlab
