#include "pmlab/energy.hpp"

#include <cmath>
#include <string>

#include "pmlab/error.hpp"

namespace pmlab {

namespace {

// Finite-difference stencil: value = sum_k c[k] * u[start + k].
struct Stencil {
  std::size_t start = 0;
  int len = 0;
  double c[4] = {0, 0, 0, 0};

  double apply(std::span<const double> u) const noexcept {
    double s = 0.0;
    for (int k = 0; k < len; ++k) s += c[k] * u[start + std::size_t(k)];
    return s;
  }
};

Stencil d1_stencil(std::size_t i, std::size_t n, double h) {
  const double s = 1.0 / (2.0 * h);
  if (i == 0) return {0, 3, {-3 * s, 4 * s, -s, 0}};
  if (i == n - 1) return {n - 3, 3, {s, -4 * s, 3 * s, 0}};
  return {i - 1, 3, {-s, 0, s, 0}};
}

Stencil d2_stencil(std::size_t i, std::size_t n, double h) {
  const double s = 1.0 / (h * h);
  if (n == 3) return {0, 3, {s, -2 * s, s, 0}};
  if (i == 0) return {0, 4, {2 * s, -5 * s, 4 * s, -s}};
  if (i == n - 1) return {n - 4, 4, {-s, 4 * s, -5 * s, 2 * s}};
  return {i - 1, 3, {s, -2 * s, s, 0}};
}

inline double trap_weight(std::size_t i, std::size_t n) {
  return (i == 0 || i == n - 1) ? 0.5 : 1.0;
}

void check_grid(std::span<const double> u, double h) {
  require(u.size() >= 3, ErrorKind::shape, "need at least 3 samples");
  require(h > 0.0 && std::isfinite(h), ErrorKind::domain, "grid spacing must be positive");
}

template <bool WithGradient>
EnergyBreakdown evaluate_impl(std::span<const double> u, double h,
                              const EnergyCoefficients& c,
                              std::span<const double> f, std::span<double> grad) {
  check_grid(u, h);
  const std::size_t n = u.size();
  const bool has_fidelity = c.beta != 0.0;
  if (has_fidelity) {
    require(f.size() == n, ErrorKind::shape, "forcing and function grids differ");
  }
  if constexpr (WithGradient) {
    require(grad.size() == n, ErrorKind::shape, "gradient buffer has wrong size");
    for (auto& g : grad) g = 0.0;
  }

  EnergyBreakdown e;
  const double inv_h = 1.0 / h, inv_h2 = inv_h * inv_h;
  for (std::size_t i = 0; i < n; ++i) {
    const double wh = trap_weight(i, n) * h;
    double d1, d2;
    Stencil s1, s2;
    const bool interior = i > 0 && i + 1 < n && n > 3;
    if (interior) {
      d1 = 0.5 * (u[i + 1] - u[i - 1]) * inv_h;
      d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
    } else {
      s1 = d1_stencil(i, n, h);
      s2 = d2_stencil(i, n, h);
      d1 = s1.apply(u);
      d2 = s2.apply(u);
    }
    const double p2 = d1 * d1;
    e.bending += wh * c.bending * d2 * d2;
    e.gradient_log += wh * c.log_weight * std::log1p(p2);
    double r = 0.0;
    if (has_fidelity) {
      r = u[i] - f[i];
      e.fidelity += wh * c.beta * r * r;
    }
    if constexpr (WithGradient) {
      const double gb = 2.0 * wh * c.bending * d2;
      const double gl = wh * c.log_weight * 2.0 * d1 / (1.0 + p2);
      if (interior) {
        grad[i - 1] += gb * inv_h2 - 0.5 * gl * inv_h;
        grad[i] += -2.0 * gb * inv_h2;
        grad[i + 1] += gb * inv_h2 + 0.5 * gl * inv_h;
      } else {
        for (int k = 0; k < s2.len; ++k) grad[s2.start + std::size_t(k)] += gb * s2.c[k];
        for (int k = 0; k < s1.len; ++k) grad[s1.start + std::size_t(k)] += gl * s1.c[k];
      }
      if (has_fidelity) grad[i] += 2.0 * wh * c.beta * r;
    }
  }
  e.total = e.bending + e.gradient_log + e.fidelity;
  return e;
}

}  // namespace

double omega(double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::domain,
          "omega: eps must lie in (0,1), got " + std::to_string(eps));
  return eps * std::sqrt(std::fabs(std::log(eps)));
}

EnergyCoefficients pmf_coefficients(double eps, double beta) {
  const double w = omega(eps);
  return {std::pow(eps, 6) * std::pow(w, 4), 1.0, beta};
}

EnergyCoefficients rpmf_coefficients(double eps, double beta) {
  const double w = omega(eps);
  return {std::pow(eps, 6), 1.0 / (w * w), beta};
}

std::vector<double> first_derivative(std::span<const double> u, double h) {
  check_grid(u, h);
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = d1_stencil(i, u.size(), h).apply(u);
  return d;
}

std::vector<double> second_derivative(std::span<const double> u, double h) {
  check_grid(u, h);
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = d2_stencil(i, u.size(), h).apply(u);
  return d;
}

double trapezoid(std::span<const double> values, double h) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * h;
}

EnergyBreakdown evaluate_energy(std::span<const double> u, double h,
                                const EnergyCoefficients& c,
                                std::span<const double> forcing) {
  return evaluate_impl<false>(u, h, c, forcing, {});
}

EnergyBreakdown evaluate_energy_gradient(std::span<const double> u, double h,
                                         const EnergyCoefficients& c,
                                         std::span<const double> forcing,
                                         std::span<double> grad) {
  return evaluate_impl<true>(u, h, c, forcing, grad);
}

void assemble_hessian(std::span<const double> u, double h, const EnergyCoefficients& c,
                      bool convexify, SymmetricBandedMatrix& hess) {
  check_grid(u, h);
  const std::size_t n = u.size();
  require(hess.size() == n && hess.bandwidth() >= 3, ErrorKind::shape,
          "hessian buffer has wrong shape");
  hess.set_zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double wh = trap_weight(i, n) * h;
    const Stencil s1 = d1_stencil(i, n, h);
    const Stencil s2 = d2_stencil(i, n, h);
    const double d1 = s1.apply(u);
    const double p2 = d1 * d1;
    double phi2 = 2.0 * (1.0 - p2) / ((1.0 + p2) * (1.0 + p2));
    if (convexify && phi2 < 0.0) phi2 = 0.0;
    const double kb = 2.0 * wh * c.bending;
    const double kl = wh * c.log_weight * phi2;
    for (int a = 0; a < s2.len; ++a)
      for (int b = 0; b <= a; ++b)
        hess.add(s2.start + std::size_t(a), s2.start + std::size_t(b), kb * s2.c[a] * s2.c[b]);
    for (int a = 0; a < s1.len; ++a)
      for (int b = 0; b <= a; ++b) {
        if (s1.c[a] == 0.0 || s1.c[b] == 0.0) continue;
        hess.add(s1.start + std::size_t(a), s1.start + std::size_t(b), kl * s1.c[a] * s1.c[b]);
      }
    hess.add(i, i, 2.0 * wh * c.beta);
  }
}

EnergyBreakdown eval_pmf(const SampledFunction& u, double eps, double beta,
                         const SampledFunction& f) {
  require(u.same_grid(f), ErrorKind::shape, "eval_pmf: u and f must share the grid");
  return evaluate_energy(u.values(), u.spacing(), pmf_coefficients(eps, beta), f.values());
}

double eval_rpm(const SampledFunction& v, double eps) {
  return evaluate_energy(v.values(), v.spacing(), rpmf_coefficients(eps, 0.0), {}).total;
}

EnergyBreakdown eval_rpmf(const SampledFunction& v, double eps, double beta,
                          const SampledFunction& g) {
  require(v.same_grid(g), ErrorKind::shape, "eval_rpmf: v and g must share the grid");
  return evaluate_energy(v.values(), v.spacing(), rpmf_coefficients(eps, beta), g.values());
}

double CubicSolution::value(double y) const noexcept {
  const double t = y - center;
  return coefficients[0] + t * (coefficients[1] + t * (coefficients[2] + t * coefficients[3]));
}

double CubicSolution::slope(double y) const noexcept {
  const double t = y - center;
  return coefficients[1] + t * (2.0 * coefficients[2] + 3.0 * t * coefficients[3]);
}

double CubicSolution::curvature(double y) const noexcept {
  const double t = y - center;
  return 2.0 * coefficients[2] + 6.0 * t * coefficients[3];
}

CubicSolution cubic_interpolant(double a, double b, double A0, double A1, double B0,
                                double B1) {
  require(a < b, ErrorKind::domain, "cubic_interpolant: need a < b");
  const double l = b - a;
  CubicSolution s;
  s.center = 0.5 * (a + b);
  s.coefficients[0] = 0.5 * (A0 + B0) - (B1 - A1) * l / 8.0;
  s.coefficients[1] = 1.5 * (B0 - A0) / l - 0.25 * (A1 + B1);
  s.coefficients[2] = (B1 - A1) / (2.0 * l);
  s.coefficients[3] = -2.0 * (B0 - A0) / (l * l * l) + (A1 + B1) / (l * l);
  const double excess = (B0 - A0) - 0.5 * (A1 + B1) * l;
  s.min_bending = (B1 - A1) * (B1 - A1) / l + 12.0 / (l * l * l) * excess * excess;
  s.sup_value_bound = 1.5 * (std::fabs(A0) + std::fabs(B0)) + 0.5 * (std::fabs(A1) + std::fabs(B1)) * l;
  s.sup_slope_bound = 3.0 * std::fabs(B0 - A0) / l + 1.5 * (std::fabs(A1) + std::fabs(B1));
  return s;
}

}  // namespace pmlab
