#include "pmlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "pmlab/error.hpp"
#include "pmlab/limit_solver.hpp"

namespace pmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

double gradient_density_norm(std::span<const double> g, double h,
                             const std::vector<char>& pinned) {
  double m = 0.0;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (pinned[i]) continue;
    m = std::max(m, std::fabs(g[i]) / (weight(i, n) * h));
  }
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Objective {
  double h;
  const EnergyCoefficients& c;
  std::span<const double> f;

  double value(std::span<const double> u) const { return evaluate_energy(u, h, c, f).total; }
  double value_grad(std::span<const double> u, std::span<double> g) const {
    return evaluate_energy_gradient(u, h, c, f, g).total;
  }
};

// Newton direction on the true Hessian when it is positive definite, otherwise
// on the convexified one (shifted if still singular).
void newton_direction(std::span<const double> u, const Objective& obj,
                      const std::vector<char>& pinned, std::span<const double> g,
                      SymmetricBandedMatrix& hess, std::span<double> d) {
  const std::size_t n = u.size();
  auto prepare = [&](bool convexify, double shift) {
    assemble_hessian(u, obj.h, obj.c, convexify, hess);
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, hess.get(i, i));
    if (shift > 0.0)
      for (std::size_t i = 0; i < n; ++i) hess.add(i, i, shift * dmax);
    for (std::size_t i = 0; i < n; ++i)
      if (pinned[i]) hess.pin(i);
    return hess.factorize();
  };
  bool ok = prepare(false, 0.0);
  if (!ok) ok = prepare(true, 0.0);
  for (double shift = 1e-12; !ok && shift < 1.0; shift *= 100.0) ok = prepare(true, shift);
  for (std::size_t i = 0; i < n; ++i) d[i] = pinned[i] ? 0.0 : -g[i];
  if (ok) hess.solve(d);
}

}  // namespace

SolveResult optimize_energy(SampledFunction start, const EnergyCoefficients& c,
                            const SampledFunction* forcing,
                            const std::vector<std::size_t>& pinned_nodes,
                            const SolveOptions& opts) {
  require(opts.max_iterations > 0, ErrorKind::usage, "max_iterations must be positive");
  require(opts.gradient_tolerance > 0.0, ErrorKind::usage,
          "gradient_tolerance must be positive");
  const std::size_t n = start.size();
  const double h = start.spacing();
  std::span<const double> f;
  if (forcing) {
    require(forcing->same_grid(start), ErrorKind::shape,
            "optimize_energy: start and forcing grids differ");
    f = forcing->values();
  } else {
    require(c.beta == 0.0, ErrorKind::usage, "optimize_energy: forcing required when beta > 0");
  }
  std::vector<char> pinned(n, 0);
  for (std::size_t i : pinned_nodes) {
    require(i < n, ErrorKind::shape, "optimize_energy: pinned node out of range");
    pinned[i] = 1;
  }

  const Objective obj{h, c, f};
  std::vector<double>& u = start.mutable_values();
  std::vector<double> g(n), d(n), trial(n), gtrial(n);
  SymmetricBandedMatrix hess(n, 3);

  // limited-memory pairs
  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;

  double E = obj.value_grad(u, g);
  for (std::size_t i = 0; i < n; ++i)
    if (pinned[i]) g[i] = 0.0;
  std::deque<double> history{E};
  SolveResult res{start, {}, 0, false, "", 0.0};
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double gn = gradient_density_norm(g, h, pinned);
    if (gn <= opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    if (history.size() > 20) {
      const double old = history.front();
      if (old - E <= 1e-12 * std::max(std::fabs(E), 1e-300)) break;
    }

    if (opts.optimizer == Optimizer::newton) {
      newton_direction(u, obj, pinned, g, hess, d);
    } else {
      // two-loop recursion
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      std::vector<double> a(S.size());
      for (std::size_t k = S.size(); k-- > 0;) {
        a[k] = rho[k] * dot(S[k], d);
        for (std::size_t i = 0; i < n; ++i) d[i] -= a[k] * Y[k][i];
      }
      if (!S.empty()) {
        const double gamma = dot(S.back(), Y.back()) / dot(Y.back(), Y.back());
        for (auto& x : d) x *= gamma;
      } else {
        const double gnorm = std::sqrt(dot(g, g));
        for (auto& x : d) x *= 1.0 / std::max(gnorm, 1e-300) * 1e-3 * h;
      }
      for (std::size_t k = 0; k < S.size(); ++k) {
        const double b = rho[k] * dot(Y[k], d);
        for (std::size_t i = 0; i < n; ++i) d[i] += (a[k] - b) * S[k][i];
      }
      for (std::size_t i = 0; i < n; ++i)
        if (pinned[i]) d[i] = 0.0;
    }

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // not a descent direction: fall back to steepest descent
      S.clear(); Y.clear(); rho.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = pinned[i] ? 0.0 : -g[i];
      const double gnorm = std::sqrt(dot(g, g));
      for (auto& x : d) x *= 1e-3 * h / std::max(gnorm, 1e-300);
      slope = dot(g, d);
    }

    double t = 1.0, Et = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * d[i];
      Et = obj.value_grad(trial, gtrial);
      if (Et <= E + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    if (opts.optimizer == Optimizer::lbfgs) {
      std::vector<double> s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = trial[i] - u[i];
        y[i] = pinned[i] ? 0.0 : gtrial[i] - g[i];
      }
      const double sy = dot(s, y);
      if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
        S.push_back(std::move(s));
        Y.push_back(std::move(y));
        rho.push_back(1.0 / sy);
        if (int(S.size()) > opts.lbfgs_memory) {
          S.pop_front(); Y.pop_front(); rho.pop_front();
        }
      }
    }
    std::swap(u, trial);
    std::swap(g, gtrial);
    for (std::size_t i = 0; i < n; ++i)
      if (pinned[i]) g[i] = 0.0;
    E = Et;
    history.push_back(E);
    if (history.size() > 21) history.pop_front();
  }
  res.iterations = it;
  res.gradient_norm = gradient_density_norm(g, h, pinned);
  if (res.gradient_norm <= opts.gradient_tolerance) res.converged = true;
  res.energy = evaluate_energy(u, h, c, f);
  res.minimizer = std::move(start);
  return res;
}

std::size_t pmf_grid_size(double eps, double ppt) {
  require(ppt > 0.0, ErrorKind::usage, "points per transition must be positive");
  const double w = omega(eps);
  const double hmax = eps * eps * w / ppt;
  return std::max<std::size_t>(64, std::size_t(std::ceil(1.0 / hmax)) + 1);
}

std::size_t rpmf_grid_size(double eps, double length, double ppt) {
  require(ppt > 0.0, ErrorKind::usage, "points per transition must be positive");
  require(eps > 0.0 && eps < 1.0, ErrorKind::domain, "eps must lie in (0,1)");
  const double hmax = eps * eps / ppt;
  return std::max<std::size_t>(64, std::size_t(std::ceil(length / hmax)) + 1);
}

namespace {

void check_resolution(const SampledFunction& grid, double hmax, std::size_t required) {
  require(grid.size() >= 64, ErrorKind::resolution,
          "grid must have at least 64 nodes, got " + std::to_string(grid.size()));
  if (grid.spacing() > hmax * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "grid under-resolves the transition scale: spacing " << grid.spacing()
        << " exceeds " << hmax << "; use at least " << required << " nodes";
    fail(ErrorKind::resolution, msg.str());
  }
}

SampledFunction resample(const SampledFunction& src, double left, double right,
                         std::size_t count) {
  return SampledFunction::sample(left, right, count,
                                 [&](double x) { return src.interpolate(x); });
}

SampledFunction mollify(const SampledFunction& u, std::size_t half) {
  if (half == 0) return u;
  std::vector<double> v(u.values().begin(), u.values().end()), w(v.size());
  const std::size_t n = v.size();
  for (int pass = 0; pass < 3; ++pass) {
    double s = 0.0;
    std::size_t lo = 0, hi = 0;  // current window [lo, hi)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i >= half ? i - half : 0, b = std::min(n, i + half + 1);
      while (hi < b) s += v[hi++];
      while (lo < a) s -= v[lo++];
      w[i] = s / double(b - a);
    }
    std::swap(v, w);
  }
  return SampledFunction(u.left(), u.spacing(), std::move(v));
}

struct Start {
  std::string id;
  SampledFunction u;
};

std::vector<Start> make_starts(const SampledFunction& f, double eps, double beta,
                               const EnergyCoefficients& c, const SolveOptions& opts,
                               bool rescaled) {
  std::vector<Start> starts;
  std::optional<RecoveryReport> rec;
  auto recovery = [&]() -> const RecoveryReport* {
    if (rec) return &*rec;
    try {
      PureJumpFunction sk = opts.skeleton ? *opts.skeleton
                            : rescaled    ? PureJumpFunction::constant(0.0, {f.left(), f.right()})
                                          : staircase_skeleton(f, eps, beta);
      if (rescaled && !opts.skeleton) {
        // the rescaled forcing is treated as a forcing with omega = 1
        const double slope = (f[f.size() - 1] - f[0]) / f.length();
        LimitProblem p{alpha0(), beta, f.length(), slope};
        const LimitSolution s = mu0(p);
        std::vector<Jump> js;
        for (const auto& j : s.minimizer.jumps()) js.push_back({f.left() + j.location, j.height});
        sk = PureJumpFunction(f[0] + s.minimizer.base(), std::move(js), {f.left(), f.right()});
      }
      rec = recovery_with(sk, c, f);
      return &*rec;
    } catch (const Error&) {
      return nullptr;
    }
  };
  for (const auto& id : opts.multistart_seeds) {
    if (id == "forcing") {
      starts.push_back({id, f});
    } else if (id == "recovery") {
      if (const auto* r = recovery()) starts.push_back({id, r->profile});
    } else if (id == "mollified") {
      if (const auto* r = recovery()) {
        double eta = 0.0;
        for (double e : r->half_widths) eta = std::max(eta, e);
        const auto half = std::size_t(std::ceil(0.5 * eta / f.spacing()));
        starts.push_back({id, mollify(r->profile, half)});
      }
    } else if (id == "warm") {
      if (opts.warm_start) starts.push_back({id, resample(*opts.warm_start, f.left(), f.right(), f.size())});
    } else {
      fail(ErrorKind::usage, "unknown initializer id '" + id + "'");
    }
  }
  if (starts.empty()) starts.push_back({"forcing", f});
  return starts;
}

SolveResult best_of(const std::vector<Start>& starts, const EnergyCoefficients& c,
                    const SampledFunction& f, const std::vector<std::size_t>& pinned,
                    const SolveOptions& opts) {
  std::optional<SolveResult> best;
  for (const auto& s : starts) {
    SolveResult r = optimize_energy(s.u, c, &f, pinned, opts);
    r.initializer_id = s.id;
    if (!best || r.energy.total < best->energy.total) best = std::move(r);
  }
  return std::move(*best);
}

}  // namespace

SolveResult minimize_pmf(double eps, double beta, const SampledFunction& forcing,
                         const SolveOptions& opts) {
  require(beta > 0.0, ErrorKind::domain, "minimize_pmf: beta must be positive");
  const double w = omega(eps);
  const double hmax = eps * eps * w / opts.points_per_transition;
  const std::size_t required =
      std::max<std::size_t>(64, std::size_t(std::ceil(forcing.length() / hmax)) + 1);
  SampledFunction f = opts.grid_size != 0 && opts.grid_size != forcing.size()
                          ? resample(forcing, forcing.left(), forcing.right(), opts.grid_size)
                          : forcing;
  check_resolution(f, hmax, required);
  const EnergyCoefficients c = pmf_coefficients(eps, beta);
  return best_of(make_starts(f, eps, beta, c, opts, false), c, f, {}, opts);
}

SolveResult minimize_rpmf(double eps, double beta, const SampledFunction& g,
                          const SolveOptions& opts, std::optional<BoundaryData> boundary) {
  require(beta >= 0.0, ErrorKind::domain, "minimize_rpmf: beta must be nonnegative");
  const double hmax = eps * eps / opts.points_per_transition;
  const std::size_t required = rpmf_grid_size(eps, g.length(), opts.points_per_transition);
  SampledFunction f = opts.grid_size != 0 && opts.grid_size != g.size()
                          ? resample(g, g.left(), g.right(), opts.grid_size)
                          : g;
  check_resolution(f, hmax, required);
  const EnergyCoefficients c = rpmf_coefficients(eps, beta);
  std::vector<Start> starts = make_starts(f, eps, beta, c, opts, true);
  std::vector<std::size_t> pinned;
  if (boundary) {
    const std::size_t n = f.size();
    const double h = f.spacing();
    pinned = {0, 1, n - 2, n - 1};
    for (auto& s : starts) {
      auto& v = s.u.mutable_values();
      v[0] = boundary->A0;
      v[1] = boundary->A0 + h * boundary->A1;
      v[n - 1] = boundary->B0;
      v[n - 2] = boundary->B0 - h * boundary->B1;
    }
  }
  return best_of(starts, c, f, pinned, opts);
}

namespace {

// Gauss-Legendre nodes and weights on [0, 1] (16 points, applied per panel).
constexpr double kGLx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                            0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                            0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

// integral over the transition of log(1 + w'^2) for the cubic
// J (3 t^2 - 2 t^3), t in [0, 1], stretched over width 2 eta
double cubic_log_integral(double J, double eta) {
  constexpr int kPanels = 8;
  double s = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = double(p) / kPanels, b = double(p + 1) / kPanels;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int k = 0; k < 8; ++k) {
      for (double sign : {-1.0, 1.0}) {
        const double t = mid + sign * half * kGLx[k];
        const double slope = J * 6.0 * t * (1.0 - t) / (2.0 * eta);
        s += half * kGLw[k] * std::log1p(slope * slope);
      }
    }
  }
  return 2.0 * eta * s;
}

template <class F>
double golden(F&& fn, double lo, double hi, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = fn(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = fn(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double transition_half_width(double jump, const EnergyCoefficients& c) {
  const double J = std::fabs(jump);
  require(J > 0.0, ErrorKind::domain, "transition_half_width: zero jump");
  require(c.bending > 0.0 && c.log_weight > 0.0, ErrorKind::domain,
          "transition_half_width: coefficients must be positive");
  auto bending = [&](double eta) { return c.bending * 12.0 * J * J / std::pow(2.0 * eta, 3); };
  auto two_term = [&](double le) {
    const double eta = std::exp(le);
    const double p = 3.0 * J / (4.0 * eta);
    return bending(eta) + 2.0 * eta * c.log_weight * std::log1p(p * p);
  };
  // The cost falls off again for very wide transitions (log(1 + p^2) ~ p^2),
  // so the relevant minimizer is the first local one above the bending scale.
  const double lb = std::log(std::pow(c.bending * J * J / c.log_weight, 0.25));
  constexpr int kScan = 400;
  constexpr double kSpan = 8.0;
  auto le_at = [&](int k) { return lb - kSpan + 2.0 * kSpan * k / kScan; };
  int first = -1;
  double prev = two_term(le_at(0)), cur = two_term(le_at(1));
  for (int k = 1; k < kScan; ++k) {
    const double next = two_term(le_at(k + 1));
    if (cur <= prev && cur <= next) {
      first = k;
      break;
    }
    prev = cur;
    cur = next;
  }
  require(first > 0, ErrorKind::numerical, "transition_half_width: no local minimum found");
  const double eta0 = std::exp(golden(two_term, le_at(first - 1), le_at(first + 1), 1e-12));
  auto exact = [&](double le) {
    const double eta = std::exp(le);
    return bending(eta) + c.log_weight * cubic_log_integral(J, eta);
  };
  return std::exp(golden(exact, std::log(eta0 / 4.0), std::log(eta0 * 4.0), 1e-10));
}

RecoveryReport recovery_with(const PureJumpFunction& target, const EnergyCoefficients& c,
                             const SampledFunction& grid) {
  const auto& jumps = target.jumps();
  std::vector<double> eta(jumps.size());
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    eta[k] = transition_half_width(jumps[k].height, c);
    if (k > 0 && jumps[k].location - jumps[k - 1].location < 2.0 * (eta[k] + eta[k - 1])) {
      std::ostringstream msg;
      msg << "recovery_construction: jumps at " << jumps[k - 1].location << " and "
          << jumps[k].location << " are closer than the transition widths allow";
      fail(ErrorKind::domain, msg.str());
    }
  }
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (2.0 * eta[k] < 4.0 * grid.spacing()) {
      std::ostringstream msg;
      msg << "recovery_construction: transition at " << jumps[k].location << " of width "
          << 2.0 * eta[k] << " is not resolved by spacing " << grid.spacing();
      fail(ErrorKind::resolution, msg.str());
    }
  }
  const Interval dom = target.domain();
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = std::clamp(grid.x(i), dom.a, dom.b);
    const std::size_t k = target.plateau_index(x);
    double val = target.plateau_level(k);
    // nearest jumps on either side may be in their transition zone
    auto blend = [&](std::size_t j) {
      const double s = jumps[j].location, e = eta[j];
      if (x <= s - e || x >= s + e) return;
      const double t = (x - (s - e)) / (2.0 * e);
      val = target.plateau_level(j) + jumps[j].height * t * t * (3.0 - 2.0 * t);
    };
    if (k > 0) blend(k - 1);
    if (k < jumps.size()) blend(k);
    v[i] = val;
  }
  RecoveryReport r{SampledFunction(grid.left(), grid.spacing(), std::move(v)), std::move(eta),
                   0.0, 0.0};
  r.rpm = evaluate_energy(r.profile.values(), r.profile.spacing(),
                          {c.bending, c.log_weight, 0.0}, {})
              .total;
  const double jh = j_half(target, dom);
  r.delta = jh > 0.0 ? r.rpm / (alpha0() * jh) - 1.0 : 0.0;
  return r;
}

RecoveryReport recovery_construction(const PureJumpFunction& target, double eps,
                                     const SampledFunction& grid) {
  return recovery_with(target, rpmf_coefficients(eps, 0.0), grid);
}

PatchCertificate boundary_patch(double a, double b, double A0, double A1, double B0, double B1,
                                double eps, std::size_t nodes) {
  require(a < b, ErrorKind::domain, "boundary_patch: need a < b");
  const double w = omega(eps);
  const double H = std::max(std::fabs(A0), std::fabs(B0));
  const double D = std::max(std::fabs(A1), std::fabs(B1));
  const double r = std::sqrt(H) + eps * eps * D;
  const double eta = eps * eps * r;
  PatchCertificate cert{SampledFunction::sample(a, b, std::max<std::size_t>(nodes, 64),
                                                [](double) { return 0.0; }),
                        eta, 0.0, 80.0 * r, 0.0, 10.0 * eps * eps * std::pow(r, 5)};
  if (H == 0.0 && D == 0.0) return cert;
  if (!(2.0 * eta < b - a)) {
    std::ostringstream msg;
    msg << "boundary_patch: 2 eps^2 (sqrt(H) + eps^2 D) = " << 2.0 * eta
        << " is not smaller than b - a = " << b - a;
    fail(ErrorKind::domain, msg.str());
  }
  const double lhs = 2.0 / std::fabs(std::log(eps)) *
                     std::log1p(45.0 / (2.0 * std::pow(eps, 4)) * r * r);
  if (lhs > 18.0) {
    std::ostringstream msg;
    msg << "boundary_patch: the logarithmic hypothesis fails (" << lhs << " > 18)";
    fail(ErrorKind::domain, msg.str());
  }
  if (nodes == 0) nodes = std::size_t(std::ceil(16.0 * (b - a) / eta)) + 1;
  nodes = std::max<std::size_t>(nodes, 64);
  const CubicSolution left = cubic_interpolant(a, a + eta, A0, A1, 0.0, 0.0);
  const CubicSolution right = cubic_interpolant(b - eta, b, 0.0, 0.0, B0, B1);
  cert.profile = SampledFunction::sample(a, b, nodes, [&](double x) {
    if (x <= a + eta) return left.value(x);
    if (x >= b - eta) return right.value(x);
    return 0.0;
  });
  const auto& p = cert.profile;
  cert.rpm = evaluate_energy(p.values(), p.spacing(), {std::pow(eps, 6), 1.0 / (w * w), 0.0}, {})
                 .total;
  std::vector<double> sq(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) sq[i] = p[i] * p[i];
  cert.l2_squared = trapezoid(sq, p.spacing());
  return cert;
}

PureJumpFunction staircase_skeleton(const SampledFunction& forcing, double eps, double beta) {
  const double w = omega(eps);
  const Interval dom{forcing.left(), forcing.right()};
  const std::size_t n = forcing.size();
  const double slope = (forcing[n - 1] - forcing[0]) / forcing.length();
  double dev = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dev = std::max(dev, std::fabs(forcing[i] - forcing[0] - slope * (forcing.x(i) - dom.a)));
    scale = std::max(scale, std::fabs(forcing[i]));
  }
  if (dev <= 1e-12 * (1.0 + scale)) {
    if (slope == 0.0) return PureJumpFunction::constant(forcing[0], dom);
    const LimitProblem p{alpha0(), beta, dom.length() / w, slope};
    const LimitSolution s = mu0(p);
    std::vector<Jump> js;
    for (const auto& j : s.minimizer.jumps()) js.push_back({dom.a + w * j.location, w * j.height});
    return PureJumpFunction(forcing[0] + w * s.minimizer.base(), std::move(js), dom);
  }

  const std::vector<double> df = first_derivative(forcing.values(), forcing.spacing());
  auto slope_at = [&](double x) {
    const double r = std::clamp((x - dom.a) / forcing.spacing(), 0.0, double(n - 1));
    const std::size_t i = std::min(std::size_t(r), n - 2);
    const double t = r - double(i);
    return (1.0 - t) * df[i] + t * df[i + 1];
  };
  auto local_h = [&](double x) {
    const double m = slope_at(x);
    if (m == 0.0) return kInf;
    return staircase_params(beta, m).H * w;
  };
  std::vector<double> cross;
  double x = dom.a + semi_entire_offset(local_h(dom.a));
  while (std::isfinite(x) && x < dom.b) {
    const double H = local_h(x);
    if (!std::isfinite(H) || x + semi_entire_offset(H) > dom.b) break;
    cross.push_back(x);
    x += 2.0 * H;
  }
  if (cross.empty()) {
    // no jump pays off; best constant is roughly the mean
    double mean = trapezoid(forcing.values(), forcing.spacing()) / forcing.length();
    return PureJumpFunction::constant(mean, dom);
  }
  std::vector<Jump> js;
  for (std::size_t k = 1; k < cross.size(); ++k) {
    const double J = forcing.interpolate(cross[k]) - forcing.interpolate(cross[k - 1]);
    if (std::fabs(J) > 1e-12 * (1.0 + scale)) js.push_back({0.5 * (cross[k - 1] + cross[k]), J});
  }
  return PureJumpFunction(forcing.interpolate(cross.front()), std::move(js), dom);
}

}  // namespace pmlab
