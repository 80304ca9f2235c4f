#include "pmlab/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pmlab/error.hpp"

namespace pmlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t step_search_limit(const LimitProblem& p) {
  const auto hv = staircase_params_general(p.alpha, p.beta, p.M);
  return std::size_t(std::ceil(5.0 * p.L / (2.0 * hv.H))) + 5;
}

double per_step_energy(const LimitProblem& p, double len) {
  const double m = std::fabs(p.M);
  return p.alpha * std::sqrt(m * len) + p.beta * p.M * p.M * len * len * len / 12.0;
}

template <class F>
double golden_min(F&& f, double lo, double hi, double tol, double* arg) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = f(x2);
    }
  }
  *arg = 0.5 * (lo + hi);
  return f(*arg);
}

}  // namespace

double alpha0() { return 16.0 / std::sqrt(3.0); }

void LimitProblem::validate() const {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::domain, "alpha must be positive");
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::domain, "beta must be positive");
  require(L > 0.0 && std::isfinite(L), ErrorKind::domain, "L must be positive");
  require(std::isfinite(M), ErrorKind::domain, "M must be finite");
}

LimitSolution mu0_star(const LimitProblem& p) {
  p.validate();
  const Interval dom{0.0, p.L};
  if (p.M == 0.0) return {0.0, PureJumpFunction::constant(0.0, dom), 1};
  const std::size_t nmax = step_search_limit(p);
  std::size_t best_n = 1;
  double best = kInf;
  for (std::size_t n = 1; n <= nmax; ++n) {
    const double e = double(n) * per_step_energy(p, p.L / double(n));
    if (e < best) {
      best = e;
      best_n = n;
    }
  }
  const double len = p.L / double(best_n);
  std::vector<Jump> jumps;
  for (std::size_t k = 0; k < best_n; ++k)
    jumps.push_back({(double(k) + 0.5) * len, p.M * len});
  return {best, PureJumpFunction(0.0, std::move(jumps), dom), best_n};
}

double structured_energy(const LimitProblem& p, std::size_t n, double a1, double an) {
  const double m2 = p.M * p.M;
  if (n <= 1) {
    return p.beta * m2 * (a1 * a1 * a1 + (p.L - a1) * (p.L - a1) * (p.L - a1)) / 3.0;
  }
  const double gaps = double(n - 1);
  const double d = (an - a1) / gaps;
  const double tail = p.L - an;
  return p.alpha * gaps * std::sqrt(std::fabs(p.M) * d) +
         p.beta * m2 * (gaps * d * d * d / 12.0 + a1 * a1 * a1 / 3.0 + tail * tail * tail / 3.0);
}

PureJumpFunction structured_candidate(const LimitProblem& p, std::size_t n, double a1,
                                      double an) {
  const Interval dom{0.0, p.L};
  if (n <= 1) return PureJumpFunction::constant(p.M * a1, dom);
  const double d = (an - a1) / double(n - 1);
  std::vector<Jump> jumps;
  for (std::size_t k = 0; k + 1 < n; ++k)
    jumps.push_back({a1 + (double(k) + 0.5) * d, p.M * d});
  return PureJumpFunction(p.M * a1, std::move(jumps), dom);
}

LimitSolution mu0(const LimitProblem& p) {
  p.validate();
  const Interval dom{0.0, p.L};
  if (p.M == 0.0) return {0.0, PureJumpFunction::constant(0.0, dom), 1};

  // No jumps: the best constant level is the midline value M L / 2.
  double best = structured_energy(p, 1, 0.5 * p.L, 0.5 * p.L);
  std::size_t best_n = 1;
  double best_a1 = 0.5 * p.L, best_an = 0.5 * p.L;

  // For n >= 2 intersections the search runs over (a1, span). For a fixed
  // span the end cost a1^3 + (L - span - a1)^3 is convex in a1 and its
  // minimizer is taken in closed form; the span is scanned and refined.
  const std::size_t nmax = step_search_limit(p);
  constexpr int kScan = 400;
  for (std::size_t n = 2; n <= nmax; ++n) {
    auto energy_of_span = [&](double s) {
      const double a1 = 0.5 * (p.L - s);
      return structured_energy(p, n, a1, a1 + s);
    };
    std::vector<double> vals(kScan + 1);
    for (int k = 0; k <= kScan; ++k) vals[std::size_t(k)] = energy_of_span(p.L * k / kScan);
    for (int k = 1; k <= kScan; ++k) {
      const bool local = vals[std::size_t(k)] <= vals[std::size_t(k - 1)] &&
                         (k == kScan || vals[std::size_t(k)] <= vals[std::size_t(k + 1)]);
      if (!local) continue;
      const double lo = p.L * (k - 1) / kScan;
      const double hi = p.L * std::min(k + 1, kScan) / kScan;
      double s = 0.0;
      const double e = golden_min(energy_of_span, lo, hi, 1e-13 * p.L, &s);
      if (e < best) {
        best = e;
        best_n = n;
        best_a1 = 0.5 * (p.L - s);
        best_an = best_a1 + s;
      }
    }
  }
  return {best, structured_candidate(p, best_n, best_a1, best_an), best_n};
}

namespace {

double oracle_bound(const LimitProblem& p, const PureJumpFunction& v, double dx, double dv) {
  // max |v - M x| over the domain: attained at plateau ends
  double delta = 0.0;
  double left = v.domain().a;
  for (std::size_t k = 0; k <= v.jumps().size(); ++k) {
    const double right = k < v.jumps().size() ? v.jumps()[k].location : v.domain().b;
    const double c = v.plateau_level(k);
    delta = std::max({delta, std::fabs(c - p.M * left), std::fabs(c - p.M * right)});
    left = right;
  }
  double jmax = 0.0;
  for (const auto& j : v.jumps()) jmax = std::max(jmax, std::fabs(j.height));
  const double k = double(v.jumps().size());
  const double d1 = delta + 0.5 * dv, j1 = jmax + dv;
  return k * (p.alpha * std::sqrt(dv) + p.beta * 0.5 * dx * j1 * (2.0 * d1 + j1)) +
         p.beta * p.L * (delta * dv + 0.25 * dv * dv);
}

}  // namespace

OracleResult mu0_oracle(const LimitProblem& p, double dx, double dv, bool with_bc) {
  p.validate();
  require(dx > 0.0 && dv > 0.0, ErrorKind::domain, "mu0_oracle: grid steps must be positive");
  const double kc = p.L / dx;
  const std::size_t K = std::size_t(std::llround(kc));
  require(std::fabs(kc - double(K)) <= 1e-9 * kc, ErrorKind::domain,
          "mu0_oracle: dx must divide L");
  require(K >= 4, ErrorKind::domain, "mu0_oracle: fewer than 4 cells, refine dx");
  if (p.M == 0.0) return {0.0, 0.0, K, 1};

  const double m = std::fabs(p.M);
  const double lo = std::min(0.0, p.M * p.L) - 0.5 * m * p.L;
  const double hi = std::max(0.0, p.M * p.L) + 0.5 * m * p.L;
  const std::size_t V = std::size_t(std::floor((hi - lo) / dv + 1e-9)) + 1;
  std::size_t idx0 = 0, idxL = 0;
  if (with_bc) {
    const double r0 = (0.0 - lo) / dv, rL = (p.M * p.L - lo) / dv;
    idx0 = std::size_t(std::llround(r0));
    idxL = std::size_t(std::llround(rL));
    require(std::fabs(r0 - double(idx0)) < 1e-7 && std::fabs(rL - double(idxL)) < 1e-7 &&
                idxL < V,
            ErrorKind::domain, "mu0_oracle: boundary levels 0 and M L must be grid levels");
  }

  std::vector<double> sq(V);
  for (std::size_t r = 0; r < V; ++r) sq[r] = p.alpha * std::sqrt(double(r) * dv);

  auto cell_cost = [&](std::size_t i, std::size_t j) {
    const double xm = (double(i) + 0.5) * dx;
    const double d = lo + double(j) * dv - p.M * xm;
    return p.beta * dx * (d * d + p.M * p.M * dx * dx / 12.0);
  };

  std::vector<double> D(V, kInf), N(V);
  if (with_bc) {
    D[idx0] = cell_cost(0, idx0);
  } else {
    for (std::size_t j = 0; j < V; ++j) D[j] = cell_cost(0, j);
  }
  for (std::size_t i = 1; i < K; ++i) {
    const double dmin = *std::min_element(D.begin(), D.end());
    for (std::size_t j = 0; j < V; ++j) {
      double best = D[j];
      // a jump of height r dv costs at least dmin + alpha sqrt(r dv)
      if (best > dmin) {
        const double gap = (best - dmin) / p.alpha;
        const double rmax_d = std::isfinite(gap) ? gap * gap / dv : double(V);
        const std::size_t rmax = std::size_t(std::min(double(V - 1), std::ceil(rmax_d)));
        const std::size_t a = j >= rmax ? j - rmax : 0;
        const std::size_t b = std::min(V - 1, j + rmax);
        for (std::size_t q = a; q < j; ++q) best = std::min(best, D[q] + sq[j - q]);
        for (std::size_t q = j + 1; q <= b; ++q) best = std::min(best, D[q] + sq[q - j]);
      }
      N[j] = best + cell_cost(i, j);
    }
    std::swap(D, N);
  }
  OracleResult out;
  out.cells = K;
  out.levels = V;
  out.value = with_bc ? D[idxL] : *std::min_element(D.begin(), D.end());
  const LimitSolution ref = with_bc ? mu0_star(p) : mu0(p);
  out.resolution_bound = oracle_bound(p, ref.minimizer, dx, dv);
  return out;
}

MuBounds mu_bounds(const LimitProblem& p) {
  p.validate();
  MuBounds b;
  const double a = p.alpha, be = p.beta;
  b.c1 = 1.25 * std::pow(std::pow(a, 4) * be / 3.0, 0.2);
  b.c2 = 20.0 * std::pow(2.0 * std::pow(a, 6) / (3.0 * be), 0.2);
  b.c3 = 1.25 * std::pow(3.0 * std::pow(a, 6) / be, 0.2);
  const double m = std::fabs(p.M);
  b.lower = b.c1 * std::pow(m, 0.8) * p.L - b.c2 * std::pow(m, 0.2);
  b.upper = b.c1 * std::pow(m, 0.8) * p.L + b.c3 * std::pow(m, 0.2);
  return b;
}

double critical_length(double alpha, double beta, double M) {
  require(alpha > 0.0 && beta > 0.0, ErrorKind::domain,
          "critical_length: alpha and beta must be positive");
  if (M == 0.0) return kInf;
  return std::pow(64.0 * alpha * alpha / (beta * beta * std::pow(std::fabs(M), 3)), 0.2);
}

double relaxed_step_length(double alpha, double beta, double M) {
  require(alpha > 0.0 && beta > 0.0 && M != 0.0, ErrorKind::domain,
          "relaxed_step_length: need alpha, beta > 0 and M != 0");
  const double m = std::fabs(M);
  // derivative of alpha sqrt(m) l^(-1/2) + beta m^2 l^2 / 12, increasing in l
  auto deriv = [&](double l) {
    return -0.5 * alpha * std::sqrt(m) * std::pow(l, -1.5) + beta * m * m * l / 6.0;
  };
  double lo = 1e-300, hi = 1.0;
  while (deriv(hi) < 0.0) hi *= 2.0;
  lo = hi;
  while (deriv(lo) > 0.0) lo *= 0.5;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (deriv(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

EquipartitionResult equipartition_minimize(double C0, double C1) {
  require(C0 > 0.0 && C1 > 0.0, ErrorKind::domain,
          "equipartition_minimize: C0 and C1 must be positive");
  auto phi = [&](double t) {
    const double s = 1.0 - t;
    return C0 * (std::sqrt(t) + std::sqrt(s)) + C1 * (t * t * t + s * s * s);
  };
  constexpr int kScan = 2000;
  int best = 0;
  double fbest = phi(0.0);
  for (int k = 1; k <= kScan; ++k) {
    const double f = phi(double(k) / kScan);
    if (f < fbest) {
      fbest = f;
      best = k;
    }
  }
  EquipartitionResult r;
  if (best == 0 || best == kScan) {
    r.t = best == 0 ? 0.0 : 1.0;
    r.value = fbest;
    r.interior = false;
    return r;
  }
  auto dphi = [&](double t) {
    const double s = 1.0 - t;
    return 0.5 * C0 * (1.0 / std::sqrt(t) - 1.0 / std::sqrt(s)) + 3.0 * C1 * (t * t - s * s);
  };
  double lo = double(best - 1) / kScan, hi = double(best + 1) / kScan;
  double t = 0.0;
  if (lo > 0.0 && hi < 1.0 && dphi(lo) < 0.0 && dphi(hi) > 0.0) {
    // bisection on the derivative resolves t to rounding, golden section only to sqrt(eps)
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (dphi(mid) < 0.0 ? lo : hi) = mid;
    }
    t = 0.5 * (lo + hi);
  } else {
    golden_min(phi, lo, hi, 1e-12, &t);
  }
  const double f = phi(t);
  r.t = t;
  r.value = f;
  r.interior = f < phi(0.0);
  if (C0 * std::sqrt(2.0) >= 6.0 * C1) r.interior = false;
  if (!r.interior) {
    r.t = 0.0;
    r.value = phi(0.0);
  }
  return r;
}

namespace {

struct Perturber {
  const PureJumpFunction& v;
  double alpha, beta, M;
  Interval window;
  double base_energy;

  double energy(const std::vector<Jump>& jumps) const {
    std::vector<Jump> clean;
    for (const auto& j : jumps)
      if (j.height != 0.0) clean.push_back(j);
    std::sort(clean.begin(), clean.end(),
              [](const Jump& x, const Jump& y) { return x.location < y.location; });
    for (std::size_t k = 1; k < clean.size(); ++k)
      if (!(clean[k - 1].location < clean[k].location)) return kInf;
    const PureJumpFunction w(v.base(), std::move(clean), v.domain());
    return jf_half(w, alpha, beta, LinearForcing{M, 0.0}, window) - base_energy;
  }
};

}  // namespace

LocalMinReport verify_local_minimizer(const PureJumpFunction& v, double alpha, double beta,
                                      double M, Interval window) {
  require(alpha > 0.0 && beta > 0.0, ErrorKind::domain,
          "verify_local_minimizer: alpha and beta must be positive");
  require(window.a >= v.domain().a && window.b <= v.domain().b && window.a < window.b,
          ErrorKind::domain, "verify_local_minimizer: window must lie inside the domain");
  const auto& jumps = v.jumps();
  for (const auto& j : jumps)
    require(j.location != window.a && j.location != window.b, ErrorKind::domain,
            "verify_local_minimizer: window endpoint is a jump point");

  LocalMinReport rep;
  const LinearForcing f{M, 0.0};
  rep.energy = jf_half(v, alpha, beta, f, window);
  const auto hv = staircase_params_general(alpha, beta, M);
  const double H = hv.H;
  const double vscale = hv.V != 0.0 ? std::fabs(hv.V) : 1.0;

  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < jumps.size(); ++k)
    if (jumps[k].location > window.a && jumps[k].location < window.b) inside.push_back(k);

  for (std::size_t k : inside) {
    const double s = jumps[k].location;
    const double A = v.plateau_level(k), B = v.plateau_level(k + 1);
    rep.jump_symmetry_residual =
        std::max(rep.jump_symmetry_residual, std::fabs((M * s - A) - (B - M * s)));
  }

  // intersections of interior plateaus (both ends are jumps inside the window)
  // with the line M x
  struct Crossing {
    double x;
    std::size_t plateau;
  };
  std::vector<Crossing> cross;
  if (M != 0.0) {
    for (std::size_t q = 1; q < inside.size(); ++q) {
      const std::size_t k = inside[q];  // plateau k lies between jumps k-1 and k
      const double x = v.plateau_level(k) / M;
      if (x > jumps[k - 1].location && x < jumps[k].location) cross.push_back({x, k});
    }
  }
  for (std::size_t q = 2; q < cross.size(); ++q) {
    const double g1 = cross[q - 1].x - cross[q - 2].x, g2 = cross[q].x - cross[q - 1].x;
    rep.equipartition_residual = std::max(rep.equipartition_residual, std::fabs(g2 - g1));
  }

  const Perturber P{v, alpha, beta, M, window, rep.energy};
  double margin = kInf;
  auto consider = [&](const std::vector<Jump>& js) { margin = std::min(margin, P.energy(js)); };
  const double deltas[] = {1e-3, 1e-2, 1e-1};

  for (std::size_t q = 0; q < inside.size(); ++q) {
    const std::size_t k = inside[q];
    const double s = jumps[k].location;
    const double lo = std::max(window.a, k > 0 ? jumps[k - 1].location : window.a);
    const double hi = std::min(window.b, k + 1 < jumps.size() ? jumps[k + 1].location : window.b);
    for (double c : deltas) {
      for (double sign : {-1.0, 1.0}) {
        // move the jump
        const double t = s + sign * c * H;
        if (t > lo && t < hi) {
          auto js = jumps;
          js[k].location = t;
          consider(js);
        }
        // shift the plateau to the right of jump k when it is interior
        if (q + 1 < inside.size()) {
          auto js = jumps;
          js[k].height += sign * c * vscale;
          js[k + 1].height -= sign * c * vscale;
          consider(js);
        }
      }
      // split the jump in two halves
      if (s - c * H > lo && s + c * H < hi) {
        auto js = jumps;
        js[k] = {s - c * H, 0.5 * jumps[k].height};
        js.push_back({s + c * H, 0.5 * jumps[k].height});
        consider(js);
      }
    }
    // merge with the next jump
    if (q + 1 < inside.size()) {
      const double s2 = jumps[k + 1].location;
      for (double loc : {s, 0.5 * (s + s2), s2}) {
        auto js = jumps;
        js[k] = {loc, jumps[k].height + jumps[k + 1].height};
        js.erase(js.begin() + std::ptrdiff_t(k + 1));
        consider(js);
      }
    }
  }

  // re-partition the intersections between the first and last interior one
  if (cross.size() >= 2) {
    const double xa = cross.front().x, xb = cross.back().x;
    const std::size_t gaps = cross.size() - 1;
    for (std::size_t g : {gaps - 1, gaps + 1}) {
      if (g == 0) {
        continue;
      }
      std::vector<Jump> js;
      for (const auto& j : jumps)
        if (j.location < xa || j.location > xb) js.push_back(j);
      const double d = (xb - xa) / double(g);
      for (std::size_t i = 0; i < g; ++i) js.push_back({xa + (double(i) + 0.5) * d, M * d});
      consider(js);
    }
  }
  rep.perturbation_margin = std::isfinite(margin) ? margin : 0.0;
  const double tol = 1e-9 * std::max(1.0, rep.energy);
  const double rtol = 1e-9 * (H + vscale);
  rep.is_local_min = rep.perturbation_margin >= -tol && rep.jump_symmetry_residual <= rtol &&
                     rep.equipartition_residual <= rtol;
  return rep;
}

}  // namespace pmlab
