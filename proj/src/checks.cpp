#include "pmlab/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <random>
#include <sstream>
#include <thread>

#include "pmlab/energy.hpp"
#include "pmlab/error.hpp"
#include "pmlab/experiment.hpp"
#include "pmlab/gamma_tools.hpp"
#include "pmlab/limit_solver.hpp"
#include "pmlab/plot.hpp"
#include "pmlab/pure_jump.hpp"
#include "pmlab/variational.hpp"

namespace pmlab {

bool CriterionResult::pass() const {
  return !items.empty() &&
         std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

bool CheckReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& c) { return c.pass(); });
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& c : criteria) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& i : c.items)
      items.push_back({{"name", i.name}, {"pass", i.pass}, {"value", i.value}});
    crit.push_back({{"criterion", c.id}, {"title", c.title}, {"pass", c.pass()}, {"items", items}});
  }
  return {{"suite", suite}, {"pass", pass()}, {"seconds", seconds}, {"criteria", crit}};
}

std::vector<std::string> check_suites() {
  return {"formulas", "limit_solver", "solver_props", "sweeps_small", "sweeps_full"};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

std::string fmt_list(const std::vector<double>& xs, int precision = 5) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i], precision);
  return s;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

void log_line(const CheckOptions& o, const std::string& s) {
  if (o.log) o.log(s);
}

// Runs fn(i) for i in [0, n) on the available cores; results keep index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<T> out(n);
  std::vector<std::future<void>> jobs;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

// ---------------------------------------------------------------- formulas

CriterionResult check_formulas() {
  CriterionResult c{1, "formula identities", {}};
  const double a0 = alpha0();
  const double a0_ref = 16.0 / std::sqrt(3.0);
  c.items.push_back({"alpha0 = 16/sqrt(3)", std::fabs(a0 - a0_ref) <= 1e-12,
                     "|diff| = " + fmt(std::fabs(a0 - a0_ref), 3)});

  const std::vector<double> betas = {0.25, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> slopes = {-1.5, 0.3, 0.5, 1.0, 2.0};
  double worst = 0.0;
  for (double b : betas)
    for (double m : slopes) {
      const auto p = staircase_params(b, m);
      const auto q = staircase_params_general(a0, b, m);
      worst = std::max({worst, rel(p.H, q.H), rel(p.V, q.V)});
    }
  c.items.push_back({"staircase_params matches the general form at alpha0", worst <= 1e-12,
                     "max rel diff = " + fmt(worst, 3)});

  worst = 0.0;
  for (double b : betas) {
    const double c1 = mu_bounds({a0, b, 1.0, 1.0}).c1;
    worst = std::max(worst, rel(c1, 10.0 * std::pow(2.0 * b / 27.0, 0.2)));
  }
  c.items.push_back({"c1(alpha0, beta) = 10 (2 beta / 27)^(1/5)", worst <= 1e-12,
                     "max rel diff = " + fmt(worst, 3)});

  // Hermite cubic written out by hand; w''^2 is quadratic so two Gauss points are exact.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double a = U(rng), len = 0.1 + std::fabs(U(rng));
    const double A0 = U(rng), A1 = U(rng), B0 = U(rng), B1 = U(rng);
    const CubicSolution s = cubic_interpolant(a, a + len, A0, A1, B0, B1);
    auto w2 = [&](double t) {
      return (A0 * (12 * t - 6) + len * A1 * (6 * t - 4) + B0 * (6 - 12 * t) +
              len * B1 * (6 * t - 2)) /
             (len * len);
    };
    const double g = 0.5 / std::sqrt(3.0);
    const double quad = 0.5 * len * (std::pow(w2(0.5 - g), 2) + std::pow(w2(0.5 + g), 2));
    worst = std::max(worst, rel(s.min_bending, quad));
  }
  c.items.push_back({"cubic_interpolant bending equals quadrature", worst <= 1e-10,
                     "max rel diff over 50 cases = " + fmt(worst, 3)});

  double worst_d = 0.0, worst_z = 0.0;
  for (double al : {1.0, a0})
    for (double b : {0.5, 1.0, 2.0})
      for (double m : {0.5, 1.0, 2.0}) {
        const double H = staircase_params_general(al, b, m).H;
        const double z0 = semi_entire_offset(H);
        worst_z = std::max(worst_z, std::fabs(z0 - std::sqrt(5.0 / 3.0) * H) / H);
        auto d = [&](double h) {
          return (semi_entire_phi(al, b, m, z0, h) - semi_entire_phi(al, b, m, z0, -h)) /
                 (2.0 * h);
        };
        const double h = 1e-3 * H;
        worst_d = std::max(worst_d, std::fabs((4.0 * d(h / 2) - d(h)) / 3.0));
      }
  c.items.push_back({"z0 = sqrt(5/3) H", worst_z <= 1e-12, "max rel diff = " + fmt(worst_z, 3)});
  c.items.push_back({"phi'(0) = 0 at z0", worst_d <= 1e-8, "max |phi'(0)| = " + fmt(worst_d, 3)});
  return c;
}

// ------------------------------------------------------------ limit solver

struct LatticeRow {
  double alpha, beta, M, L;
  double mu0 = 0, mu0_star = 0, oracle = 0, oracle_bc = 0, bound = 0, bound_bc = 0;
  double lower = 0, upper = 0, step_rel = 0;
};

CriterionResult check_limit_lattice(const CheckOptions& opts) {
  CriterionResult c{2, "limit-solver oracle equivalence", {}};
  std::vector<LatticeRow> rows;
  for (double al : {1.0, alpha0()})
    for (double b : {0.5, 1.0, 2.0})
      for (double m : {0.5, 1.0, 2.0})
        for (double L : {4.0, 10.0}) rows.push_back({al, b, m, L});
  log_line(opts, "limit lattice: " + std::to_string(rows.size()) + " points");

  rows = parallel_map<LatticeRow>(rows.size(), [&](std::size_t i) {
    LatticeRow r = rows[i];
    const LimitProblem p{r.alpha, r.beta, r.L, r.M};
    const double dx = r.L / 512.0, dv = std::fabs(r.M) * r.L / 512.0;
    r.mu0 = mu0(p).value;
    r.mu0_star = mu0_star(p).value;
    const OracleResult o = mu0_oracle(p, dx, dv, false);
    const OracleResult ob = mu0_oracle(p, dx, dv, true);
    r.oracle = o.value;
    r.bound = o.resolution_bound;
    r.oracle_bc = ob.value;
    r.bound_bc = ob.resolution_bound;
    const MuBounds mb = mu_bounds(p);
    r.lower = mb.lower;
    r.upper = mb.upper;
    const double H = staircase_params_general(r.alpha, r.beta, r.M).H;
    r.step_rel = rel(relaxed_step_length(r.alpha, r.beta, r.M), 2.0 * H);
    return r;
  });

  double worst_free = 0.0, worst_bc = 0.0, worst_step = 0.0, worst_order = -1e300;
  int sandwich_fail = 0;
  for (const auto& r : rows) {
    worst_free = std::max(worst_free, std::fabs(r.mu0 - r.oracle) / r.bound);
    worst_bc = std::max(worst_bc, std::fabs(r.mu0_star - r.oracle_bc) / r.bound_bc);
    worst_step = std::max(worst_step, r.step_rel);
    worst_order = std::max(worst_order, r.mu0 - r.mu0_star);
    if (!(r.lower <= r.mu0 && r.mu0 <= r.upper && r.lower <= r.mu0_star && r.mu0_star <= r.upper))
      ++sandwich_fail;
  }
  const std::string n = std::to_string(rows.size());
  c.items.push_back({"|mu0 - oracle| <= resolution bound", worst_free <= 1.0,
                     "max |diff| / bound = " + fmt(worst_free, 4) + " over " + n + " points"});
  c.items.push_back({"|mu0_star - oracle(bc)| <= resolution bound", worst_bc <= 1.0,
                     "max |diff| / bound = " + fmt(worst_bc, 4) + " over " + n + " points"});
  c.items.push_back({"sandwich bounds hold", sandwich_fail == 0,
                     std::to_string(sandwich_fail) + " violations over " + n + " points"});
  c.items.push_back({"mu0 <= mu0_star", worst_order <= 0.0,
                     "max (mu0 - mu0_star) = " + fmt(worst_order, 4)});
  c.items.push_back({"relaxed step length = 2H", worst_step <= 1e-8,
                     "max rel diff = " + fmt(worst_step, 3)});
  return c;
}

CriterionResult check_local_minimizers() {
  CriterionResult c{3, "local-minimizer classification", {}};
  const double a0 = alpha0();
  double worst_res = 0.0, worst_margin = 1e300;
  bool all_ok = true;
  double best_bad_margin = -1e300;
  bool any_bad_accepted = false;
  for (double b : {0.5, 1.0, 2.0})
    for (double m : {0.5, 1.0, 2.0}) {
      const auto hv = staircase_params_general(a0, b, m);
      const Interval window{0.25 * hv.H, 10.25 * hv.H};
      const Interval dom{-4.0 * hv.H, 14.0 * hv.H};
      const LocalMinReport r =
          verify_local_minimizer(canonical_staircase(hv.H, hv.V).on_window(dom), a0, b, m, window);
      worst_res = std::max({worst_res, r.jump_symmetry_residual / (hv.H + hv.V),
                            r.equipartition_residual / (hv.H + hv.V)});
      worst_margin = std::min(worst_margin, r.perturbation_margin);
      all_ok = all_ok && r.is_local_min;
      const LocalMinReport bad = verify_local_minimizer(
          canonical_staircase(1.5 * hv.H, 1.5 * hv.V).on_window(dom), a0, b, m, window);
      best_bad_margin = std::max(best_bad_margin, bad.perturbation_margin);
      any_bad_accepted = any_bad_accepted || bad.is_local_min;
    }
  c.items.push_back({"canonical staircase: zero residuals", worst_res <= 1e-9,
                     "max residual / (H + V) = " + fmt(worst_res, 3) + " over 9 (beta, M)"});
  c.items.push_back({"canonical staircase: nonnegative margin", all_ok,
                     "min margin = " + fmt(worst_margin, 4)});
  c.items.push_back({"step 1.5 H staircase is rejected", !any_bad_accepted && best_bad_margin < 0,
                     "max margin = " + fmt(best_bad_margin, 4)});

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int interior = 0;
  double worst_t = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double C1 = 0.1 + 9.9 * U(rng);
    const double C0 = U(rng) * 6.0 * C1 / std::sqrt(2.0);
    const EquipartitionResult e = equipartition_minimize(C0, C1);
    if (e.interior) {
      ++interior;
      worst_t = std::max(worst_t, std::fabs(e.t - 0.5));
    }
  }
  c.items.push_back({"equipartition: t* = 1/2 whenever interior", interior > 0 && worst_t <= 1e-12,
                     std::to_string(interior) + "/100 interior, max |t - 1/2| = " +
                         fmt(worst_t, 3)});
  return c;
}

// ----------------------------------------------------------- solver props

double grad_fd_error(const EnergyCoefficients& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double h = 1.0 / double(n - 1);
  std::vector<double> u(n), f(n), g(n);
  const double p1 = U(rng), p2 = U(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = h * double(i);
    u[i] = std::sin(3.0 * x + p1) + 0.3 * std::cos(17.0 * x + p2) + 0.01 * U(rng);
    f[i] = x + 0.2 * U(rng);
  }
  evaluate_energy_gradient(u, h, c, f, g);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 1e-6 * (1.0 + std::fabs(u[i]));
    std::vector<double> up = u, um = u;
    up[i] += d;
    um[i] -= d;
    const double fd = (evaluate_energy(up, h, c, f).total - evaluate_energy(um, h, c, f).total) /
                      (2.0 * d);
    num += (fd - g[i]) * (fd - g[i]);
    den += g[i] * g[i];
  }
  return std::sqrt(num / den);
}

CriterionResult check_solver_props(const CheckOptions& opts) {
  CriterionResult c{4, "solver properties", {}};

  const double e1 = grad_fd_error(pmf_coefficients(0.2, 1.0), 120, 1);
  const double e2 = grad_fd_error(rpmf_coefficients(0.2, 2.0), 120, 2);
  const double e3 = grad_fd_error({1e-3, 1.0, 0.5}, 200, 3);
  const double eg = std::max({e1, e2, e3});
  c.items.push_back({"gradient matches finite differences", eg <= 1e-5,
                     "max rel error = " + fmt(eg, 3)});

  std::vector<std::pair<SampledFunction, double>> produced;  // rescaled minimizer, eps

  SolveOptions so;
  so.gradient_tolerance = 1e-9;
  const double eps = 0.2;
  const std::size_t n = pmf_grid_size(eps);
  auto pmf = [&](const std::function<double(double)>& fn) {
    const SolveResult r = minimize_pmf(eps, 1.0, SampledFunction::sample(0.0, 1.0, n, fn), so);
    const double w = omega(eps);
    std::vector<double> v(r.minimizer.values().begin(), r.minimizer.values().end());
    for (auto& x : v) x /= w;
    produced.push_back({SampledFunction(0.0, r.minimizer.spacing() / w, std::move(v)), eps});
    return r.energy.total;
  };
  log_line(opts, "solver_props: constant forcing and equivariance");
  const double m_const = pmf([](double) { return 0.7; });
  c.items.push_back({"constant forcing has zero minimum", std::fabs(m_const) <= 1e-14,
                     "m = " + fmt(m_const, 3)});

  auto cubic = [](double x) { return 1.5 * x - x * x * x / 14.0; };
  const double m0 = pmf(cubic);
  const double m_shift = pmf([&](double x) { return cubic(x) + 3.5; });
  const double m_refl = pmf([&](double x) { return cubic(1.0 - x); });
  const double m_neg = pmf([&](double x) { return -cubic(x); });
  const double eq = std::max({rel(m_shift, m0), rel(m_refl, m0), rel(m_neg, m0)});
  c.items.push_back({"shift and reflection equivariance", eq <= 1e-10,
                     "max rel diff = " + fmt(eq, 3) + " (m = " + fmt(m0, 8) + ")"});

  log_line(opts, "solver_props: free vs pinned rescaled problem");
  double worst_gap = -1e300;
  std::string mu_text;
  for (auto [e, M, L] : {std::tuple{0.2, 1.0, 10.0}, std::tuple{0.25, 0.5, 8.0},
                         std::tuple{0.2, 2.0, 6.0}}) {
    const std::size_t m = rpmf_grid_size(e, L);
    const SampledFunction g = SampledFunction::sample(0.0, L, m, [M](double y) { return M * y; });
    SolveOptions po;
    const SolveResult pinned = minimize_rpmf(e, 1.0, g, po, BoundaryData{0.0, M, M * L, M});
    SolveOptions fo;
    fo.warm_start = pinned.minimizer;
    fo.multistart_seeds = {"warm", "forcing", "recovery"};
    const SolveResult free = minimize_rpmf(e, 1.0, g, fo);
    worst_gap = std::max(worst_gap, free.energy.total - pinned.energy.total);
    mu_text += (mu_text.empty() ? "" : "; ") + fmt(free.energy.total, 6) + " <= " +
               fmt(pinned.energy.total, 6);
    produced.push_back({free.minimizer, e});
    produced.push_back({pinned.minimizer, e});
  }
  c.items.push_back({"mu_eps <= mu_eps_star", worst_gap <= 0.0, mu_text});

  log_line(opts, "solver_props: boundary patch certificates");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int accepted = 0, ok = 0, draws = 0;
  double worst_ratio = 0.0;
  while (accepted < 20 && draws < 2000) {
    ++draws;
    const double e = 0.05 + 0.25 * U(rng);
    const double len = 0.5 + 4.5 * U(rng);
    const double A0 = 4.0 * U(rng) - 2.0, B0 = 4.0 * U(rng) - 2.0;
    const double A1 = 6.0 * U(rng) - 3.0, B1 = 6.0 * U(rng) - 3.0;
    try {
      const PatchCertificate p = boundary_patch(0.0, len, A0, A1, B0, B1, e);
      ++accepted;
      const double r = std::max(p.rpm / p.rpm_bound, p.l2_squared / p.l2_bound);
      worst_ratio = std::max(worst_ratio, r);
      if (p.rpm <= p.rpm_bound && p.l2_squared <= p.l2_bound) ++ok;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::domain) throw;
    }
  }
  c.items.push_back({"boundary patch certificates", accepted == 20 && ok == 20,
                     std::to_string(ok) + "/" + std::to_string(accepted) +
                         " hold, max value / bound = " + fmt(worst_ratio, 4)});

  int holds = 0;
  for (const auto& [u, e] : produced)
    if (substitute(u, e).inequality_holds()) ++holds;
  c.items.push_back({"substitution inequality on produced minimizers",
                     holds == int(produced.size()),
                     std::to_string(holds) + "/" + std::to_string(produced.size())});
  return c;
}

// ----------------------------------------------------------------- sweeps

ExperimentConfig sweep_config(const std::vector<double>& eps, const std::string& out) {
  ExperimentConfig cfg;
  cfg.forcing.id = "linear";
  cfg.forcing.slope = 1.0;
  cfg.beta = 1.0;
  cfg.eps = eps;
  cfg.output_dir = out;
  return cfg;
}

SweepOutput sweep(const ExperimentConfig& cfg, const CheckOptions& opts) {
  const bool write = !cfg.output_dir.empty();
  SweepOutput out = run_sweep(cfg, write, [&](const SweepRecord& r) {
    std::string s = "  eps = " + format_double(r.eps) + ": ";
    s += r.error.empty() ? "m/omega^2 = " + fmt(r.m_over_omega2) + ", m/omega^(5/2) = " +
                               fmt(r.m_over_omega52) + ", " + fmt(r.wall_time, 3) + " s"
                         : "error: " + r.error;
    log_line(opts, s);
  });
  if (write && cfg.plots) emit_plots(cfg, out.records, out.minimizers, cfg.output_dir);
  return out;
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return !xs.empty();
}

std::string errors_of(const std::vector<SweepRecord>& rs, int* failed, int* unconverged) {
  std::string s;
  *failed = *unconverged = 0;
  for (const auto& r : rs) {
    if (!r.error.empty()) {
      ++*failed;
      s += " eps " + format_double(r.eps) + ": " + r.error + ";";
    } else if (!r.converged) {
      ++*unconverged;
    }
  }
  return s;
}

CriterionResult check_energy_trend(const std::vector<SweepRecord>& rs, double tolerance) {
  CriterionResult c{5, "energy-scaling trend", {}};
  int failed = 0, unconverged = 0;
  const std::string errs = errors_of(rs, &failed, &unconverged);
  c.items.push_back({"all solves produced a minimizer", failed == 0,
                     std::to_string(rs.size() - failed) + "/" + std::to_string(rs.size()) +
                         ", unconverged " + std::to_string(unconverged) + errs});
  if (failed) return c;
  const double limit = rs.front().predicted_limit;
  std::vector<double> vals, gaps;
  bool below = true, above = true;
  for (const auto& r : rs) {
    vals.push_back(r.m_over_omega2);
    gaps.push_back(std::fabs(r.m_over_omega2 - limit) / limit);
    below = below && r.m_over_omega2 < limit;
    above = above && r.m_over_omega2 > limit;
  }
  const std::string side = below ? "from below" : above ? "from above" : "from both sides";
  c.items.push_back({"m/omega^2 approaches " + fmt(limit, 5) + " monotonically",
                     strictly_decreasing(gaps),
                     "values " + fmt_list(vals) + " (" + side + "), relative gaps " +
                         fmt_list(gaps, 3)});
  c.items.push_back({"final value within " + fmt(100 * tolerance, 3) + "% of the limit",
                     gaps.back() <= tolerance, "gap " + fmt(100 * gaps.back(), 3) + "%"});
  return c;
}

CriterionResult check_microstructure(const ExperimentConfig& cfg,
                                     const std::vector<SweepRecord>& rs) {
  CriterionResult c{6, "staircase microstructure", {}};
  int failed = 0, unconverged = 0;
  errors_of(rs, &failed, &unconverged);
  if (failed) {
    c.items.push_back({"all solves produced a minimizer", false, std::to_string(failed) + " failed"});
    return c;
  }
  bool fake_ok = true, true_ok = true, step_ok = true;
  std::string fake_txt, true_txt, step_txt;
  for (std::size_t k = 0; k < cfg.centers.size(); ++k) {
    std::vector<double> fd, td;
    for (const auto& r : rs) {
      fd.push_back(r.fits[k].fake_density);
      td.push_back(r.fits[k].true_density);
    }
    fake_ok = fake_ok && strictly_decreasing(fd);
    true_ok = true_ok && strictly_decreasing(td);
    const std::string at = "x=" + format_double(cfg.centers[k]) + ": ";
    fake_txt += (k ? "; " : "") + at + fmt_list(fd, 3);
    true_txt += (k ? "; " : "") + at + fmt_list(td, 3);
    const CenterFit& last = rs.back().fits[k];
    const double target = 2.0 * last.fake.H;
    const double est = last.fake.step_length_estimate;
    const bool ok = est > 0.0 && std::fabs(est - target) <= 0.2 * target;
    step_ok = step_ok && ok;
    step_txt += (k ? "; " : "") + at + (est > 0.0 ? fmt(est, 4) : std::string("no pair of jumps")) +
                " vs 2H = " + fmt(target, 4);
  }
  c.items.push_back({"fake blow-up fit distance decreases with eps", fake_ok,
                     "distance per unit length " + fake_txt});
  c.items.push_back({"step length within 20% of 2H at the smallest eps", step_ok, step_txt});
  c.items.push_back({"true blow-up fit distance decreases with eps", true_ok,
                     "distance per unit length " + true_txt});
  return c;
}

CriterionResult check_varifold(const ExperimentConfig& cfg, const std::vector<SweepRecord>& rs) {
  CriterionResult c{7, "varifold identity", {}};
  int failed = 0, unconverged = 0;
  errors_of(rs, &failed, &unconverged);
  if (failed) {
    c.items.push_back({"all solves produced a minimizer", false, std::to_string(failed) + " failed"});
    return c;
  }
  for (std::size_t k = 0; k < cfg.test_functions.size(); ++k) {
    std::vector<double> res;
    for (const auto& r : rs) res.push_back(std::fabs(r.varifold_pair[k] - r.varifold_limit[k]));
    if (cfg.test_functions[k] != "cos_theta") {
      c.items.push_back({"residual decreases for phi = " + cfg.test_functions[k],
                         strictly_decreasing(res), "residuals " + fmt_list(res, 4)});
    } else {
      // exact identity: the residual is zero at every eps, so only that is checked
      double worst = 0.0;
      for (const auto& r : rs) worst = std::max(worst, std::fabs(r.varifold_pair[k] - 1.0));
      c.items.push_back({"pairing with cos theta equals 1", worst <= 1e-8,
                         "max |pair - 1| = " + fmt(worst, 3)});
    }
  }
  return c;
}

CriterionResult check_jump_scaling(const std::vector<SweepRecord>& rs) {
  CriterionResult c{8, "pure-jump forcing scaling (experimental)", {}};
  int failed = 0, unconverged = 0;
  const std::string errs = errors_of(rs, &failed, &unconverged);
  c.items.push_back({"all solves produced a minimizer", failed == 0,
                     std::to_string(rs.size() - failed) + "/" + std::to_string(rs.size()) +
                         ", unconverged " + std::to_string(unconverged) + errs});
  if (failed) return c;
  const double limit = rs.front().predicted_limit;
  std::vector<double> vals, gaps;
  for (const auto& r : rs) {
    vals.push_back(r.m_over_omega52);
    gaps.push_back(std::fabs(r.m_over_omega52 - limit) / limit);
  }
  c.items.push_back({"m/omega^(5/2) trends toward " + fmt(limit, 5), strictly_decreasing(gaps),
                     "values " + fmt_list(vals) + ", relative gaps " + fmt_list(gaps, 3)});
  return c;
}

std::string sub_dir(const CheckOptions& o, const std::string& name) {
  return o.output_dir.empty() ? std::string() : o.output_dir + "/" + name;
}

}  // namespace

CheckReport run_check(const std::string& suite, const CheckOptions& opts) {
  const auto suites = check_suites();
  require(std::find(suites.begin(), suites.end(), suite) != suites.end(), ErrorKind::usage,
          "unknown check suite '" + suite + "'");
  CheckReport rep;
  rep.suite = suite;
  const auto t0 = Clock::now();

  auto budget = [&](CriterionResult& c, double limit_s) {
    const double t = seconds_since(t0);
    c.items.push_back({"suite time under " + fmt(limit_s, 3) + " s", t < limit_s,
                       fmt(t, 3) + " s"});
  };

  if (suite == "formulas") {
    rep.criteria.push_back(check_formulas());
    budget(rep.criteria.back(), 1.0);
  } else if (suite == "limit_solver") {
    rep.criteria.push_back(check_limit_lattice(opts));
    rep.criteria.push_back(check_local_minimizers());
    budget(rep.criteria.front(), 300.0);
  } else if (suite == "solver_props") {
    rep.criteria.push_back(check_solver_props(opts));
    budget(rep.criteria.back(), 300.0);
  } else if (suite == "sweeps_small") {
    log_line(opts, "linear forcing sweep");
    const ExperimentConfig cfg =
        sweep_config({0.2, 0.1, 0.07, 0.05}, sub_dir(opts, "sweeps_small"));
    const SweepOutput out = sweep(cfg, opts);
    rep.criteria.push_back(check_energy_trend(out.records, 0.35));
  } else {
    log_line(opts, "linear forcing sweep");
    const ExperimentConfig cfg =
        sweep_config({0.2, 0.1, 0.07, 0.05, 0.03}, sub_dir(opts, "sweeps_full/linear"));
    const SweepOutput out = sweep(cfg, opts);
    rep.criteria.push_back(check_energy_trend(out.records, 0.25));
    rep.criteria.push_back(check_microstructure(cfg, out.records));
    rep.criteria.push_back(check_varifold(cfg, out.records));

    log_line(opts, "jump forcing sweep");
    ExperimentConfig jc = sweep_config({0.2, 0.1, 0.07, 0.05, 0.03}, sub_dir(opts, "sweeps_full/jump"));
    jc.forcing.id = "jump";
    jc.forcing.jump_location = 0.5;
    jc.forcing.jump_height = 1.0;
    jc.test_functions = {"one", "cos_theta"};
    const SweepOutput jout = sweep(jc, opts);
    rep.criteria.push_back(check_jump_scaling(jout.records));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

}  // namespace pmlab
