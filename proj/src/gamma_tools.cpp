#include "pmlab/gamma_tools.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmlab/energy.hpp"
#include "pmlab/error.hpp"

namespace pmlab {

double substitution_constant(double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::domain, "eps must lie in (0,1)");
  const double le = std::fabs(std::log(eps));
  // log(1 + eps^-4 le^-8), written to stay finite for tiny eps
  const double lg = std::log1p(std::exp(-4.0 * std::log(eps) - 8.0 * std::log(le)));
  return 4.0 * std::sqrt(2.0 / 3.0) * std::pow(lg / le, 0.75);
}

double substitution_threshold(double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::domain, "eps must lie in (0,1)");
  return 1.0 / (eps * eps * std::pow(std::fabs(std::log(eps)), 4));
}

bool SubstitutionCertificate::inequality_holds(double rel_tol) const {
  const double rhs = M_n * jhalf_value;
  return rpm_value >= rhs - rel_tol * std::max(rhs, 1e-300);
}

SubstitutionCertificate substitute(const SampledFunction& u, double eps) {
  const double D = substitution_threshold(eps);
  const std::vector<double> du = first_derivative(u.values(), u.spacing());
  const std::size_t n = u.size();

  // runs of nodes with |u'| > D; gaps of a single node are bridged
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < n;) {
    if (std::fabs(du[i]) <= D) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && std::fabs(du[j + 1]) > D) ++j;
    if (!runs.empty() && i >= 2 && runs.back().second + 2 == i) {
      runs.back().second = j;
    } else {
      runs.push_back({i, j});
    }
    i = j + 1;
  }

  SubstitutionCertificate c;
  std::vector<Jump> jumps;
  for (const auto& [i, j] : runs) {
    const double var = u[j] - u[i];
    const double len = u.x(j) - u.x(i);
    double height = std::fabs(var) - D * len;
    if (height <= 0.0) {
      ++c.clipped;
      continue;
    }
    const double loc = 0.5 * (u.x(i) + u.x(j));
    if (!(loc > u.left() && loc < u.right())) continue;
    if (!jumps.empty() && !(jumps.back().location < loc)) continue;
    jumps.push_back({loc, var > 0.0 ? height : -height});
  }
  const Interval dom{u.left(), u.right()};
  c.skeleton = PureJumpFunction(u[0], std::move(jumps), dom);
  c.M_n = substitution_constant(eps);
  c.rpm_value = eval_rpm(u, eps);
  c.jhalf_value = j_half(c.skeleton, dom);
  // window endpoints are not jump points because jumps sit strictly inside
  const StrictGap gap = strict_distance(u, c.skeleton, dom);
  c.lp_gap = gap.l1_gap;
  c.tv_gap = gap.tv_gap;
  return c;
}

double basic_lower_bound(const SampledFunction& u, double eps, double D) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::domain, "eps must lie in (0,1)");
  require(D > 0.0, ErrorKind::domain, "basic_lower_bound: D must be positive");
  const std::vector<double> du = first_derivative(u.values(), u.spacing());
  const double tol = 1e-6 * D;
  for (std::size_t i = 0; i < du.size(); ++i) {
    const bool end = i == 0 || i + 1 == du.size();
    const double a = std::fabs(du[i]);
    if (a < D - tol || (end && a > D + tol)) {
      std::ostringstream msg;
      msg << "basic_lower_bound: sample " << i << " at x = " << u.x(i) << " has |u'| = " << a
          << (end ? ", expected D = " : ", below D = ") << D;
      fail(ErrorKind::domain, msg.str());
    }
  }
  const double le = std::fabs(std::log(eps));
  const double excess =
      std::max(0.0, std::fabs(u[u.size() - 1] - u[0]) - D * u.length());
  return 4.0 * std::sqrt(2.0 / 3.0) * std::pow(std::log1p(D * D) / le, 0.75) *
         std::sqrt(excess);
}

double pj_l1_distance(const PureJumpFunction& u, const PureJumpFunction& v, Interval w) {
  std::vector<double> pts{w.a, w.b};
  for (const auto* f : {&u, &v})
    for (const auto& j : f->jumps())
      if (j.location > w.a && j.location < w.b) pts.push_back(j.location);
  std::sort(pts.begin(), pts.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double mid = 0.5 * (pts[k] + pts[k + 1]);
    const double du = u.plateau_level(u.plateau_index(mid)) - v.plateau_level(v.plateau_index(mid));
    s += std::fabs(du) * (pts[k + 1] - pts[k]);
  }
  return s;
}

namespace {

double tv_on(const PureJumpFunction& u, Interval w) {
  double s = 0.0;
  for (const auto& j : u.jumps())
    if (j.location > w.a && j.location < w.b) s += std::fabs(j.height);
  return s;
}

}  // namespace

LscReport jhalf_lsc_probe(const std::vector<PureJumpFunction>& seq,
                          const PureJumpFunction& limit, Interval window, double tol) {
  require(!seq.empty(), ErrorKind::usage, "jhalf_lsc_probe: empty sequence");
  LscReport r;
  for (const auto& z : seq) {
    r.jhalf.push_back(j_half(z, window));
    r.total_variation.push_back(tv_on(z, window));
    r.l1_to_limit.push_back(pj_l1_distance(z, limit, window));
  }
  r.limit_jhalf = j_half(limit, window);
  r.limit_total_variation = tv_on(limit, window);
  const std::size_t half = seq.size() / 2;
  r.liminf_jhalf = *std::min_element(r.jhalf.begin() + std::ptrdiff_t(half), r.jhalf.end());
  r.converges_in_l1 = r.l1_to_limit.back() <= tol * std::max(1.0, window.length()) ||
                      (seq.size() > 1 && r.l1_to_limit.back() < r.l1_to_limit.front());
  r.lsc_holds = r.liminf_jhalf >= r.limit_jhalf - tol * std::max(1.0, r.limit_jhalf);
  r.jhalf_converges = std::fabs(r.jhalf.back() - r.limit_jhalf) <= tol * std::max(1.0, r.limit_jhalf);
  r.tv_converges = std::fabs(r.total_variation.back() - r.limit_total_variation) <=
                   tol * std::max(1.0, r.limit_total_variation);
  r.strict_implication = !r.jhalf_converges || r.tv_converges;
  return r;
}

}  // namespace pmlab
