#include "pmlab/pure_jump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pmlab/error.hpp"

namespace pmlab {

PureJumpFunction::PureJumpFunction(double base, std::vector<Jump> jumps, Interval domain)
    : base_(base), jumps_(std::move(jumps)), domain_(domain) {
  require(domain_.a < domain_.b, ErrorKind::domain, "pure jump function: empty domain");
  require(std::isfinite(base_), ErrorKind::domain, "pure jump function: non-finite base");
  prefix_.resize(jumps_.size() + 1);
  prefix_[0] = base_;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const Jump& j = jumps_[k];
    require(j.location > domain_.a && j.location < domain_.b, ErrorKind::domain,
            "pure jump function: jump location outside the open domain");
    require(j.height != 0.0 && std::isfinite(j.height), ErrorKind::domain,
            "pure jump function: jump heights must be finite and nonzero");
    if (k > 0) {
      require(jumps_[k - 1].location < j.location, ErrorKind::domain,
              "pure jump function: jump locations must be strictly increasing");
    }
    prefix_[k + 1] = prefix_[k] + j.height;
  }
}

std::size_t PureJumpFunction::plateau_index(double x) const noexcept {
  // number of jumps with location <= x (right-continuous convention)
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x,
                             [](double v, const Jump& j) { return v < j.location; });
  return std::size_t(it - jumps_.begin());
}

double PureJumpFunction::plateau_level(std::size_t k) const noexcept { return prefix_[k]; }

double PureJumpFunction::value(double x) const {
  require(x >= domain_.a && x <= domain_.b, ErrorKind::domain,
          "pure jump function: evaluation point outside the domain");
  if (x == domain_.b) return right_value();
  return prefix_[plateau_index(x)];
}

double PureJumpFunction::right_value() const noexcept { return prefix_.back(); }

double PureJumpFunction::total_variation() const noexcept {
  double s = 0.0;
  for (const auto& j : jumps_) s += std::fabs(j.height);
  return s;
}

PureJumpFunction PureJumpFunction::restricted(Interval window) const {
  require(window.a >= domain_.a && window.b <= domain_.b && window.a < window.b,
          ErrorKind::domain, "restricted: window must lie inside the domain");
  std::vector<Jump> inside;
  for (const auto& j : jumps_)
    if (j.location > window.a && j.location < window.b) inside.push_back(j);
  return PureJumpFunction(prefix_[plateau_index(window.a)], std::move(inside), window);
}

PureJumpFunction truncate_jumps(double base, std::vector<Jump> jumps, Interval domain,
                                std::size_t max_jumps, double* tail_bound) {
  double tail = 0.0;
  if (jumps.size() > max_jumps) {
    std::stable_sort(jumps.begin(), jumps.end(), [](const Jump& x, const Jump& y) {
      return std::fabs(x.height) > std::fabs(y.height);
    });
    for (std::size_t k = max_jumps; k < jumps.size(); ++k) tail += std::fabs(jumps[k].height);
    jumps.resize(max_jumps);
  }
  std::sort(jumps.begin(), jumps.end(),
            [](const Jump& x, const Jump& y) { return x.location < y.location; });
  if (tail_bound) *tail_bound = tail;
  return PureJumpFunction(base, std::move(jumps), domain);
}

double j_half(const PureJumpFunction& u, Interval window) {
  double s = 0.0;
  for (const auto& j : u.jumps())
    if (j.location > window.a && j.location < window.b) s += std::sqrt(std::fabs(j.height));
  return s;
}

namespace {

// Integral over (p, q) of (c - (m x + b))^2.
double constant_vs_linear(double c, double m, double b, double p, double q) {
  if (q <= p) return 0.0;
  if (m == 0.0) {
    const double d = c - b;
    return d * d * (q - p);
  }
  // substitute t = m x + b - c; stable form avoiding cancellation
  const double tp = m * p + b - c, tq = m * q + b - c;
  return (q - p) * (tp * tp + tp * tq + tq * tq) / 3.0;
}

// Breakpoints of u inside the window, window endpoints included.
std::vector<double> breakpoints(const PureJumpFunction& u, Interval w) {
  std::vector<double> pts{w.a};
  for (const auto& j : u.jumps())
    if (j.location > w.a && j.location < w.b) pts.push_back(j.location);
  pts.push_back(w.b);
  return pts;
}

}  // namespace

double fidelity_integral(const PureJumpFunction& u, const LimitForcing& f, Interval window) {
  require(window.a >= u.domain().a && window.b <= u.domain().b && window.a < window.b,
          ErrorKind::domain, "fidelity_integral: window must lie inside the domain");
  std::vector<double> pts = breakpoints(u, window);
  if (const auto* g = std::get_if<PureJumpFunction>(&f)) {
    for (const auto& j : g->jumps())
      if (j.location > window.a && j.location < window.b) pts.push_back(j.location);
    std::sort(pts.begin(), pts.end());
  }
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double p = pts[k], q = pts[k + 1];
    if (q <= p) continue;
    const double mid = 0.5 * (p + q);
    const double c = u.plateau_level(u.plateau_index(mid));
    if (const auto* lin = std::get_if<LinearForcing>(&f)) {
      s += constant_vs_linear(c, lin->slope, lin->intercept, p, q);
    } else {
      const auto& g = std::get<PureJumpFunction>(f);
      const double d = c - g.plateau_level(g.plateau_index(mid));
      s += d * d * (q - p);
    }
  }
  return s;
}

double jf_half(const PureJumpFunction& u, double alpha, double beta, const LimitForcing& f,
               Interval window) {
  return alpha * j_half(u, window) + beta * fidelity_integral(u, f, window);
}

std::string to_string(TranslationKind kind) {
  switch (kind) {
    case TranslationKind::oblique: return "oblique";
    case TranslationKind::horizontal: return "horizontal";
    case TranslationKind::vertical: return "vertical";
  }
  return "oblique";
}

TranslationKind translation_kind_from_string(const std::string& s) {
  if (s == "oblique") return TranslationKind::oblique;
  if (s == "horizontal") return TranslationKind::horizontal;
  if (s == "vertical") return TranslationKind::vertical;
  fail(ErrorKind::usage, "unknown translation kind '" + s + "'");
}

double unit_staircase(double x) noexcept { return 2.0 * std::floor(0.5 * (x + 1.0)); }

Staircase::Staircase(StaircaseSpec spec) : spec_(spec) {
  require(spec_.H > 0.0 && std::isfinite(spec_.H), ErrorKind::domain,
          "staircase: H must be positive");
  require(spec_.tau0 >= -1.0 && spec_.tau0 <= 1.0, ErrorKind::domain,
          "staircase: tau0 must lie in [-1,1]");
}

double Staircase::shift() const noexcept {
  return spec_.kind == TranslationKind::vertical ? spec_.H : spec_.H * spec_.tau0;
}

double Staircase::vertical_offset() const noexcept {
  switch (spec_.kind) {
    case TranslationKind::oblique: return spec_.V * spec_.tau0;
    case TranslationKind::horizontal: return 0.0;
    case TranslationKind::vertical: return spec_.V * (1.0 - spec_.tau0);
  }
  return 0.0;
}

double Staircase::value(double x) const noexcept {
  if (degenerate()) return 0.0;
  return spec_.V * unit_staircase((x - shift()) / spec_.H) + vertical_offset();
}

PureJumpFunction Staircase::on_window(Interval domain) const {
  if (degenerate()) return PureJumpFunction::constant(0.0, domain);
  const double H = spec_.H, s = shift();
  // jumps at s + (2k+1) H
  const double kfirst = std::floor((domain.a - s - H) / (2.0 * H));
  std::vector<Jump> jumps;
  for (double k = kfirst;; k += 1.0) {
    const double loc = s + (2.0 * k + 1.0) * H;
    if (loc >= domain.b) break;
    if (loc > domain.a) jumps.push_back({loc, 2.0 * spec_.V});
  }
  // right limit just after domain.a
  const double base = spec_.V * unit_staircase((domain.a - s) / H) + vertical_offset();
  // a jump exactly at domain.a is already included in the right-continuous base
  return PureJumpFunction(base, std::move(jumps), domain);
}

Staircase canonical_staircase(double H, double V) {
  return Staircase({H, V, TranslationKind::oblique, 0.0});
}

StaircaseParams staircase_params(double beta, double slope) {
  require(beta > 0.0, ErrorKind::domain, "staircase_params: beta must be positive");
  if (slope == 0.0) return {1.0, 0.0};
  const double H = std::pow(24.0 / (beta * beta * std::pow(std::fabs(slope), 3)), 0.2);
  return {H, slope * H};
}

StaircaseParams staircase_params_general(double alpha, double beta, double M) {
  require(alpha > 0.0 && beta > 0.0, ErrorKind::domain,
          "staircase_params_general: alpha and beta must be positive");
  if (M == 0.0) return {1.0, 0.0};
  const double H =
      0.5 * std::pow(9.0 * alpha * alpha / (beta * beta * std::pow(std::fabs(M), 3)), 0.2);
  return {H, M * H};
}

Staircase translate(double H, double V, TranslationKind kind, double tau0) {
  return Staircase({H, V, kind, tau0});
}

double semi_entire_offset(double H) { return std::sqrt(5.0 / 3.0) * H; }

PureJumpFunction semi_entire_minimizer(double alpha, double beta, double M, double L) {
  require(alpha > 0.0 && beta > 0.0, ErrorKind::domain,
          "semi_entire_minimizer: alpha and beta must be positive");
  require(L > 0.0, ErrorKind::domain, "semi_entire_minimizer: L must be positive");
  const Interval dom{0.0, L};
  if (M == 0.0) return PureJumpFunction::constant(0.0, dom);
  const auto p = staircase_params_general(alpha, beta, M);
  const double z0 = semi_entire_offset(p.H);
  std::vector<Jump> jumps;
  for (double loc = z0 + p.H; loc < L; loc += 2.0 * p.H) jumps.push_back({loc, 2.0 * p.V});
  return PureJumpFunction(M * z0, std::move(jumps), dom);
}

double semi_entire_phi(double alpha, double beta, double M, double z0, double tau) {
  const auto p = staircase_params_general(alpha, beta, M);
  const double H = p.H;
  const double z1 = z0 + 2.0 * H;
  const double m2 = M * M;
  // beta * int_0^{z0+H} M^2 (z0 + tau - x)^2 dx
  const double first = m2 * (std::pow(z0 + tau, 3) - std::pow(tau - H, 3)) / 3.0;
  // beta * int_{z0+H}^{z1} M^2 (z1 - x)^2 dx
  const double second = m2 * std::pow(z1 - (z0 + H), 3) / 3.0;
  return alpha * std::sqrt(std::fabs(M) * (2.0 * H - tau)) + beta * (first + second);
}

namespace {

// Exact integral over an interval of length len of |linear - c| where the
// linear function goes from d0 to d1 (already shifted by c).
double abs_linear(double d0, double d1, double len) {
  if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) return 0.5 * len * std::fabs(d0 + d1);
  return 0.5 * len * (d0 * d0 + d1 * d1) / (std::fabs(d0) + std::fabs(d1));
}

StrictGap strict_distance_unchecked(const SampledFunction& u, const PureJumpFunction& v,
                                    Interval w) {
  const double h = u.spacing();
  const auto& jumps = v.jumps();
  auto jt = std::upper_bound(jumps.begin(), jumps.end(), w.a,
                             [](double x, const Jump& j) { return x < j.location; });
  double level = v.plateau_level(v.plateau_index(w.a));
  double l1 = 0.0, tv_u = 0.0, tv_v = 0.0;

  double xcur = w.a;
  double ucur = u.interpolate(w.a);
  std::size_t cell = std::size_t(std::max(0.0, std::floor((w.a - u.left()) / h)));
  while (xcur < w.b) {
    double xnext = std::min(u.left() + h * double(cell + 1), w.b);
    if (xnext <= xcur) {
      ++cell;
      continue;
    }
    // split the cell at jumps of v
    while (jt != jumps.end() && jt->location < xnext) {
      const double xj = jt->location;
      if (xj > xcur) {
        const double uj = u.interpolate(xj);
        l1 += abs_linear(ucur - level, uj - level, xj - xcur);
        tv_u += std::fabs(uj - ucur);
        xcur = xj;
        ucur = uj;
      }
      if (jt->location < w.b) tv_v += std::fabs(jt->height);
      level += jt->height;
      ++jt;
    }
    const double unext = u.interpolate(xnext);
    l1 += abs_linear(ucur - level, unext - level, xnext - xcur);
    tv_u += std::fabs(unext - ucur);
    xcur = xnext;
    ucur = unext;
    ++cell;
  }
  return {l1, std::fabs(tv_u - tv_v)};
}

}  // namespace

StrictGap strict_distance(const SampledFunction& u, const PureJumpFunction& v, Interval w) {
  require(w.a < w.b, ErrorKind::domain, "strict_distance: empty window");
  const double tol = 1e-12 * std::max(1.0, std::fabs(w.a) + std::fabs(w.b));
  require(w.a >= u.left() - tol && w.b <= u.right() + tol, ErrorKind::domain,
          "strict_distance: window exceeds the sampled domain");
  require(w.a >= v.domain().a && w.b <= v.domain().b, ErrorKind::domain,
          "strict_distance: window exceeds the pure jump domain");
  for (const auto& j : v.jumps()) {
    for (double e : {w.a, w.b}) {
      if (std::fabs(j.location - e) <= tol) {
        std::ostringstream msg;
        msg << "strict_distance: window endpoint " << e
            << " is a jump point; shift the window, e.g. by " << 1e-3 * w.length();
        fail(ErrorKind::domain, msg.str());
      }
    }
  }
  return strict_distance_unchecked(u, v, w);
}

double discrete_total_variation(const SampledFunction& u, Interval w) {
  return strict_distance_unchecked(u, PureJumpFunction::constant(0.0, w), w).tv_gap;
}

TranslationFit nearest_translation(const SampledFunction& u, double H, double V,
                                   TranslationKind kind, Interval window) {
  auto distance = [&](double tau) {
    const Staircase s = translate(H, V, kind, tau);
    const Interval dom{window.a - 2.0 * H, window.b + 2.0 * H};
    return strict_distance_unchecked(u, s.on_window(dom), window).sum();
  };
  if (V == 0.0) {
    // degenerate staircase: plain L1 distance to the zero function
    const PureJumpFunction zero = PureJumpFunction::constant(0.0, window);
    return {0.0, strict_distance_unchecked(u, zero, window).l1_gap};
  }

  constexpr int kCoarse = 401;
  std::vector<double> d(kCoarse);
  int best = 0;
  for (int k = 0; k < kCoarse; ++k) {
    d[std::size_t(k)] = distance(-1.0 + 2.0 * k / (kCoarse - 1));
    if (d[std::size_t(k)] < d[std::size_t(best)]) best = k;
  }
  double lo = -1.0 + 2.0 * std::max(best - 1, 0) / (kCoarse - 1);
  double hi = -1.0 + 2.0 * std::min(best + 1, kCoarse - 1) / (kCoarse - 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = distance(x1), f2 = distance(x2);
  while (hi - lo > 1e-6) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - g * (hi - lo); f1 = distance(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + g * (hi - lo); f2 = distance(x2);
    }
  }
  TranslationFit fit{0.5 * (lo + hi), 0.0};
  fit.distance = distance(fit.tau0);
  if (d[std::size_t(best)] < fit.distance) {
    fit = {-1.0 + 2.0 * best / (kCoarse - 1), d[std::size_t(best)]};
  }
  return fit;
}

void to_json(nlohmann::json& j, const PureJumpFunction& u) {
  nlohmann::json jumps = nlohmann::json::array();
  for (const auto& jp : u.jumps()) jumps.push_back({jp.location, jp.height});
  j = {{"base", u.base()}, {"jumps", jumps}, {"domain", {u.domain().a, u.domain().b}}};
}

PureJumpFunction pure_jump_from_json(const nlohmann::json& j) {
  try {
    std::vector<Jump> jumps;
    for (const auto& e : j.at("jumps")) jumps.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    const auto& d = j.at("domain");
    return PureJumpFunction(j.at("base").get<double>(), std::move(jumps),
                            {d.at(0).get<double>(), d.at(1).get<double>()});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, std::string("malformed pure jump record: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const StaircaseSpec& s) {
  j = {{"H", s.H}, {"V", s.V}, {"kind", to_string(s.kind)}, {"tau0", s.tau0}};
}

StaircaseSpec staircase_spec_from_json(const nlohmann::json& j) {
  try {
    return {j.at("H").get<double>(), j.at("V").get<double>(),
            translation_kind_from_string(j.at("kind").get<std::string>()),
            j.at("tau0").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, std::string("malformed staircase record: ") + e.what());
  }
}

}  // namespace pmlab
