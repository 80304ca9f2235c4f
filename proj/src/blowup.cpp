#include "pmlab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pmlab/energy.hpp"
#include "pmlab/error.hpp"
#include "pmlab/gamma_tools.hpp"

namespace pmlab {

std::string to_string(BlowUpKind kind) {
  switch (kind) {
    case BlowUpKind::fake: return "fake";
    case BlowUpKind::true_: return "true";
    case BlowUpKind::lowres: return "lowres";
  }
  return "fake";
}

namespace {

SampledFunction rescaled_profile(const SampledFunction& u, double center, double scale,
                                 double offset, double W) {
  std::size_t count =
      std::max<std::size_t>(65, std::size_t(std::ceil(2.0 * W * scale / u.spacing())) + 1);
  if (count % 2 == 0) ++count;  // keep y = 0 on a node
  return SampledFunction::sample(-W, W, count, [&](double y) {
    return (u.interpolate(center + scale * y) - offset) / scale;
  });
}

void check_window(const SampledFunction& u, double center, double scale, double W) {
  require(W > 0.0, ErrorKind::domain, "blow-up half-width must be positive");
  const double room = std::min(center - u.left(), u.right() - center);
  if (!(room > 0.0) || center - scale * W < u.left() || center + scale * W > u.right()) {
    std::ostringstream msg;
    msg << "blow-up window leaves the domain; the largest feasible half-width at center "
        << center << " is " << std::max(0.0, room / scale);
    fail(ErrorKind::domain, msg.str());
  }
}

}  // namespace

BlowUp extract_blowup(const SampledFunction& u, const SampledFunction& f, double center,
                      double eps, double W, BlowUpKind kind) {
  require(u.same_grid(f), ErrorKind::shape, "extract_blowup: u and f must share the grid");
  require(kind != BlowUpKind::lowres, ErrorKind::usage,
          "extract_blowup: use lowres_blowup for low-resolution blow-ups");
  const double w = omega(eps);
  check_window(u, center, w, W);
  const double offset = kind == BlowUpKind::fake ? f.interpolate(center) : u.interpolate(center);
  return {kind, center, w, eps, rescaled_profile(u, center, w, offset, W)};
}

BlowUp lowres_blowup(const SampledFunction& u, double center, double scale, double eps,
                     double W) {
  const double w = omega(eps);
  require(scale > 0.0 && w / scale <= 1.0 + 1e-12, ErrorKind::domain,
          "lowres_blowup: the scale must be at least omega(eps)");
  check_window(u, center, scale, W);
  return {BlowUpKind::lowres, center, scale, eps,
          rescaled_profile(u, center, scale, u.interpolate(center), W)};
}

StaircaseFit fit_staircase(const BlowUp& b, double beta, double slope) {
  const StaircaseParams hv = staircase_params(beta, slope);
  StaircaseFit fit;
  fit.H = hv.H;
  fit.V = hv.V;
  const SampledFunction& p = b.profile;
  Interval window{p.left(), p.right()};
  if (!hv.degenerate() && window.length() > 2.0 * hv.H) {
    window = {window.a + 0.5 * hv.H, window.b - 0.5 * hv.H};
  }
  std::vector<TranslationKind> kinds;
  switch (b.kind) {
    case BlowUpKind::fake: kinds = {TranslationKind::oblique}; break;
    case BlowUpKind::true_: kinds = {TranslationKind::horizontal, TranslationKind::vertical}; break;
    case BlowUpKind::lowres:
      kinds = {TranslationKind::oblique, TranslationKind::horizontal, TranslationKind::vertical};
      break;
  }
  bool first = true;
  for (TranslationKind k : kinds) {
    const TranslationFit t = nearest_translation(p, hv.H, hv.V, k, window);
    if (first || t.distance < fit.distance) {
      fit.best_kind = k;
      fit.tau0 = t.tau0;
      fit.distance = t.distance;
      first = false;
    }
  }
  // step estimates from the substitution skeleton of the profile
  const SubstitutionCertificate sub = substitute(p, b.eps);
  const auto& js = sub.skeleton.jumps();
  fit.detected_jumps = js.size();
  if (!js.empty()) {
    double hs = 0.0;
    for (const auto& j : js) hs += j.height;
    fit.step_height_estimate = hs / double(js.size());
  }
  if (js.size() >= 2) {
    fit.step_length_estimate =
        (js.back().location - js.front().location) / double(js.size() - 1);
  }
  return fit;
}

double fit_boundary_staircase(const SampledFunction& u, const SampledFunction& f, double eps,
                              double beta, double slope, int side, double W) {
  require(u.same_grid(f), ErrorKind::shape, "fit_boundary_staircase: grids differ");
  require(side == 0 || side == 1, ErrorKind::usage, "side must be 0 (left) or 1 (right)");
  const double w = omega(eps);
  require(W > 0.0 && W * w <= u.length(), ErrorKind::domain,
          "fit_boundary_staircase: half-width exceeds the domain");
  const double end = side == 0 ? u.left() : u.right();
  const double dir = side == 0 ? 1.0 : -1.0;
  const double f0 = f.interpolate(end);
  const std::size_t count =
      std::max<std::size_t>(64, std::size_t(std::ceil(W * w / u.spacing())) + 1);
  // measured inward from the end; on the right side the forcing slope flips
  const SampledFunction prof = SampledFunction::sample(0.0, W, count, [&](double y) {
    return dir * (u.interpolate(end + dir * w * y) - f0) / w;
  });
  const StaircaseParams hv = staircase_params(beta, slope);
  const Interval window{0.0, hv.degenerate() ? W : std::max(W - 0.5 * hv.H, 0.5 * W)};
  const double a0 = 16.0 / std::sqrt(3.0);
  const PureJumpFunction target = semi_entire_minimizer(a0, beta, slope, W);
  const double eps_shift = 1e-9 * W;
  Interval safe = window;
  for (const auto& j : target.jumps())
    if (std::fabs(j.location - safe.b) < eps_shift) safe.b -= 1e-3 * hv.H;
  return strict_distance(prof, target, safe).sum();
}

TestFunction TestFunction::parse(const std::string& id) {
  TestFunction t;
  t.id_ = id;
  std::size_t pos = 0;
  while (pos <= id.size()) {
    const std::size_t star = id.find('*', pos);
    const std::string tok = id.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
    if (tok == "one") {
    } else if (tok == "cos_theta") {
      t.terms_.push_back({Factor::cos_theta, 1});
    } else if (tok == "sin_theta") {
      t.terms_.push_back({Factor::sin_theta, 1});
    } else if (tok.rfind("x_poly_", 0) == 0 || tok.rfind("s_poly_", 0) == 0) {
      int k = -1;
      try {
        std::size_t used = 0;
        k = std::stoi(tok.substr(7), &used);
        if (used != tok.size() - 7) k = -1;
      } catch (const std::exception&) {
        k = -1;
      }
      require(k >= 0, ErrorKind::usage, "bad power in test function factor '" + tok + "'");
      t.terms_.push_back({tok[0] == 'x' ? Factor::x_power : Factor::s_power, k});
    } else {
      fail(ErrorKind::usage, "unknown test function factor '" + tok + "'");
    }
    if (star == std::string::npos) break;
    pos = star + 1;
  }
  return t;
}

double TestFunction::operator()(double x, double s, double theta) const noexcept {
  double v = 1.0;
  for (const auto& t : terms_) {
    switch (t.factor) {
      case Factor::cos_theta: v *= std::cos(theta); break;
      case Factor::sin_theta: v *= std::sin(theta); break;
      case Factor::x_power: v *= std::pow(x, t.power); break;
      case Factor::s_power: v *= std::pow(s, t.power); break;
    }
  }
  return v;
}

double varifold_pair(const SampledFunction& u, const TestFunction& phi) {
  const std::vector<double> du = first_derivative(u.values(), u.spacing());
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    g[i] = phi(u.x(i), u[i], std::atan(du[i])) * std::hypot(1.0, du[i]);
  return trapezoid(g, u.spacing());
}

double varifold_limit(const SampledFunction& f, const SampledFunction* df,
                      const TestFunction& phi) {
  std::vector<double> d;
  if (df) {
    require(df->same_grid(f), ErrorKind::shape, "varifold_limit: f and f' grids differ");
    d.assign(df->values().begin(), df->values().end());
  } else {
    d = first_derivative(f.values(), f.spacing());
  }
  constexpr double half_pi = std::numbers::pi / 2.0;
  std::vector<double> g(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.x(i), s = f[i];
    g[i] = phi(x, s, 0.0);
    if (d[i] > 0.0) g[i] += phi(x, s, half_pi) * d[i];
    if (d[i] < 0.0) g[i] += phi(x, s, -half_pi) * (-d[i]);
  }
  return trapezoid(g, f.spacing());
}

}  // namespace pmlab
