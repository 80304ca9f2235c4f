#include "pmlab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pmlab/error.hpp"
#include "pmlab/gamma_tools.hpp"
#include "pmlab/limit_solver.hpp"

namespace pmlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double x = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    fail(ErrorKind::usage, "config key '" + key + "': not a number: '" + v + "'");
  return x;
}

long parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long x = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    fail(ErrorKind::usage, "config key '" + key + "': not an integer: '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(ErrorKind::usage, "config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_same_v<T, std::string>) {
      s += xs[i];
    } else {
      s += format_double(xs[i]);
    }
  }
  return s;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

Forcing::Forcing(const ForcingSpec& spec) : spec_(spec) {
  static const std::vector<std::string> ids = {"linear", "cubic", "sine",
                                               "constant", "file", "jump"};
  require(std::find(ids.begin(), ids.end(), spec_.id) != ids.end(), ErrorKind::usage,
          "unknown forcing id '" + spec_.id + "'");
  if (spec_.id == "jump") {
    require(spec_.jump_location > 0.0 && spec_.jump_location < 1.0, ErrorKind::domain,
            "jump forcing: location must lie in (0,1)");
    require(spec_.jump_height != 0.0, ErrorKind::domain, "jump forcing: zero height");
  }
  if (spec_.id == "file") {
    std::ifstream in(spec_.file);
    require(bool(in), ErrorKind::io, "cannot open forcing file '" + spec_.file + "'");
    std::vector<double> xs, fs;
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto parts = split_list(line);
      try {
        if (parts.size() == 1) {
          fs.push_back(std::stod(parts[0]));
        } else if (parts.size() == 2) {
          xs.push_back(std::stod(parts[0]));
          fs.push_back(std::stod(parts[1]));
        } else {
          throw std::invalid_argument("columns");
        }
      } catch (const std::exception&) {
        // header lines such as "x,f" are skipped
        if (fs.empty() && xs.empty()) continue;
        fail(ErrorKind::io, "malformed line in forcing file: '" + line + "'");
      }
    }
    require(fs.size() >= 3, ErrorKind::io, "forcing file needs at least 3 samples");
    if (!xs.empty()) {
      require(xs.size() == fs.size(), ErrorKind::io, "forcing file mixes column counts");
      const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
      for (std::size_t i = 0; i < xs.size(); ++i)
        require(std::fabs(xs[i] - (xs.front() + h * double(i))) <= 1e-9 * (1.0 + std::fabs(xs[i])),
                ErrorKind::io, "forcing file abscissae must be equispaced");
      require(std::fabs(xs.front()) < 1e-12 && std::fabs(xs.back() - 1.0) < 1e-12, ErrorKind::io,
              "forcing file must cover [0, 1]");
    }
    const double h = 1.0 / double(fs.size() - 1);
    table_ = SampledFunction(0.0, h, std::move(fs));
  }
}

double Forcing::value(double x) const {
  const auto& s = spec_;
  if (s.id == "linear") return s.slope * x;
  if (s.id == "cubic") return 1.5 * x - x * x * x / 14.0;
  if (s.id == "sine") return s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * x);
  if (s.id == "constant") return s.value;
  if (s.id == "jump") return x >= s.jump_location ? s.jump_height : 0.0;
  return table_->interpolate(x);
}

double Forcing::derivative(double x) const {
  const auto& s = spec_;
  if (s.id == "linear") return s.slope;
  if (s.id == "cubic") return 1.5 - 3.0 * x * x / 14.0;
  if (s.id == "sine") {
    const double k = 2.0 * std::numbers::pi * s.frequency;
    return s.amplitude * k * std::cos(k * x);
  }
  if (s.id == "constant" || s.id == "jump") return 0.0;
  const SampledFunction& t = *table_;
  const double h = t.spacing();
  const double a = std::clamp(x - h, 0.0, 1.0 - 2.0 * h), b = a + 2.0 * h;
  return (t.interpolate(b) - t.interpolate(a)) / (b - a);
}

SampledFunction Forcing::sample(std::size_t count) const {
  return SampledFunction::sample(0.0, 1.0, count, [&](double x) { return value(x); });
}

SampledFunction Forcing::sample_derivative(std::size_t count) const {
  return SampledFunction::sample(0.0, 1.0, count, [&](double x) { return derivative(x); });
}

double Forcing::predicted_limit(double beta) const {
  if (is_jump()) return 4.0 * std::sqrt(2.0 / 3.0) * std::pow(5.0, 0.75) *
                        std::sqrt(std::fabs(spec_.jump_height));
  const double c1 = 10.0 * std::pow(2.0 * beta / 27.0, 0.2);
  if (spec_.id == "linear") return c1 * std::pow(std::fabs(spec_.slope), 0.8);
  if (spec_.id == "constant") return 0.0;
  // composite Simpson on a fine grid
  constexpr int kPanels = 20000;
  double s = 0.0;
  for (int k = 0; k <= kPanels; ++k) {
    const double w = (k == 0 || k == kPanels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    s += w * std::pow(std::fabs(derivative(double(k) / kPanels)), 0.8);
  }
  return c1 * s / (3.0 * kPanels);
}

std::optional<PureJumpFunction> Forcing::skeleton() const {
  if (!is_jump()) return std::nullopt;
  return PureJumpFunction(0.0, {{spec_.jump_location, spec_.jump_height}}, {0.0, 1.0});
}

void ExperimentConfig::validate() const {
  Forcing check(forcing);
  require(beta > 0.0, ErrorKind::usage, "beta must be positive");
  require(!eps.empty(), ErrorKind::usage, "eps list is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require(eps[i] > 0.0 && eps[i] < 1.0, ErrorKind::usage, "eps values must lie in (0,1)");
    if (i > 0)
      require(eps[i] < eps[i - 1], ErrorKind::usage, "eps list must be strictly decreasing");
  }
  require(points_per_transition > 0.0, ErrorKind::usage,
          "points_per_transition must be positive");
  require(grid_size == 0 || grid_size >= 64, ErrorKind::usage, "grid_size must be 0 or >= 64");
  for (double c : centers)
    require(c > 0.0 && c < 1.0, ErrorKind::usage, "blow-up centers must lie in (0,1)");
  require(halfwidth > 0.0, ErrorKind::usage, "halfwidth must be positive");
  require(lowres_exponent > 0.0 && lowres_exponent < 1.0, ErrorKind::usage,
          "lowres_exponent must lie in (0,1)");
  for (const auto& t : test_functions) TestFunction::parse(t);
  require(max_iterations > 0, ErrorKind::usage, "max_iterations must be positive");
  require(gradient_tolerance > 0.0, ErrorKind::usage, "gradient_tolerance must be positive");
  require(optimizer == "newton" || optimizer == "lbfgs", ErrorKind::usage,
          "optimizer must be 'newton' or 'lbfgs'");
}

std::vector<std::string> config_keys() {
  return {"forcing",       "slope",           "amplitude",      "frequency",
          "value",         "file",            "jump_location",  "jump_height",
          "beta",          "eps",             "points_per_transition", "grid_size",
          "seeds",         "centers",         "halfwidth",      "lowres_exponent",
          "test_functions", "max_iterations", "gradient_tolerance", "optimizer",
          "output_dir",    "write_minimizers", "plots"};
}

void ExperimentConfig::set(const std::string& key_in, const std::string& value) {
  const std::string key = trim(key_in);
  const std::string v = trim(value);
  if (key == "forcing") forcing.id = v;
  else if (key == "slope") forcing.slope = parse_double(key, v);
  else if (key == "amplitude") forcing.amplitude = parse_double(key, v);
  else if (key == "frequency") forcing.frequency = parse_double(key, v);
  else if (key == "value") forcing.value = parse_double(key, v);
  else if (key == "file") forcing.file = v;
  else if (key == "jump_location") forcing.jump_location = parse_double(key, v);
  else if (key == "jump_height") forcing.jump_height = parse_double(key, v);
  else if (key == "beta") beta = parse_double(key, v);
  else if (key == "eps") {
    eps.clear();
    for (const auto& s : split_list(v)) eps.push_back(parse_double(key, s));
  } else if (key == "points_per_transition") points_per_transition = parse_double(key, v);
  else if (key == "grid_size") {
    const long n = parse_int(key, v);
    require(n >= 0, ErrorKind::usage, "grid_size must be nonnegative");
    grid_size = std::size_t(n);
  } else if (key == "seeds") seeds = split_list(v);
  else if (key == "centers") {
    centers.clear();
    for (const auto& s : split_list(v)) centers.push_back(parse_double(key, s));
  } else if (key == "halfwidth") halfwidth = parse_double(key, v);
  else if (key == "lowres_exponent") lowres_exponent = parse_double(key, v);
  else if (key == "test_functions") test_functions = split_list(v);
  else if (key == "max_iterations") max_iterations = int(parse_int(key, v));
  else if (key == "gradient_tolerance") gradient_tolerance = parse_double(key, v);
  else if (key == "optimizer") optimizer = v;
  else if (key == "output_dir") output_dir = v;
  else if (key == "write_minimizers") write_minimizers = parse_bool(key, v);
  else if (key == "plots") plots = parse_bool(key, v);
  else fail(ErrorKind::usage, "unknown config key '" + key + "'");
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  return {{"forcing", forcing.id},
          {"slope", format_double(forcing.slope)},
          {"amplitude", format_double(forcing.amplitude)},
          {"frequency", format_double(forcing.frequency)},
          {"value", format_double(forcing.value)},
          {"file", forcing.file},
          {"jump_location", format_double(forcing.jump_location)},
          {"jump_height", format_double(forcing.jump_height)},
          {"beta", format_double(beta)},
          {"eps", join(eps)},
          {"points_per_transition", format_double(points_per_transition)},
          {"grid_size", std::to_string(grid_size)},
          {"seeds", join(seeds)},
          {"centers", join(centers)},
          {"halfwidth", format_double(halfwidth)},
          {"lowres_exponent", format_double(lowres_exponent)},
          {"test_functions", join(test_functions)},
          {"max_iterations", std::to_string(max_iterations)},
          {"gradient_tolerance", format_double(gradient_tolerance)},
          {"optimizer", optimizer},
          {"output_dir", output_dir},
          {"write_minimizers", write_minimizers ? "true" : "false"},
          {"plots", plots ? "true" : "false"}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::io, "cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::usage,
            path + ":" + std::to_string(lineno) + ": expected key = value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

std::string resolve_output_dir(const std::string& configured) {
  if (const char* env = std::getenv("PMLAB_OUTPUT_DIR"); env && *env) return env;
  return configured;
}

namespace {

SolveOptions options_for(const ExperimentConfig& cfg, const Forcing& forcing) {
  SolveOptions o;
  o.grid_size = cfg.grid_size;
  o.max_iterations = cfg.max_iterations;
  o.gradient_tolerance = cfg.gradient_tolerance;
  o.points_per_transition = cfg.points_per_transition;
  o.optimizer = cfg.optimizer == "lbfgs" ? Optimizer::lbfgs : Optimizer::newton;
  o.skeleton = forcing.skeleton();
  return o;
}

std::size_t grid_for(const ExperimentConfig& cfg, double eps) {
  return cfg.grid_size ? cfg.grid_size : pmf_grid_size(eps, cfg.points_per_transition);
}

// strict distance between a sampled profile and the line m y, per unit length
double line_distance(const SampledFunction& p, double m) {
  std::vector<double> a(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) a[i] = std::fabs(p[i] - m * p.x(i));
  const double l1 = trapezoid(a, p.spacing());
  const double tv = discrete_total_variation(p, {p.left(), p.right()});
  return (l1 + std::fabs(tv - std::fabs(m) * p.length())) / p.length();
}

}  // namespace

SolveResult solve_single(const ExperimentConfig& cfg, double eps,
                         const std::optional<SampledFunction>& warm) {
  cfg.validate();
  const Forcing forcing(cfg.forcing);
  SolveOptions o = options_for(cfg, forcing);
  o.warm_start = warm;
  o.multistart_seeds.clear();
  for (const auto& s : cfg.seeds)
    if (s != "warm" || warm) o.multistart_seeds.push_back(s);
  const SampledFunction f = forcing.sample(grid_for(cfg, eps));
  return minimize_pmf(eps, cfg.beta, f, o);
}

CenterFit analyze_center(const ExperimentConfig& cfg, const Forcing& forcing,
                         const SampledFunction& u, double eps, double c) {
  const double w = omega(eps);
  const SampledFunction f = forcing.sample(u.size());
  CenterFit fit;
  fit.center = c;
  fit.slope = forcing.derivative(c);
  fit.halfwidth = std::min(cfg.halfwidth, 0.95 * std::min(c, 1.0 - c) / w);
  const BlowUp fake = extract_blowup(u, f, c, eps, fit.halfwidth, BlowUpKind::fake);
  const BlowUp tru = extract_blowup(u, f, c, eps, fit.halfwidth, BlowUpKind::true_);
  fit.fake = fit_staircase(fake, cfg.beta, fit.slope);
  fit.true_fit = fit_staircase(tru, cfg.beta, fit.slope);
  // fits run on the window shrunk by H/2 at both ends
  auto window_length = [&](const StaircaseFit& s) {
    const double len = 2.0 * fit.halfwidth;
    return s.V != 0.0 && len > 2.0 * s.H ? len - s.H : len;
  };
  fit.fake_density = fit.fake.distance / window_length(fit.fake);
  fit.true_density = fit.true_fit.distance / window_length(fit.true_fit);
  const double a = std::pow(w, cfg.lowres_exponent);
  const double W_low = std::min(1.0, 0.95 * std::min(c, 1.0 - c) / a);
  const BlowUp low = lowres_blowup(u, c, a, eps, W_low);
  fit.lowres_distance = line_distance(low.profile, fit.slope);
  return fit;
}

SweepRecord make_record(const ExperimentConfig& cfg, const Forcing& forcing, double eps,
                        const SolveResult& res, double wall_time) {
  SweepRecord r;
  const SampledFunction& u = res.minimizer;
  const double w = omega(eps);
  r.eps = eps;
  r.omega = w;
  r.grid_size = u.size();
  r.m = res.energy.total;
  r.m_over_omega2 = r.m / (w * w);
  r.m_over_omega52 = r.m / std::pow(w, 2.5);
  r.predicted_limit = forcing.predicted_limit(cfg.beta);
  r.energy = res.energy;
  r.iterations = res.iterations;
  r.converged = res.converged;
  r.initializer = res.initializer_id;

  // substitution certificate on the rescaled minimizer y -> u(omega y) / omega
  std::vector<double> v(u.values().begin(), u.values().end());
  for (auto& x : v) x /= w;
  const SampledFunction resc(u.left() / w, u.spacing() / w, std::move(v));
  const SubstitutionCertificate sub = substitute(resc, eps);
  r.substitution_M_n = sub.M_n;
  r.substitution_rpm = sub.rpm_value;
  r.substitution_jhalf = sub.jhalf_value;
  r.substitution_holds = sub.inequality_holds();
  r.substitution_lp_gap = sub.lp_gap * w * w;  // back to the original variables
  r.substitution_tv_gap = sub.tv_gap * w;
  r.skeleton_jumps = sub.skeleton.jumps().size();

  for (double c : cfg.centers) r.fits.push_back(analyze_center(cfg, forcing, u, eps, c));

  const SampledFunction f = forcing.sample(u.size());
  const SampledFunction df = forcing.sample_derivative(u.size());
  for (const auto& id : cfg.test_functions) {
    const TestFunction phi = TestFunction::parse(id);
    r.test_functions.push_back(id);
    r.varifold_pair.push_back(varifold_pair(u, phi));
    r.varifold_limit.push_back(forcing.is_jump()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : varifold_limit(f, &df, phi));
  }
  r.wall_time = wall_time;
  return r;
}

std::vector<std::string> csv_columns(const ExperimentConfig& cfg) {
  std::vector<std::string> c = {"eps", "omega", "grid_size", "m_eps", "m_over_omega2",
                                "m_over_omega52", "predicted_limit", "bending", "gradient_log",
                                "fidelity", "iterations", "converged", "initializer",
                                "subst_M_n", "subst_rpm", "subst_jhalf", "subst_holds",
                                "subst_lp_gap", "subst_tv_gap", "skeleton_jumps"};
  for (double x : cfg.centers) {
    const std::string p = "c" + format_double(x) + "_";
    for (const char* s : {"halfwidth", "slope", "fake_distance", "fake_density", "fake_tau0",
                          "step_length", "step_height", "true_distance", "true_density",
                          "true_kind", "true_tau0", "lowres_distance"})
      c.push_back(p + s);
  }
  for (const auto& t : cfg.test_functions) {
    c.push_back("varifold_pair_" + t);
    c.push_back("varifold_limit_" + t);
  }
  c.push_back("wall_time");
  c.push_back("error");
  return c;
}

std::vector<std::string> csv_row(const SweepRecord& r) {
  std::vector<std::string> row = {
      format_double(r.eps), format_double(r.omega), std::to_string(r.grid_size),
      format_double(r.m), format_double(r.m_over_omega2), format_double(r.m_over_omega52),
      format_double(r.predicted_limit), format_double(r.energy.bending),
      format_double(r.energy.gradient_log), format_double(r.energy.fidelity),
      std::to_string(r.iterations), r.converged ? "1" : "0", r.initializer,
      format_double(r.substitution_M_n), format_double(r.substitution_rpm),
      format_double(r.substitution_jhalf), r.substitution_holds ? "1" : "0",
      format_double(r.substitution_lp_gap), format_double(r.substitution_tv_gap),
      std::to_string(r.skeleton_jumps)};
  for (const auto& f : r.fits) {
    for (double x : {f.halfwidth, f.slope, f.fake.distance, f.fake_density, f.fake.tau0,
                     f.fake.step_length_estimate, f.fake.step_height_estimate,
                     f.true_fit.distance, f.true_density})
      row.push_back(format_double(x));
    row.push_back(to_string(f.true_fit.best_kind));
    row.push_back(format_double(f.true_fit.tau0));
    row.push_back(format_double(f.lowres_distance));
  }
  for (std::size_t k = 0; k < r.test_functions.size(); ++k) {
    row.push_back(format_double(r.varifold_pair[k]));
    row.push_back(format_double(r.varifold_limit[k]));
  }
  row.push_back(format_double(r.wall_time));
  row.push_back(r.error);
  return row;
}

namespace {

nlohmann::json fit_json(const StaircaseFit& f) {
  return {{"kind", to_string(f.best_kind)}, {"tau0", f.tau0}, {"distance", f.distance},
          {"step_length", f.step_length_estimate}, {"step_height", f.step_height_estimate},
          {"detected_jumps", f.detected_jumps}, {"H", f.H}, {"V", f.V}};
}

StaircaseFit fit_from_json(const nlohmann::json& j) {
  StaircaseFit f;
  f.best_kind = translation_kind_from_string(j.at("kind").get<std::string>());
  f.tau0 = j.at("tau0");
  f.distance = j.at("distance");
  f.step_length_estimate = j.at("step_length");
  f.step_height_estimate = j.at("step_height");
  f.detected_jumps = j.at("detected_jumps");
  f.H = j.at("H");
  f.V = j.at("V");
  return f;
}

// JSON has no NaN; such values are stored as null
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }
double num_back(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

nlohmann::json to_json(const SweepRecord& r) {
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : r.fits)
    fits.push_back({{"center", f.center}, {"halfwidth", f.halfwidth}, {"slope", f.slope},
                    {"fake", fit_json(f.fake)}, {"true", fit_json(f.true_fit)},
                    {"fake_density", f.fake_density}, {"true_density", f.true_density},
                    {"lowres_distance", f.lowres_distance}});
  nlohmann::json var = nlohmann::json::array();
  for (std::size_t k = 0; k < r.test_functions.size(); ++k)
    var.push_back({{"phi", r.test_functions[k]}, {"pair", num(r.varifold_pair[k])},
                   {"limit", num(r.varifold_limit[k])}});
  return {{"eps", r.eps},
          {"omega", r.omega},
          {"grid_size", r.grid_size},
          {"m_eps", r.m},
          {"m_over_omega2", r.m_over_omega2},
          {"m_over_omega52", r.m_over_omega52},
          {"predicted_limit", r.predicted_limit},
          {"energy",
           {{"bending", r.energy.bending},
            {"gradient_log", r.energy.gradient_log},
            {"fidelity", r.energy.fidelity},
            {"total", r.energy.total}}},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"initializer", r.initializer},
          {"substitution",
           {{"M_n", r.substitution_M_n},
            {"rpm", r.substitution_rpm},
            {"jhalf", r.substitution_jhalf},
            {"holds", r.substitution_holds},
            {"lp_gap", r.substitution_lp_gap},
            {"tv_gap", r.substitution_tv_gap},
            {"jumps", r.skeleton_jumps}}},
          {"fits", fits},
          {"varifold", var},
          {"wall_time", r.wall_time},
          {"error", r.error}};
}

SweepRecord sweep_record_from_json(const nlohmann::json& j) {
  try {
    SweepRecord r;
    r.eps = j.at("eps");
    r.omega = j.at("omega");
    r.grid_size = j.at("grid_size");
    r.m = j.at("m_eps");
    r.m_over_omega2 = j.at("m_over_omega2");
    r.m_over_omega52 = j.at("m_over_omega52");
    r.predicted_limit = j.at("predicted_limit");
    const auto& e = j.at("energy");
    r.energy = {e.at("bending"), e.at("gradient_log"), e.at("fidelity"), e.at("total")};
    r.iterations = j.at("iterations");
    r.converged = j.at("converged");
    r.initializer = j.at("initializer");
    const auto& s = j.at("substitution");
    r.substitution_M_n = s.at("M_n");
    r.substitution_rpm = s.at("rpm");
    r.substitution_jhalf = s.at("jhalf");
    r.substitution_holds = s.at("holds");
    r.substitution_lp_gap = s.at("lp_gap");
    r.substitution_tv_gap = s.at("tv_gap");
    r.skeleton_jumps = s.at("jumps");
    for (const auto& f : j.at("fits")) {
      CenterFit c;
      c.center = f.at("center");
      c.halfwidth = f.at("halfwidth");
      c.slope = f.at("slope");
      c.fake = fit_from_json(f.at("fake"));
      c.true_fit = fit_from_json(f.at("true"));
      c.fake_density = f.at("fake_density");
      c.true_density = f.at("true_density");
      c.lowres_distance = f.at("lowres_distance");
      r.fits.push_back(c);
    }
    for (const auto& v : j.at("varifold")) {
      r.test_functions.push_back(v.at("phi"));
      r.varifold_pair.push_back(num_back(v.at("pair")));
      r.varifold_limit.push_back(num_back(v.at("limit")));
    }
    r.wall_time = j.at("wall_time");
    r.error = j.at("error");
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, std::string("malformed sweep record: ") + e.what());
  }
}

std::string minimizer_file_name(double eps) { return "minimizer_" + format_double(eps) + ".csv"; }

void write_minimizer_csv(const SampledFunction& u, const std::string& path) {
  std::ofstream out(path);
  require(bool(out), ErrorKind::io, "cannot write '" + path + "'");
  out << "x,u\n";
  for (std::size_t i = 0; i < u.size(); ++i)
    out << format_double(u.x(i)) << ',' << format_double(u[i]) << '\n';
  require(bool(out), ErrorKind::io, "write failed for '" + path + "'");
}

SampledFunction read_minimizer_csv(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::io, "cannot open '" + path + "'");
  std::string line;
  std::vector<double> xs, us;
  while (std::getline(in, line)) {
    if (line.empty() || line == "x,u") continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorKind::io, "malformed minimizer line: " + line);
    xs.push_back(parse_double("x", line.substr(0, comma)));
    us.push_back(parse_double("u", line.substr(comma + 1)));
  }
  require(us.size() >= 3, ErrorKind::io, "minimizer file has fewer than 3 samples");
  const double h = (xs.back() - xs.front()) / double(xs.size() - 1);
  return SampledFunction(xs.front(), h, std::move(us));
}

namespace {

class RecordWriter {
 public:
  RecordWriter(const std::string& dir, const ExperimentConfig& cfg) : dir_(dir) {
    std::filesystem::create_directories(dir_);
    csv_.open(dir_ + "/records.csv");
    require(bool(csv_), ErrorKind::io, "cannot write records.csv in '" + dir_ + "'");
    const auto cols = csv_columns(cfg);
    for (std::size_t i = 0; i < cols.size(); ++i) csv_ << (i ? "," : "") << cols[i];
    csv_ << '\n';
    csv_.flush();
    config_ = cfg.to_map();
  }

  void append(const SweepRecord& r) {
    const auto row = csv_row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const bool quote = row[i].find_first_of(",\"\n") != std::string::npos;
      std::string cell = row[i];
      if (quote) {
        std::string q = "\"";
        for (char ch : cell) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        cell = q + "\"";
      }
      csv_ << (i ? "," : "") << cell;
    }
    csv_ << '\n';
    csv_.flush();
    json_.push_back(to_json(r));
    std::ofstream js(dir_ + "/records.json");
    require(bool(js), ErrorKind::io, "cannot write records.json in '" + dir_ + "'");
    js << nlohmann::json{{"config", config_}, {"records", json_}}.dump(2) << '\n';
  }

 private:
  std::string dir_;
  std::ofstream csv_;
  nlohmann::json json_ = nlohmann::json::array();
  std::map<std::string, std::string> config_;
};

}  // namespace

SweepOutput run_sweep(const ExperimentConfig& cfg, bool write,
                      const std::function<void(const SweepRecord&)>& progress) {
  cfg.validate();
  const Forcing forcing(cfg.forcing);
  const std::string dir = resolve_output_dir(cfg.output_dir);
  std::optional<RecordWriter> writer;
  if (write) writer.emplace(dir, cfg);

  SweepOutput out{{}, {}, forcing.sample(1001)};
  std::optional<SampledFunction> warm;
  for (double eps : cfg.eps) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRecord rec;
    try {
      const SolveResult res = solve_single(cfg, eps, warm);
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec = make_record(cfg, forcing, eps, res, dt);
      warm = res.minimizer;
      if (write && cfg.write_minimizers)
        write_minimizer_csv(res.minimizer, dir + "/" + minimizer_file_name(eps));
      out.minimizers.push_back(res.minimizer);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io || e.kind() == ErrorKind::usage) throw;
      rec.eps = eps;
      rec.omega = omega(eps);
      rec.m = rec.m_over_omega2 = rec.m_over_omega52 = std::numeric_limits<double>::quiet_NaN();
      rec.predicted_limit = forcing.predicted_limit(cfg.beta);
      rec.error = e.what();
      rec.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    if (writer) writer->append(rec);
    if (progress) progress(rec);
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pmlab
