#include "pmlab/pmlab.h"

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "pmlab/blowup.hpp"
#include "pmlab/checks.hpp"
#include "pmlab/error.hpp"
#include "pmlab/experiment.hpp"
#include "pmlab/limit_solver.hpp"
#include "pmlab/plot.hpp"

struct pmlab_config {
  pmlab::ExperimentConfig cfg;
};

struct pmlab_sweep {
  pmlab::SweepOutput out;
};

namespace {

thread_local std::string last_error;

pmlab_status status_of(pmlab::ErrorKind k) {
  switch (k) {
    case pmlab::ErrorKind::domain: return PMLAB_ERR_DOMAIN;
    case pmlab::ErrorKind::shape: return PMLAB_ERR_SHAPE;
    case pmlab::ErrorKind::resolution: return PMLAB_ERR_RESOLUTION;
    case pmlab::ErrorKind::numerical: return PMLAB_ERR_NUMERICAL;
    case pmlab::ErrorKind::io: return PMLAB_ERR_IO;
    case pmlab::ErrorKind::usage: return PMLAB_ERR_USAGE;
  }
  return PMLAB_ERR_INTERNAL;
}

template <class F>
pmlab_status guarded(F&& fn) {
  last_error.clear();
  try {
    fn();
    return PMLAB_OK;
  } catch (const pmlab::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PMLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PMLAB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) pmlab::fail(pmlab::ErrorKind::usage, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

const std::vector<std::string>& keys() {
  static const std::vector<std::string> k = pmlab::config_keys();
  return k;
}

nlohmann::json fit_json(const pmlab::StaircaseFit& f) {
  return {{"kind", pmlab::to_string(f.best_kind)}, {"tau0", f.tau0},
          {"distance", f.distance}, {"step_length", f.step_length_estimate},
          {"step_height", f.step_height_estimate}, {"detected_jumps", f.detected_jumps},
          {"H", f.H}, {"V", f.V}};
}

std::vector<pmlab::SampledFunction> load_minimizers(const std::vector<pmlab::SweepRecord>& rs,
                                                    const std::string& dir) {
  std::vector<pmlab::SampledFunction> ms;
  for (const auto& r : rs) {
    if (!r.error.empty()) continue;
    const std::string path = dir + "/" + pmlab::minimizer_file_name(r.eps);
    if (std::filesystem::exists(path)) ms.push_back(pmlab::read_minimizer_csv(path));
  }
  return ms;
}

}  // namespace

extern "C" {

const char* pmlab_version(void) { return "0.1.0"; }

const char* pmlab_last_error(void) { return last_error.c_str(); }

const char* pmlab_status_name(pmlab_status s) {
  switch (s) {
    case PMLAB_OK: return "ok";
    case PMLAB_ERR_DOMAIN: return "domain";
    case PMLAB_ERR_SHAPE: return "shape";
    case PMLAB_ERR_RESOLUTION: return "resolution";
    case PMLAB_ERR_NUMERICAL: return "numerical";
    case PMLAB_ERR_IO: return "io";
    case PMLAB_ERR_USAGE: return "usage";
    case PMLAB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void pmlab_string_free(char* s) { std::free(s); }

size_t pmlab_config_key_count(void) { return keys().size(); }

const char* pmlab_config_key(size_t i) { return i < keys().size() ? keys()[i].c_str() : nullptr; }

pmlab_status pmlab_config_new(pmlab_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new pmlab_config{};
  });
}

pmlab_status pmlab_config_load(const char* path, pmlab_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pmlab_config{pmlab::load_config(path)};
  });
}

pmlab_status pmlab_config_set(pmlab_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
  });
}

pmlab_status pmlab_config_get(const pmlab_config* cfg, const char* key, char** value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    const auto m = cfg->cfg.to_map();
    const auto it = m.find(key);
    if (it == m.end()) pmlab::fail(pmlab::ErrorKind::usage, std::string("unknown config key '") + key + "'");
    *value = dup(it->second);
  });
}

pmlab_status pmlab_config_validate(const pmlab_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    cfg->cfg.validate();
  });
}

pmlab_status pmlab_config_output_dir(const pmlab_config* cfg, char** dir) {
  return guarded([&] {
    need(cfg, "cfg");
    need(dir, "dir");
    *dir = dup(pmlab::resolve_output_dir(cfg->cfg.output_dir));
  });
}

void pmlab_config_free(pmlab_config* cfg) { delete cfg; }

pmlab_status pmlab_minimize(const pmlab_config* cfg, double eps, const char* warm_path, int write,
                            char** record_json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(record_json, "record_json");
    const auto& c = cfg->cfg;
    c.validate();
    if (!(eps > 0.0 && eps < 1.0)) pmlab::fail(pmlab::ErrorKind::usage, "eps must lie in (0,1)");
    std::optional<pmlab::SampledFunction> warm;
    if (warm_path) warm = pmlab::read_minimizer_csv(warm_path);
    const pmlab::Forcing forcing(c.forcing);
    const auto t0 = std::chrono::steady_clock::now();
    const pmlab::SolveResult res = pmlab::solve_single(c, eps, warm);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const pmlab::SweepRecord rec = pmlab::make_record(c, forcing, eps, res, dt);
    if (write) {
      const std::string dir = pmlab::resolve_output_dir(c.output_dir);
      std::filesystem::create_directories(dir);
      pmlab::write_minimizer_csv(res.minimizer, dir + "/" + pmlab::minimizer_file_name(eps));
    }
    *record_json = dup(pmlab::to_json(rec).dump());
  });
}

pmlab_status pmlab_sweep_run(const pmlab_config* cfg, int write, pmlab_callback progress,
                             void* user, pmlab_sweep** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    auto cb = [&](const pmlab::SweepRecord& r) {
      if (progress) progress(pmlab::to_json(r).dump().c_str(), user);
    };
    *out = new pmlab_sweep{pmlab::run_sweep(cfg->cfg, write != 0, cb)};
  });
}

size_t pmlab_sweep_size(const pmlab_sweep* sweep) { return sweep ? sweep->out.records.size() : 0; }

pmlab_status pmlab_sweep_record_json(const pmlab_sweep* sweep, size_t i, char** json) {
  return guarded([&] {
    need(sweep, "sweep");
    need(json, "json");
    if (i >= sweep->out.records.size()) pmlab::fail(pmlab::ErrorKind::usage, "record index out of range");
    *json = dup(pmlab::to_json(sweep->out.records[i]).dump());
  });
}

pmlab_status pmlab_sweep_plot(const pmlab_sweep* sweep, const pmlab_config* cfg, const char* dir,
                              char** paths_json) {
  return guarded([&] {
    need(sweep, "sweep");
    need(cfg, "cfg");
    need(paths_json, "paths_json");
    const std::string d = dir ? dir : pmlab::resolve_output_dir(cfg->cfg.output_dir);
    const auto paths = pmlab::emit_plots(cfg->cfg, sweep->out.records, sweep->out.minimizers, d);
    *paths_json = dup(nlohmann::json(paths).dump());
  });
}

void pmlab_sweep_free(pmlab_sweep* sweep) { delete sweep; }

pmlab_status pmlab_plot_directory(const pmlab_config* cfg, const char* dir, char** paths_json) {
  return guarded([&] {
    need(dir, "dir");
    need(paths_json, "paths_json");
    const std::string d = dir;
    std::ifstream in(d + "/records.json");
    if (!in) pmlab::fail(pmlab::ErrorKind::io, "no records.json in '" + d + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      pmlab::fail(pmlab::ErrorKind::io, std::string("records.json: ") + e.what());
    }
    pmlab::ExperimentConfig c;
    if (cfg) {
      c = cfg->cfg;
    } else if (j.contains("config")) {
      for (const auto& [k, v] : j.at("config").items()) c.set(k, v.get<std::string>());
    }
    std::vector<pmlab::SweepRecord> rs;
    for (const auto& r : j.at("records")) rs.push_back(pmlab::sweep_record_from_json(r));
    const auto paths = pmlab::emit_plots(c, rs, load_minimizers(rs, d), d);
    *paths_json = dup(nlohmann::json(paths).dump());
  });
}

pmlab_status pmlab_limit(double alpha, double beta, double L, double M, int oracle, char** json) {
  return guarded([&] {
    need(json, "json");
    const pmlab::LimitProblem p{alpha, beta, L, M};
    p.validate();
    const pmlab::LimitSolution free = pmlab::mu0(p);
    const pmlab::LimitSolution bc = pmlab::mu0_star(p);
    const pmlab::MuBounds b = pmlab::mu_bounds(p);
    nlohmann::json out = {{"alpha", alpha}, {"beta", beta}, {"L", L}, {"M", M},
                          {"mu0", free.value}, {"mu0_intersections", free.steps},
                          {"mu0_star", bc.value}, {"mu0_star_steps", bc.steps},
                          {"lower_bound", b.lower}, {"upper_bound", b.upper},
                          {"c1", b.c1}, {"c2", b.c2}, {"c3", b.c3}};
    nlohmann::json mf, mb;
    pmlab::to_json(mf, free.minimizer);
    pmlab::to_json(mb, bc.minimizer);
    out["mu0_minimizer"] = mf;
    out["mu0_star_minimizer"] = mb;
    if (M != 0.0) {
      const auto hv = pmlab::staircase_params_general(alpha, beta, M);
      out["H"] = hv.H;
      out["V"] = hv.V;
      out["relaxed_step_length"] = pmlab::relaxed_step_length(alpha, beta, M);
      out["critical_length"] = pmlab::critical_length(alpha, beta, M);
    }
    if (oracle) {
      const double dx = L / 512.0, dv = std::fabs(M) * L / 512.0;
      if (M == 0.0) pmlab::fail(pmlab::ErrorKind::domain, "oracle needs M != 0");
      const auto o = pmlab::mu0_oracle(p, dx, dv, false);
      const auto ob = pmlab::mu0_oracle(p, dx, dv, true);
      out["oracle"] = {{"value", o.value}, {"resolution_bound", o.resolution_bound}};
      out["oracle_bc"] = {{"value", ob.value}, {"resolution_bound", ob.resolution_bound}};
    }
    *json = dup(out.dump());
  });
}

pmlab_status pmlab_blowup(const pmlab_config* cfg, const char* minimizer_path, double eps,
                          char** json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(minimizer_path, "minimizer_path");
    need(json, "json");
    const auto& c = cfg->cfg;
    c.validate();
    if (!(eps > 0.0 && eps < 1.0)) pmlab::fail(pmlab::ErrorKind::usage, "eps must lie in (0,1)");
    const pmlab::Forcing forcing(c.forcing);
    const pmlab::SampledFunction u = pmlab::read_minimizer_csv(minimizer_path);
    const pmlab::SampledFunction f = forcing.sample(u.size());
    nlohmann::json centers = nlohmann::json::array();
    for (double x : c.centers) {
      const pmlab::CenterFit fit = pmlab::analyze_center(c, forcing, u, eps, x);
      centers.push_back({{"center", fit.center}, {"halfwidth", fit.halfwidth},
                         {"slope", fit.slope}, {"fake", fit_json(fit.fake)},
                         {"true", fit_json(fit.true_fit)}, {"fake_density", fit.fake_density},
                         {"true_density", fit.true_density},
                         {"lowres_distance", fit.lowres_distance}});
    }
    nlohmann::json ends = nlohmann::json::array();
    if (!forcing.is_jump()) {
      const double W = std::min(c.halfwidth, 0.45 / pmlab::omega(eps));
      for (int side : {0, 1}) {
        const double slope = forcing.derivative(side == 0 ? 0.0 : 1.0);
        if (slope == 0.0) continue;
        ends.push_back({{"side", side == 0 ? "left" : "right"}, {"halfwidth", W},
                        {"distance", pmlab::fit_boundary_staircase(u, f, eps, c.beta, slope,
                                                                   side, W)}});
      }
    }
    *json = dup(nlohmann::json{{"eps", eps}, {"centers", centers}, {"ends", ends}}.dump());
  });
}

pmlab_status pmlab_varifold(const pmlab_config* cfg, const char* minimizer_path, char** json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(minimizer_path, "minimizer_path");
    need(json, "json");
    const auto& c = cfg->cfg;
    c.validate();
    const pmlab::Forcing forcing(c.forcing);
    const pmlab::SampledFunction u = pmlab::read_minimizer_csv(minimizer_path);
    const pmlab::SampledFunction f = forcing.sample(u.size());
    const pmlab::SampledFunction df = forcing.sample_derivative(u.size());
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& id : c.test_functions) {
      const auto phi = pmlab::TestFunction::parse(id);
      const double pair = pmlab::varifold_pair(u, phi);
      nlohmann::json row = {{"phi", id}, {"pair", pair}};
      if (!forcing.is_jump()) {
        const double lim = pmlab::varifold_limit(f, &df, phi);
        row["limit"] = lim;
        row["residual"] = std::fabs(pair - lim);
      }
      rows.push_back(row);
    }
    *json = dup(rows.dump());
  });
}

pmlab_status pmlab_check(const char* suite, const char* output_dir, pmlab_callback log,
                         void* user, int* passed, char** report_json) {
  return guarded([&] {
    need(suite, "suite");
    need(passed, "passed");
    need(report_json, "report_json");
    pmlab::CheckOptions o;
    if (output_dir) o.output_dir = output_dir;
    if (log) o.log = [&](const std::string& s) { log(s.c_str(), user); };
    const pmlab::CheckReport r = pmlab::run_check(suite, o);
    *passed = r.pass() ? 1 : 0;
    *report_json = dup(r.to_json().dump());
  });
}

}  // extern "C"
