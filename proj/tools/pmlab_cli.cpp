// Command line front end. Talks to the library through the C interface only.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmlab/pmlab.h"

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

int exit_code(pmlab_status s) {
  switch (s) {
    case PMLAB_OK: return kOk;
    case PMLAB_ERR_NUMERICAL:
    case PMLAB_ERR_INTERNAL: return kNumerical;
    default: return kUsage;
  }
}

struct Failure {
  int code;
};

void ok(pmlab_status s) {
  if (s == PMLAB_OK) return;
  std::cerr << "pmlab: " << pmlab_status_name(s) << " error: " << pmlab_last_error() << '\n';
  throw Failure{exit_code(s)};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  pmlab_string_free(s);
  return out;
}

// --config plus one --<key> flag per configuration key
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key = value configuration file")->check(CLI::ExistingFile);
    for (size_t i = 0; i < pmlab_config_key_count(); ++i) {
      const std::string key = pmlab_config_key(i);
      app->add_option("--" + key, values[key], "config key " + key);
    }
  }

  bool any_given(CLI::App* app) const {
    if (!file.empty()) return true;
    for (const auto& kv : values)
      if (app->count("--" + kv.first) > 0) return true;
    return false;
  }

  pmlab_config* build(CLI::App* app) const {
    pmlab_config* cfg = nullptr;
    ok(file.empty() ? pmlab_config_new(&cfg) : pmlab_config_load(file.c_str(), &cfg));
    for (const auto& [key, value] : values)
      if (app->count("--" + key) > 0) ok(pmlab_config_set(cfg, key.c_str(), value.c_str()));
    return cfg;
  }
};

struct ConfigHandle {
  pmlab_config* p;
  ~ConfigHandle() { pmlab_config_free(p); }
};

void print_record_line(const nlohmann::json& r) {
  std::printf("eps %-8s ", r.at("eps").dump().c_str());
  if (!r.at("error").get<std::string>().empty()) {
    std::printf("error: %s\n", r.at("error").get<std::string>().c_str());
    return;
  }
  std::printf("m = %.8g  m/omega^2 = %.6g  m/omega^(5/2) = %.6g  iters %d%s  %.2f s\n",
              r.at("m_eps").get<double>(), r.at("m_over_omega2").get<double>(),
              r.at("m_over_omega52").get<double>(), r.at("iterations").get<int>(),
              r.at("converged").get<bool>() ? "" : " (not converged)",
              r.at("wall_time").get<double>());
}

void print_report(const nlohmann::json& rep) {
  std::printf("suite %s: %s (%.1f s)\n", rep.at("suite").get<std::string>().c_str(),
              rep.at("pass").get<bool>() ? "PASS" : "FAIL", rep.at("seconds").get<double>());
  for (const auto& c : rep.at("criteria")) {
    std::printf("  criterion %d %s: %s\n", c.at("criterion").get<int>(),
                c.at("title").get<std::string>().c_str(), c.at("pass").get<bool>() ? "PASS" : "FAIL");
    for (const auto& i : c.at("items"))
      std::printf("    [%s] %s: %s\n", i.at("pass").get<bool>() ? "ok" : "FAIL",
                  i.at("name").get<std::string>().c_str(), i.at("value").get<std::string>().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmlab: experiments with the singularly perturbed Perona-Malik functional"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pmlab_version()));

  ConfigFlags mf, sf, bf, vf, pf;

  auto* minimize = app.add_subcommand("minimize", "solve at one eps and write minimizer_<eps>.csv");
  double eps = 0.0;
  std::string warm;
  bool no_write = false;
  minimize->add_option("--at", eps, "eps value to solve at (default: first of --eps)");
  minimize->add_option("--warm", warm, "warm start from a minimizer file")->check(CLI::ExistingFile);
  minimize->add_flag("--no-write", no_write, "do not write the minimizer file");
  mf.attach(minimize);

  auto* sweep = app.add_subcommand("sweep", "run the eps sweep and write records, minimizers and plots");
  bool quiet = false;
  sweep->add_flag("--quiet", quiet, "no per-eps progress lines");
  sf.attach(sweep);

  auto* limit = app.add_subcommand("limit", "solve the limit problem on (0, L) with forcing M x");
  double alpha = -1.0, beta = 1.0, L = 10.0, M = 1.0;
  bool oracle = false;
  limit->add_option("--alpha", alpha, "jump cost constant (default 16/sqrt(3))");
  limit->add_option("--beta", beta, "fidelity weight");
  limit->add_option("--L", L, "interval length");
  limit->add_option("--M", M, "forcing slope");
  limit->add_flag("--oracle", oracle, "also run the brute-force dynamic program");

  auto* blowup = app.add_subcommand("blowup", "staircase fits of a stored minimizer");
  std::string minimizer;
  double blow_eps = 0.0;
  blowup->add_option("--minimizer", minimizer, "minimizer CSV (x,u)")->required()->check(CLI::ExistingFile);
  blowup->add_option("--at", blow_eps, "eps the minimizer was computed at")->required();
  bf.attach(blowup);

  auto* varifold = app.add_subcommand("varifold", "varifold pairings of a stored minimizer");
  varifold->add_option("--minimizer", minimizer, "minimizer CSV (x,u)")->required()->check(CLI::ExistingFile);
  vf.attach(varifold);

  auto* check = app.add_subcommand("check", "run acceptance check suites");
  std::vector<std::string> suites;
  std::string check_dir, json_out;
  check->add_option("suites", suites,
                    "formulas, limit_solver, solver_props, sweeps_small, sweeps_full or all")
      ->required();
  check->add_option("--artifacts", check_dir, "write sweep artifacts below this directory");
  check->add_option("--json", json_out, "write the reports as JSON to this file");

  auto* plot = app.add_subcommand("plot", "render SVG plots from a sweep output directory");
  std::string plot_dir;
  plot->add_option("--dir", plot_dir, "directory with records.json (default: output directory)");
  pf.attach(plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*minimize) {
      ConfigHandle cfg{mf.build(minimize)};
      if (minimize->count("--at") == 0) {
        char* list = nullptr;
        ok(pmlab_config_get(cfg.p, "eps", &list));
        eps = std::stod(take(list));
      }
      char* rec = nullptr;
      ok(pmlab_minimize(cfg.p, eps, warm.empty() ? nullptr : warm.c_str(), no_write ? 0 : 1, &rec));
      const auto j = nlohmann::json::parse(take(rec));
      print_record_line(j);
      std::cout << j.dump(2) << '\n';
    } else if (*sweep) {
      ConfigHandle cfg{sf.build(sweep)};
      ok(pmlab_config_validate(cfg.p));
      char* dir = nullptr;
      ok(pmlab_config_output_dir(cfg.p, &dir));
      const std::string out = take(dir);
      pmlab_sweep* sw = nullptr;
      auto progress = [](const char* text, void* user) {
        if (!*static_cast<bool*>(user)) print_record_line(nlohmann::json::parse(text));
      };
      ok(pmlab_sweep_run(cfg.p, 1, progress, &quiet, &sw));
      bool failed = false;
      for (size_t i = 0; i < pmlab_sweep_size(sw); ++i) {
        char* r = nullptr;
        ok(pmlab_sweep_record_json(sw, i, &r));
        failed = failed || !nlohmann::json::parse(take(r)).at("error").get<std::string>().empty();
      }
      char* plots_value = nullptr;
      ok(pmlab_config_get(cfg.p, "plots", &plots_value));
      if (take(plots_value) == "true") {
        char* paths = nullptr;
        ok(pmlab_sweep_plot(sw, cfg.p, out.c_str(), &paths));
        take(paths);
      }
      pmlab_sweep_free(sw);
      std::printf("results in %s\n", out.c_str());
      return failed ? kNumerical : kOk;
    } else if (*limit) {
      if (alpha < 0.0) alpha = 16.0 / std::sqrt(3.0);
      char* j = nullptr;
      ok(pmlab_limit(alpha, beta, L, M, oracle ? 1 : 0, &j));
      std::cout << nlohmann::json::parse(take(j)).dump(2) << '\n';
    } else if (*blowup) {
      ConfigHandle cfg{bf.build(blowup)};
      char* j = nullptr;
      ok(pmlab_blowup(cfg.p, minimizer.c_str(), blow_eps, &j));
      std::cout << nlohmann::json::parse(take(j)).dump(2) << '\n';
    } else if (*varifold) {
      ConfigHandle cfg{vf.build(varifold)};
      char* j = nullptr;
      ok(pmlab_varifold(cfg.p, minimizer.c_str(), &j));
      std::cout << nlohmann::json::parse(take(j)).dump(2) << '\n';
    } else if (*check) {
      if (suites.size() == 1 && suites[0] == "all")
        suites = {"formulas", "limit_solver", "solver_props", "sweeps_small", "sweeps_full"};
      bool all_pass = true;
      nlohmann::json reports = nlohmann::json::array();
      for (const auto& s : suites) {
        int passed = 0;
        char* rep = nullptr;
        auto log = [](const char* text, void*) { std::fprintf(stderr, "%s\n", text); };
        ok(pmlab_check(s.c_str(), check_dir.empty() ? nullptr : check_dir.c_str(), log, nullptr,
                       &passed, &rep));
        const auto j = nlohmann::json::parse(take(rep));
        print_report(j);
        reports.push_back(j);
        all_pass = all_pass && passed;
      }
      if (!json_out.empty()) {
        std::ofstream f(json_out);
        if (!f) {
          std::cerr << "pmlab: cannot write " << json_out << '\n';
          return kUsage;
        }
        f << reports.dump(2) << '\n';
      }
      return all_pass ? kOk : kCheckFailed;
    } else if (*plot) {
      ConfigHandle cfg{pf.build(plot)};
      std::string dir = plot_dir;
      if (dir.empty()) {
        char* d = nullptr;
        ok(pmlab_config_output_dir(cfg.p, &d));
        dir = take(d);
      }
      // configuration given on the command line replaces the one stored with the records
      const bool explicit_cfg = pf.any_given(plot);
      char* paths = nullptr;
      ok(pmlab_plot_directory(explicit_cfg ? cfg.p : nullptr, dir.c_str(), &paths));
      for (const auto& p : nlohmann::json::parse(take(paths))) std::printf("%s\n", p.get<std::string>().c_str());
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kOk;
}
