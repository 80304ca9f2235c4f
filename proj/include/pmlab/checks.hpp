#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pmlab {

/// One measured sub-check of an acceptance criterion.
struct CheckItem {
  std::string name;
  bool pass = false;
  std::string value;  // measured numbers, human readable
};

struct CriterionResult {
  int id = 0;  // acceptance criterion number, 1..8
  std::string title;
  std::vector<CheckItem> items;

  bool pass() const;
};

struct CheckReport {
  std::string suite;
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;

  bool pass() const;
  nlohmann::json to_json() const;
};

struct CheckOptions {
  /// When non-empty, sweep suites write their records, minimizers and plots here.
  std::string output_dir;
  /// Progress messages (one line each).
  std::function<void(const std::string&)> log;
};

/// formulas, limit_solver, solver_props, sweeps_small, sweeps_full.
std::vector<std::string> check_suites();

/// Runs one suite. Unknown suites are usage errors.
CheckReport run_check(const std::string& suite, const CheckOptions& opts = {});

}  // namespace pmlab
