// Runs every check suite through the C API and prints one line per criterion.
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmlab/pmlab.h"

namespace {

struct Verdict {
  std::string title;
  bool pass = true;
  std::vector<std::string> details;
};

void log_to_stderr(const char* text, void*) { std::fprintf(stderr, "  %s\n", text); }

}  // namespace

int main() {
  const char* env = std::getenv("PMLAB_OUTPUT_DIR");
  const std::string out = env && *env ? env : "acceptance_artifacts";
  const char* suites[] = {"formulas", "limit_solver", "solver_props", "sweeps_small",
                          "sweeps_full"};

  std::map<int, Verdict> verdicts;
  bool broken = false;
  for (const char* suite : suites) {
    std::fprintf(stderr, "suite %s\n", suite);
    int passed = 0;
    char* report = nullptr;
    const pmlab_status st = pmlab_check(suite, out.c_str(), log_to_stderr, nullptr, &passed, &report);
    if (st != PMLAB_OK) {
      std::fprintf(stderr, "suite %s: %s: %s\n", suite, pmlab_status_name(st), pmlab_last_error());
      broken = true;
      continue;
    }
    const nlohmann::json j = nlohmann::json::parse(report);
    pmlab_string_free(report);
    for (const auto& c : j.at("criteria")) {
      Verdict& v = verdicts[c.at("criterion").get<int>()];
      v.title = c.at("title").get<std::string>();
      v.pass = v.pass && c.at("pass").get<bool>();
      for (const auto& item : c.at("items")) {
        const std::string line = std::string(item.at("pass").get<bool>() ? "ok   " : "FAIL ") +
                                 "[" + suite + "] " + item.at("name").get<std::string>() + ": " +
                                 item.at("value").get<std::string>();
        v.details.push_back(line);
      }
    }
  }

  bool all = !broken;
  for (int id = 1; id <= 8; ++id) {
    const auto it = verdicts.find(id);
    if (it == verdicts.end()) {
      std::printf("criterion %d FAIL (not evaluated)\n", id);
      all = false;
      continue;
    }
    const Verdict& v = it->second;
    std::printf("criterion %d %s %s\n", id, v.pass ? "PASS" : "FAIL", v.title.c_str());
    for (const auto& d : v.details) std::fprintf(stderr, "    %s\n", d.c_str());
    all = all && v.pass;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
