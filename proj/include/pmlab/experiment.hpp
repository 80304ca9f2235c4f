#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmlab/blowup.hpp"
#include "pmlab/energy.hpp"
#include "pmlab/pure_jump.hpp"
#include "pmlab/sampled_function.hpp"
#include "pmlab/variational.hpp"

namespace pmlab {

/// Forcing on (0, 1) from the catalog.
///   linear    slope * x
///   cubic     1.5 x - x^3 / 14
///   sine      amplitude * sin(2 pi frequency x)
///   constant  value
///   file      samples read from `file` (one value per line, or "x,f" pairs)
///   jump      jump_height at jump_location, zero before
struct ForcingSpec {
  std::string id = "linear";
  double slope = 1.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  double value = 0.0;
  std::string file;
  double jump_location = 0.5;
  double jump_height = 1.0;
};

class Forcing {
 public:
  explicit Forcing(const ForcingSpec& spec);

  const ForcingSpec& spec() const noexcept { return spec_; }
  bool is_jump() const noexcept { return spec_.id == "jump"; }

  double value(double x) const;
  /// Analytic derivative where available, else differences of the samples.
  double derivative(double x) const;
  SampledFunction sample(std::size_t count) const;
  SampledFunction sample_derivative(std::size_t count) const;

  /// Predicted limit of m / omega^2 (C^1 forcing) or of m / omega^(5/2) (jump forcing).
  double predicted_limit(double beta) const;
  /// Skeleton used to initialize the jump-forcing experiment.
  std::optional<PureJumpFunction> skeleton() const;

 private:
  ForcingSpec spec_;
  std::optional<SampledFunction> table_;
};

struct ExperimentConfig {
  ForcingSpec forcing;
  double beta = 1.0;
  std::vector<double> eps = {0.2, 0.1, 0.07, 0.05};
  double points_per_transition = 8.0;
  std::size_t grid_size = 0;
  std::vector<std::string> seeds = {"forcing", "recovery", "mollified", "warm"};
  std::vector<double> centers = {0.3, 0.5, 0.7};
  /// Blow-up half-width in rescaled units; clipped per eps to fit in (0, 1).
  double halfwidth = 6.0;
  double lowres_exponent = 0.5;
  std::vector<std::string> test_functions = {"one", "cos_theta", "sin_theta",
                                             "x_poly_1*sin_theta"};
  int max_iterations = 500;
  double gradient_tolerance = 1e-4;
  std::string optimizer = "newton";
  std::string output_dir = "pmlab_out";
  bool write_minimizers = true;
  bool plots = true;

  void validate() const;
  /// Applies one key=value setting; unknown keys are usage errors.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
};

/// Reads a flat key=value file ('#' starts a comment).
ExperimentConfig load_config(const std::string& path);
/// The documented configuration keys.
std::vector<std::string> config_keys();

struct CenterFit {
  double center = 0.0;
  double halfwidth = 0.0;
  double slope = 0.0;
  StaircaseFit fake;
  StaircaseFit true_fit;
  double fake_density = 0.0;  // fit distance per unit window length
  double true_density = 0.0;
  double lowres_distance = 0.0;  // strict distance to the tangent line, per unit length
};

struct SweepRecord {
  double eps = 0.0;
  double omega = 0.0;
  std::size_t grid_size = 0;
  double m = 0.0;
  double m_over_omega2 = 0.0;
  double m_over_omega52 = 0.0;
  double predicted_limit = 0.0;
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  std::string initializer;
  double substitution_M_n = 0.0;
  double substitution_rpm = 0.0;
  double substitution_jhalf = 0.0;
  bool substitution_holds = false;
  double substitution_lp_gap = 0.0;
  double substitution_tv_gap = 0.0;
  std::size_t skeleton_jumps = 0;
  std::vector<CenterFit> fits;
  std::vector<std::string> test_functions;
  std::vector<double> varifold_pair;
  std::vector<double> varifold_limit;
  double wall_time = 0.0;
  std::string error;  // non-empty when the solve failed for this eps
};

/// Column names of records.csv for the given configuration.
std::vector<std::string> csv_columns(const ExperimentConfig& cfg);
std::vector<std::string> csv_row(const SweepRecord& r);
nlohmann::json to_json(const SweepRecord& r);
SweepRecord sweep_record_from_json(const nlohmann::json& j);

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double x);

struct SweepOutput {
  std::vector<SweepRecord> records;
  std::vector<SampledFunction> minimizers;
  SampledFunction forcing_sample;
};

/// Runs minimize_pmf for every eps (largest first, warm-starting from the
/// previous minimizer) and fills the records. With `write`, records.csv,
/// records.json and the minimizer files are written to cfg.output_dir as the
/// sweep advances. `progress` is called after each record.
SweepOutput run_sweep(const ExperimentConfig& cfg, bool write = true,
                      const std::function<void(const SweepRecord&)>& progress = {});

/// Solves one eps of the configured experiment.
SolveResult solve_single(const ExperimentConfig& cfg, double eps,
                         const std::optional<SampledFunction>& warm = std::nullopt);

/// Builds the record for a solved eps (blow-ups, fits, certificates, varifold residuals).
SweepRecord make_record(const ExperimentConfig& cfg, const Forcing& forcing, double eps,
                        const SolveResult& res, double wall_time);

/// Fake, true and low-resolution blow-up fits of `u` at one center.
CenterFit analyze_center(const ExperimentConfig& cfg, const Forcing& forcing,
                         const SampledFunction& u, double eps, double center);

void write_minimizer_csv(const SampledFunction& u, const std::string& path);
SampledFunction read_minimizer_csv(const std::string& path);
std::string minimizer_file_name(double eps);

/// Output directory after the PMLAB_OUTPUT_DIR override.
std::string resolve_output_dir(const std::string& configured);

}  // namespace pmlab
