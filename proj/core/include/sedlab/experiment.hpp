#pragma once

// Experiment configuration, validation and the pipelines behind the CLI.
// The config is JSON; every key has a default, see README.md for the schema.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedlab/dynamics.hpp"
#include "sedlab/grid.hpp"
#include "sedlab/model.hpp"
#include "sedlab/zpf_field.hpp"

namespace sedlab {

enum class ExperimentKind { covariance, relax, stats, hydro, solve, balance, compare };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct SpectrumSettings {
  std::size_t n_modes = 40000;
  double omega_min = 0.0;
  PhaseMode phase_mode = PhaseMode::gaussian;
};

struct CovarianceSettings {
  std::size_t n_realizations = 10000;
  /// The sampler check uses its own, smaller comb.
  std::size_t n_modes = 4000;
  std::vector<double> lags{0.0, 0.5, 1.0, 2.0};
  std::size_t window_points = 16;
  double window_start = 0.0;
  double window_spacing = 1.0;
};

struct SolverSettings {
  double tol = 1e-8;
  std::size_t max_iterations = 5000;
  std::size_t n_eigen = 8;
};

struct HydroSettings {
  std::size_t n_points = 2048;
  double x_min = -8.0;
  double x_max = 8.0;
  double x0 = 1.0;
  double p0 = 0.0;
  double dt = 1e-3;
  std::size_t steps = 1000;
};

struct BalanceSettings {
  std::size_t n_eigen = 8;
  std::size_t commutator_points = 2048;
  double damping_fraction = 1e-3;
  /// Lag and momentum kick of the classical response cross-check.
  double response_lag = 1.0;
  double response_kick = 1e-6;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::compare;
  PhysicalParams params{1.0, 1.0, 1e-3, 20.0};
  Potential potential = Potential::harmonic(1.0);
  SpectrumSettings spectrum;
  IntegrationConfig integration;
  InitialDistribution init = InitialDistribution::point(0.0, 0.0);
  /// Leading fraction of the run treated as transient.
  double transient_fraction = 0.6;
  Grid1D grid{-8.0, 8.0, 1024};
  CovarianceSettings covariance;
  SolverSettings solver;
  HydroSettings hydro;
  BalanceSettings balance;
  std::filesystem::path output_dir = "sedlab-out";
  std::uint64_t master_seed = 20240601;
  unsigned threads = 1;

  ZpfSpectrum zpf_spectrum() const;
  /// integration with master_seed and threads filled in.
  IntegrationConfig integration_config() const;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Parses JSON text over the defaults. Unknown keys, wrong types and values
/// rejected by the model types are all collected into one ConfigError.
ExperimentConfig config_from_json(const std::string& text);
/// Every field, defaults included.
std::string config_to_json(const ExperimentConfig& config);

/// Empty iff the config is runnable for its experiment kind.
std::vector<std::string> validate_config(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct OutputFile {
  std::string path;  // relative to output_dir
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  ExperimentKind kind = ExperimentKind::compare;
  std::vector<OutputFile> outputs;
  std::vector<CheckResult> checks;
  double wall_time_s = 0.0;

  bool all_passed() const;
};

/// Validates, runs, writes every output plus manifest.json under output_dir.
/// Throws ConfigError for an invalid config.
Manifest run_experiment(const ExperimentConfig& config);

}  // namespace sedlab
