#pragma once

// Particle dynamics: m x'' = f(x) + F_rr + F_zpf(t).
//
// The Abraham-Lorentz term m tau x''' is replaced by its order-reduced form
// tau f'(x) x', which is free of runaway solutions and agrees to O(tau).
// Each trajectory sees its own field realization; since that realization is a
// smooth function of t, classical RK4 applies directly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedlab/ensemble_state.hpp"
#include "sedlab/model.hpp"
#include "sedlab/zpf_field.hpp"

namespace sedlab {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |x| or |p| beyond this marks a failed trajectory.
inline constexpr double kDivergenceThreshold = 1e6;

struct TrajectoryState {
  double x = 0.0;
  double p = 0.0;
  double t = 0.0;
};

struct InitialDistribution {
  enum class Kind { point, gaussian };
  Kind kind = Kind::point;
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma_x = 0.0;
  double sigma_p = 0.0;

  static InitialDistribution point(double x0, double p0) { return {Kind::point, x0, p0, 0.0, 0.0}; }
  static InitialDistribution gaussian(double sigma_x, double sigma_p, double x0 = 0.0,
                                      double p0 = 0.0) {
    return {Kind::gaussian, x0, p0, sigma_x, sigma_p};
  }
};

struct IntegrationConfig {
  double dt = 0.02;
  double t_end = 5000.0;
  std::size_t record_stride = 1250;
  std::size_t n_trajectories = 10000;
  std::uint64_t master_seed = 1;
  /// Number of equal time windows the power averages are split into.
  std::size_t power_windows = 10;
  unsigned threads = 1;

  std::size_t steps() const;
  /// Every violated constraint against the given spectrum, as text.
  std::vector<std::string> violations(const ZpfSpectrum& spectrum) const;
};

/// Time- and ensemble-averaged power flows over [t_begin, t_end).
struct PowerRecord {
  double t_begin = 0.0;
  double t_end = 0.0;
  /// <F_zpf * x'>
  double absorbed = 0.0;
  /// <F_rr * x'>
  double dissipated = 0.0;
};

struct EnsembleRun {
  std::vector<EnsembleState> snapshots;
  std::vector<PowerRecord> power;
  /// Original indices of the trajectories kept in the snapshots.
  std::vector<std::size_t> trajectory_ids;
  std::size_t failed = 0;
};

/// Field samples at the start, midpoint and end of one step.
struct StepDrive {
  double start = 0.0;
  double mid = 0.0;
  double end = 0.0;
};

double rr_force(const PhysicalParams& params, const Potential& potential, double x, double v);

/// One RK4 step with the field evaluated directly at the substep times.
/// Throws DivergenceError on a non-finite or runaway state and DomainError if
/// the path leaves the potential's domain.
TrajectoryState step(const TrajectoryState& state, const FieldRealization& field,
                     const Potential& potential, const PhysicalParams& params, double dt);

/// Same step with pre-evaluated field samples.
TrajectoryState step(const TrajectoryState& state, const StepDrive& drive,
                     const Potential& potential, const PhysicalParams& params, double dt);

/// Integrates n_trajectories independent paths. Trajectory j uses the field
/// realization seeded by derive_seed(master_seed, j); snapshots are taken at
/// t = 0 and every record_stride steps. Output does not depend on threads.
/// Throws std::runtime_error if more than 0.1% of the paths fail.
EnsembleRun simulate_ensemble(const InitialDistribution& init, const Potential& potential,
                              const PhysicalParams& params, const ZpfSpectrum& spectrum,
                              const IntegrationConfig& config);

struct PowerSummary {
  double absorbed = 0.0;
  double dissipated = 0.0;
  double ratio = 0.0;
};

/// (P_abs + P_diss) / |P_abs| over the given records, weighting each by its
/// duration. Both zero gives 0; pure dissipation gives -1.
double power_balance(std::span<const PowerRecord> records);
PowerSummary summarize_power(std::span<const PowerRecord> records);

/// Records whose window starts at or after t_from.
std::vector<PowerRecord> records_from(std::span<const PowerRecord> records, double t_from);

/// Snapshots with t >= t_from.
std::vector<EnsembleState> snapshots_from(std::span<const EnsembleState> snapshots, double t_from);

/// Ensemble-mean p^2/2m + V(x).
double mean_energy(const EnsembleState& state, const Potential& potential,
                   const PhysicalParams& params);

}  // namespace sedlab
