#pragma once

// Stationary Gaussian synthesis of the zero-point-field force.
//
// The one-sided force spectral density is S_F(w) = m tau hbar w^3 / pi on
// [omega_min, cutoff] and zero elsewhere. A realization is a comb of n_modes
// equally spaced frequencies (interval midpoints) with weights
// sqrt(S_F(w_k) dw), so
//
//   F(t) = sum_k w_k (a_k cos w_k t + b_k sin w_k t),
//
// which is a smooth deterministic function of t for a fixed draw of (a, b).
// The comb repeats (up to sign) after 2 pi / dw; simulations must stay inside
// that window.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sedlab/model.hpp"

namespace sedlab {

enum class PhaseMode {
  /// a_k, b_k independent standard normals: exactly Gaussian at any n_modes.
  gaussian,
  /// Fixed amplitude sqrt(2) with a uniform random phase.
  random_phase,
};

std::string to_string(PhaseMode mode);
PhaseMode phase_mode_from_string(const std::string& s);

struct ZpfSpectrum {
  PhysicalParams params;
  std::size_t n_modes = 4000;
  double omega_min = 0.0;
  PhaseMode phase_mode = PhaseMode::gaussian;

  double omega_max() const { return params.cutoff(); }
  double spacing() const;
  /// One-sided spectral density S_F(w).
  double density(double omega) const;
  /// Mode weight sqrt(S_F(w_k) dw) of mode k.
  double weight(std::size_t k) const;
  double frequency(std::size_t k) const;
  /// 2 pi / dw: the comb is not stationary beyond this horizon.
  double recurrence_time() const;
  /// Throws std::invalid_argument for n_modes < 2 or omega_max <= omega_min.
  void validate() const;
};

struct FieldRealization {
  std::vector<double> frequencies;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> weights;

  std::size_t size() const { return frequencies.size(); }
};

/// Splitmix64 mixing of (master, index); used for every per-trajectory stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic function of (spectrum, seed).
FieldRealization sample_realization(const ZpfSpectrum& spectrum, std::uint64_t seed);

/// Direct O(n_modes) evaluation of F(t).
double force_at(const FieldRealization& realization, double t);

/// C_F(t) = (m tau hbar / pi) * integral_{omega_min}^{cutoff} w^3 cos(w t) dw,
/// closed form by parts, power series near t = 0.
double covariance_analytic(const ZpfSpectrum& spectrum, double t);

struct CovarianceEstimate {
  double lag = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
};

struct CovarianceOptions {
  std::uint64_t master_seed = 20240601;
  /// Window start times t_i = window_start + i * window_spacing.
  std::size_t window_points = 16;
  double window_start = 0.0;
  double window_spacing = 1.0;
  unsigned threads = 1;
};

/// Monte Carlo estimate of <F(t) F(t + lag)> averaged over realizations and a
/// window of start times; the standard error comes from the spread of the
/// per-realization window averages. Throws for n_realizations < 100.
std::vector<CovarianceEstimate> empirical_covariance(const ZpfSpectrum& spectrum,
                                                     std::size_t n_realizations,
                                                     std::span<const double> lags,
                                                     const CovarianceOptions& options = {});

/// Evaluates realizations on the uniform grid t_j = t0 + j * step (j < count)
/// in O((n_modes + count) log(n_modes + count)) using a chirp-z transform.
/// The transform plan and chirp kernel are built once; sample() is const and
/// safe to call concurrently.
class UniformFieldSampler {
 public:
  UniformFieldSampler(const ZpfSpectrum& spectrum, double t0, double step, std::size_t count);
  ~UniformFieldSampler();
  UniformFieldSampler(UniformFieldSampler&&) noexcept;
  UniformFieldSampler& operator=(UniformFieldSampler&&) noexcept;

  std::vector<double> sample(const FieldRealization& realization) const;

  std::size_t count() const;
  double step() const;
  double t0() const;
  std::size_t transform_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sedlab
