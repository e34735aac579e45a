#pragma once

// Configuration-space fields reconstructed from an ensemble of (x, p) samples.
//
// rho is a Gaussian kernel density estimate; local means <g>_x are
// Nadaraya-Watson regressions with the same kernel, i.e. the empirical
// version of  <g>_x = (1/rho) integral g(x, p) Q(x, p) dp.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sedlab/ensemble_state.hpp"
#include "sedlab/grid.hpp"
#include "sedlab/grid_field.hpp"
#include "sedlab/model.hpp"

namespace sedlab {

class DegenerateEnsemble : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Minimum ensemble size accepted by the estimators.
inline constexpr std::size_t kMinEnsemble = 100;

/// 0.9 min(sd, IQR / 1.34) n^{-1/5}. Throws DegenerateEnsemble for a sample
/// with zero spread.
double silverman_bandwidth(std::span<const double> samples);

/// Normal-reference bandwidth for second derivatives of the density,
/// (4/7)^{1/9} min(sd, IQR / 1.34) n^{-1/9}. Wider than Silverman's: for a
/// Gaussian it shifts (ln rho)'' by a factor sigma^2 / (sigma^2 + h^2) but keeps
/// the curvature out of the sampling noise.
double curvature_bandwidth(std::span<const double> samples);

/// rho, <p>_x / m and <p^2>_x - <p>_x^2 from one pass over the ensemble.
struct LocalMoments {
  GridField rho;
  GridField v;
  GridField sigma_p2;
  double bandwidth = 0.0;
};

/// Throws DegenerateEnsemble for n < 100, identical positions, non-finite
/// entries, or when no kernel mass lands on the grid.
LocalMoments local_moments(const EnsembleState& ensemble, const Grid1D& grid,
                           const PhysicalParams& params,
                           std::optional<double> bandwidth = std::nullopt);

/// Kernel density estimate renormalized to unit trapezoid mass on the grid.
GridField density_kde(const EnsembleState& ensemble, const Grid1D& grid,
                      std::optional<double> bandwidth = std::nullopt);

/// <p>_x / m on the density mask.
GridField flux_velocity(const EnsembleState& ensemble, const Grid1D& grid,
                        const PhysicalParams& params,
                        std::optional<double> bandwidth = std::nullopt);

/// <p^2>_x - <p>_x^2 on the density mask.
GridField local_momentum_dispersion(const EnsembleState& ensemble, const Grid1D& grid,
                                    std::optional<double> bandwidth = std::nullopt);

/// u = D rho' / rho by centered differences on the density mask.
GridField diffusive_velocity(const GridField& rho, const PhysicalParams& params);

struct StressPair {
  /// -(2m / hbar) (<x'^2>_x - v^2) = -2 sigma_p^2 / (m hbar)
  GridField dynamic;
  /// du/dx = D (ln rho)''
  GridField kinetic;
};

StressPair stress_tensor(const LocalMoments& moments, const PhysicalParams& params);
StressPair stress_tensor(const EnsembleState& ensemble, const GridField& rho, const Grid1D& grid,
                         const PhysicalParams& params,
                         std::optional<double> bandwidth = std::nullopt);

/// (ln rho)'' on the density mask.
GridField log_density_curvature(const GridField& rho);

/// Momentum dispersion implied by the density, sign * (hbar^2 / 4) (ln rho)''.
/// sign = -1 is the choice consistent with dynamic == kinetic stress; both
/// are reported by the experiments.
GridField dispersion_from_density(const GridField& rho, const PhysicalParams& params, int sign);

/// L2 norm of d(rho)/dt + d(rho v)/dx over the interior slices, divided by the
/// L2 norm of d(rho v)/dx. Slice times come from GridField::t. Returns 0 when
/// both norms vanish.
double continuity_residual(std::span<const GridField> rho_series, std::span<const GridField> v_series);

struct RadiativeEstimate {
  /// tau <f'(x) x'>_x rho
  GridField force_density;
  /// tau <f'(x) x'^2>_x rho; integrates to the ensemble dissipated power.
  GridField power_density;
  /// Constant-D Markov surrogate of the diffusive counterpart, pi S_F(w0) rho
  /// / 2m. Harmonic potentials only; approximate by construction.
  std::optional<GridField> diffusive_surrogate;
};

RadiativeEstimate radiative_term_estimate(const EnsembleState& ensemble, const Potential& potential,
                                          const PhysicalParams& params, const Grid1D& grid,
                                          std::optional<double> bandwidth = std::nullopt);

/// sup |F_a - F_b| between the cumulative trapezoid integrals of two densities
/// on the same grid, each normalized to unit mass.
double ks_distance(const GridField& a, const GridField& b);

struct SampleMoments {
  double mean_x = 0.0;
  double var_x = 0.0;
  double mean_p = 0.0;
  double var_p = 0.0;
};

SampleMoments sample_moments(const EnsembleState& ensemble);

}  // namespace sedlab
