#pragma once

// Two-velocity hydrodynamics of a 1D wavefunction and its equations of motion.
//
//   rho = |psi|^2,  m v = hbar Im(psi'/psi),  m u = hbar Re(psi'/psi) = m D (ln rho)'
//   D_c f = f_t + v f',   D_s f = u f' + D f''
//   m (D_c v - lambda D_s u) = f,   D_c u + D_s v = 0
//
// lambda = +1 is the quantum branch; with D = hbar / 2m and w = v - i u the
// pair is equivalent to the Schroedinger equation and -i hbar psi' = m w psi.

#include <complex>
#include <span>
#include <vector>

#include "sedlab/grid.hpp"
#include "sedlab/grid_field.hpp"
#include "sedlab/model.hpp"

namespace sedlab {

struct SqmParams {
  int lambda = 1;
  double diffusion = 0.5;

  /// lambda = +1 and D = hbar / 2m.
  static SqmParams quantum(const PhysicalParams& params) { return {1, params.diffusion()}; }
  /// Throws std::invalid_argument unless lambda is +-1 and D >= 0.
  void validate() const;
};

struct HydroFields {
  GridField rho;
  GridField v;
  GridField u;
  double t = 0.0;
};

/// v and u from the phase and log-modulus differences of neighbouring points,
/// which is exact for a Gaussian times a plane wave. Points at or next to a
/// density below floor_fraction * max rho are masked.
HydroFields wavefunction_to_fields(const Wavefunction& psi, const PhysicalParams& params, double t = 0.0,
                                   double floor_fraction = kDensityFloor);

/// psi = sqrt(rho) exp(i S / hbar) with S = integral m v dx, S = 0 at the
/// leftmost point of the density mask and held constant outside the mask.
/// Throws std::invalid_argument if the density mask is not one interval.
Wavefunction fields_to_wavefunction(const HydroFields& fields, const PhysicalParams& params);

/// D_c f at slice k of a series: centered time difference plus v f'. A series
/// of length one is treated as stationary.
GridField systematic_derivative(std::span<const GridField> series, std::size_t k, const GridField& v);

/// D_s f = u f' + D f''.
GridField stochastic_derivative(const GridField& f, const GridField& u, double diffusion);

struct ComplexField {
  Grid1D grid;
  std::vector<std::complex<double>> values;
  std::vector<std::uint8_t> mask;
};

/// w = v - i u on the common mask.
ComplexField complex_velocity(const HydroFields& fields);

/// max over the mask of |-i hbar psi' - m w psi| / max |hbar psi'|, with psi'
/// from a centered stencil of the given order (2 or 4).
double momentum_operator_check(const Wavefunction& psi, const PhysicalParams& params, int stencil_order = 4);

struct SqmResidual {
  /// m (D_c v - lambda D_s u) - f
  double first = 0.0;
  /// m (D_c u + D_s v)
  double second = 0.0;
};

/// L2 residuals over the interior slices of the series and the common mask,
/// each divided by the sum of the L2 norms of its pieces: time derivative,
/// advection, diffusion and force written out separately (so a value in
/// [0, 1]; 0 when every piece vanishes). Uses f = -V'.
SqmResidual sqm_residual(std::span<const HydroFields> series, const Potential& potential,
                         const PhysicalParams& params, const SqmParams& sqm);

/// The same first equation in complex form,
/// m (w_t + w w' - i D w'') - f, normalized like sqm_residual.
double complex_residual(std::span<const HydroFields> series, const Potential& potential,
                        const PhysicalParams& params);

struct KineticSplit {
  double t_v = 0.0;
  double t_u = 0.0;
  double total = 0.0;
  /// (hbar^2 / 2m) integral |psi'|^2 of the round-trip wavefunction.
  double from_wavefunction = 0.0;
};

KineticSplit kinetic_energy_split(const HydroFields& fields, const PhysicalParams& params);

}  // namespace sedlab
