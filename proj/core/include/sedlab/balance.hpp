#pragma once

// Ground-state balance between radiative dissipation and field-induced
// diffusion, written as spectral sums over the transitions k -> 0:
//
//   dissipation  = -i beta      sum_k (xi_k - xi_0) w_k0^3 |x_k0|^2
//   diffusion    =  hbar beta^2 sum_k (xi_k - xi_0) w_k0^3 |x_k0|^2
//
// with xi the energy. The two agree term by term only for beta = -i / hbar,
// which turns the Poisson bracket {x, p} = 1 into [x, p] = i hbar.

#include <complex>
#include <vector>

#include "sedlab/grid.hpp"
#include "sedlab/model.hpp"
#include "sedlab/spectral.hpp"

namespace sedlab {

using Complex = std::complex<double>;

std::vector<Complex> lhs_terms(const SpectralData& spec, Complex beta, const PhysicalParams& params);
std::vector<Complex> rhs_terms(const SpectralData& spec, Complex beta, const PhysicalParams& params);

/// Sums of the above. Throw std::invalid_argument on empty spectral data.
Complex lhs_dissipation(const SpectralData& spec, Complex beta, const PhysicalParams& params);
Complex rhs_diffusion(const SpectralData& spec, Complex beta, const PhysicalParams& params);

struct BalanceReport {
  Complex beta;
  std::vector<Complex> lhs_terms;
  std::vector<Complex> rhs_terms;
  Complex lhs;
  Complex rhs;
  /// lhs_k / rhs_k at beta, for each k with a nonzero summand.
  std::vector<std::size_t> ratio_index;
  std::vector<Complex> per_frequency_ratios;
};

/// Nonzero root of lhs(beta) = rhs(beta). Throws std::invalid_argument if every
/// summand vanishes.
BalanceReport solve_beta(const SpectralData& spec, const PhysicalParams& params);

/// <psi| x p - p x |psi> with p = -i hbar times the centered difference.
/// Throws std::invalid_argument if |psi| at either end exceeds
/// boundary_tolerance * max |psi|.
Complex commutator_check(const Wavefunction& psi, const PhysicalParams& params,
                         double boundary_tolerance = 1e-8);

/// dx(t) / dp(t') = sin(w0 t_lag) / (m w0) for the harmonic oscillator.
/// Throws std::invalid_argument for any other potential.
double classical_response(const Potential& potential, const PhysicalParams& params, double t_lag);

/// Memory integral with an exponential cutoff e^{-eps s}: for each transition
/// the w^3 spectrum is integrated over [0, 2 w_k0] against the damped cosine
/// kernel, giving (2 / pi) integral w^3 (1/2)[L(w - w_k0) + L(w + w_k0)] dw,
/// L(y) = eps / (eps^2 + y^2), which tends to w_k0^3 as eps -> 0.
struct DampedMemoryCheck {
  std::vector<double> frequencies;
  std::vector<double> limit;
  std::vector<double> damped;
  std::vector<double> relative_error;
  double max_relative_error = 0.0;
};

/// eps = damping_fraction * w_k0 per transition; k with w_k0 = 0 are skipped.
DampedMemoryCheck damped_memory_check(const SpectralData& spec, double damping_fraction = 1e-3);

}  // namespace sedlab
