#pragma once

// Grid quantum reference: variational ground states, tridiagonal eigenpairs
// and Crank-Nicolson propagation, all with zero Dirichlet ends.
//
// The discrete Hamiltonian on interior points is
//   (H psi)_i = -(hbar^2 / 2m) (psi_{i+1} - 2 psi_i + psi_{i-1}) / h^2 + V_i psi_i
// and the discrete energy of a real psi vanishing at the ends is
//   E = (hbar^2 / 2m) sum |psi_{i+1} - psi_i|^2 / h + h sum V_i psi_i^2 = h psi.H psi.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sedlab/grid.hpp"
#include "sedlab/model.hpp"
#include "sedlab/spectral.hpp"

namespace sedlab {

/// Trapezoid energy functional. Throws std::invalid_argument unless
/// | ||psi||^2 - 1 | <= 1e-6, DomainError if a grid point lies outside V's domain.
double energy_functional(const Wavefunction& psi, const Potential& potential,
                         const PhysicalParams& params);

/// Energy of real grid vectors (ends included, assumed zero) as a plain
/// function, with its exact gradient.
class DiscreteEnergy {
 public:
  DiscreteEnergy(const Potential& potential, const Grid1D& grid, const PhysicalParams& params);

  double value(std::span<const double> psi) const;
  /// dE/dpsi_i = 2 h (H psi)_i on interior points, 0 at the ends.
  std::vector<double> gradient(std::span<const double> psi) const;
  /// H psi on interior points, 0 at the ends.
  std::vector<double> apply(std::span<const double> psi) const;
  /// h sum psi_i^2
  double norm_squared(std::span<const double> psi) const;

  const Grid1D& grid() const { return grid_; }
  double diagonal_kinetic() const { return kin_diag_; }
  double off_diagonal() const { return off_; }
  const std::vector<double>& potential_values() const { return v_; }

 private:
  Grid1D grid_;
  std::vector<double> v_;
  double kin_diag_;
  double off_;
};

struct VariationalOptions {
  std::size_t max_iterations = 5000;
  /// Descent along (H - sigma)^{-1} applied to the projected gradient, with sigma below
  /// the spectrum. Plain projected steepest descent when false.
  bool preconditioned = true;
  /// Armijo sufficient-decrease constant.
  double armijo = 1e-4;
};

struct VariationalResult {
  Wavefunction psi;
  double energy = 0.0;
  /// Lagrange multiplier of the norm constraint (the Rayleigh quotient).
  double gamma = 0.0;
  std::size_t iterations = 0;
  /// || H psi - gamma psi || with the grid L2 norm.
  double grad_norm = 0.0;
  /// max(|psi_1|, |psi_{n-2}|) / max |psi|.
  double boundary_amplitude = 0.0;
  std::vector<double> energy_history;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, VariationalResult last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const VariationalResult& last() const { return last_; }

 private:
  VariationalResult last_;
};

/// Minimizes the discrete energy on the unit sphere by projected descent with
/// renormalization and Armijo backtracking, so the energy never increases.
/// Converged when grad_norm < tol. Returns a real nonnegative psi.
VariationalResult variational_ground_state(const Potential& potential, const Grid1D& grid,
                                           const PhysicalParams& params, double tol = 1e-8,
                                           const VariationalOptions& options = {});

struct Eigenpairs {
  SpectralData spectrum;
  std::vector<Wavefunction> states;
};

/// Lowest K eigenpairs of the tridiagonal Hamiltonian. Each state is real,
/// unit-normalized and has its first significant lobe positive. Throws
/// std::invalid_argument for K = 0, K > 20 or K >= interior points / 8.
Eigenpairs eigenpairs(const Potential& potential, const Grid1D& grid, const PhysicalParams& params,
                      std::size_t k);

/// Crank-Nicolson steps of i hbar psi_t = H psi. Returns the states after
/// every record_every steps, starting with the input (ends forced to zero).
std::vector<Wavefunction> propagate(const Wavefunction& psi, const Potential& potential,
                                    const PhysicalParams& params, double dt, std::size_t steps,
                                    std::size_t record_every = 1);

/// psi(x) proportional to exp(-(x - x0)^2 / (4 sigma^2) + i k0 x), normalized
/// on the grid; |psi|^2 has variance sigma^2.
Wavefunction gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0 = 0.0);

/// Coherent state of the harmonic oscillator centred at (x0, p0).
Wavefunction coherent_state(const Grid1D& grid, const PhysicalParams& params, double omega0,
                            double x0, double p0);

/// <x> and <x^2> of a state.
double expectation_x(const Wavefunction& psi);
double expectation_x2(const Wavefunction& psi);

}  // namespace sedlab
