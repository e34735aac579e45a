#pragma once

// Physical parameters and external potentials shared by every module.
//
// Units are whatever the caller picks; the defaults are the dimensionless
// scheme hbar = m = 1 with a harmonic frequency of 1, in which the quantum
// ground state has <x^2> = 1/2 and E0 = 1/2.

#include <stdexcept>
#include <string>
#include <variant>

namespace sedlab {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PhysicalParams {
 public:
  /// Throws std::invalid_argument unless m > 0, hbar > 0, tau >= 0, cutoff > 0.
  PhysicalParams(double mass = 1.0, double hbar = 1.0, double tau = 1e-3,
                 double cutoff = 20.0);

  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  /// Radiation-reaction time scale.
  double tau() const { return tau_; }
  /// Upper angular-frequency cutoff of the zero-point field.
  double cutoff() const { return cutoff_; }
  /// D = hbar / 2m, always derived.
  double diffusion() const { return hbar_ / (2.0 * mass_); }

  PhysicalParams with_tau(double tau) const { return {mass_, hbar_, tau, cutoff_}; }
  PhysicalParams with_cutoff(double cutoff) const { return {mass_, hbar_, tau_, cutoff}; }
  PhysicalParams with_hbar(double hbar) const { return {mass_, hbar, tau_, cutoff_}; }

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;

 private:
  double mass_;
  double hbar_;
  double tau_;
  double cutoff_;
};

struct Harmonic {
  double omega0 = 1.0;
};
struct Quartic {
  double k = 1.0;
};
/// Infinite square well on [0, length].
struct Box {
  double length = 1.0;
};
struct Free {};

class Potential {
 public:
  using Variant = std::variant<Harmonic, Quartic, Box, Free>;

  Potential() : v_(Free{}) {}
  /// Throws std::invalid_argument on a non-positive shape parameter.
  explicit Potential(Variant v);

  static Potential harmonic(double omega0) { return Potential(Harmonic{omega0}); }
  static Potential quartic(double k) { return Potential(Quartic{k}); }
  static Potential box(double length) { return Potential(Box{length}); }
  static Potential free() { return Potential(Free{}); }

  const Variant& variant() const { return v_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&v_);
  }

  /// V(x). Throws DomainError outside a box.
  double value(double x, double mass) const;
  /// Whether x lies where V is finite.
  bool in_domain(double x) const;
  bool confining() const;
  std::string name() const;

 private:
  Variant v_;
};

/// f = -dV/dx, analytically.
double force(const Potential& potential, const PhysicalParams& params, double x);

/// -d^2V/dx^2, analytically. Used by the order-reduced radiation reaction.
double force_gradient(const Potential& potential, const PhysicalParams& params,
                      double x);

}  // namespace sedlab
