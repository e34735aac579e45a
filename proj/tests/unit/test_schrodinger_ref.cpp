#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sedlab/schrodinger_ref.hpp"

using namespace sedlab;

namespace {

const PhysicalParams kUnits(1, 1, 1e-3, 20);

// Dense interior Hamiltonian diagonalized by Eigen.
Eigen::VectorXd dense_levels(const Potential& pot, const Grid1D& g) {
  const std::size_t n = g.size() - 2;
  const double h = g.spacing();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    H(i, i) = 1.0 / (h * h) + pot.value(g.x(i + 1), 1.0);
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = -0.5 / (h * h);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("eigenpairs agree with a dense solve") {
  for (const auto& [pot, g] : {std::pair{Potential::harmonic(1), Grid1D(-8, 8, 400)},
                               std::pair{Potential::quartic(1), Grid1D(-5, 5, 400)},
                               std::pair{Potential::box(1), Grid1D(0, 1, 400)}}) {
    const auto e = eigenpairs(pot, g, kUnits, 8);
    const auto ref = dense_levels(pot, g);
    for (int k = 0; k < 8; ++k) CHECK(e.spectrum.levels[k] == doctest::Approx(ref(k)).epsilon(1e-10));
    for (const auto& s : e.states) CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(inner_product(e.states[0], e.states[1])) < 1e-10);
  }
}

TEST_CASE("oscillator levels and dipoles") {
  const Grid1D g(-10, 10, 2001);
  const auto e = eigenpairs(Potential::harmonic(1), g, kUnits, 6);
  for (int k = 0; k < 6; ++k) CHECK(e.spectrum.levels[k] == doctest::Approx(k + 0.5).epsilon(1e-4));
  CHECK(e.spectrum.frequencies[1] == doctest::Approx(1.0).epsilon(1e-4));
  // <1|x|0> = sqrt(hbar / 2 m w0); only k = 1 couples
  CHECK(std::abs(e.spectrum.dipoles[1]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  // parity kills even k exactly; odd k > 1 only vanish as h -> 0
  CHECK(std::abs(e.spectrum.dipoles[2]) < 1e-8);
  CHECK(std::abs(e.spectrum.dipoles[3]) < 1e-4);
  CHECK_THROWS(eigenpairs(Potential::harmonic(1), g, kUnits, 0));
  CHECK_THROWS(eigenpairs(Potential::harmonic(1), g, kUnits, 21));
  CHECK_THROWS(eigenpairs(Potential::harmonic(1), Grid1D(-8, 8, 64), kUnits, 8));
}

TEST_CASE("box ground state") {
  const Grid1D g(0, 1, 1024);
  const auto r = variational_ground_state(Potential::box(1), g, kUnits);
  CHECK(r.energy == doctest::Approx(std::numbers::pi * std::numbers::pi / 2).epsilon(1e-3));
  for (const auto& z : r.psi.values) CHECK(z.real() >= 0.0);
}

TEST_CASE("variational descent: oscillator") {
  const Grid1D g(-8, 8, 1024);
  const auto r = variational_ground_state(Potential::harmonic(1), g, kUnits, 1e-8);
  CHECK(r.energy == doctest::Approx(0.5).epsilon(2e-4));
  CHECK(r.grad_norm < 1e-8);
  CHECK(r.gamma == doctest::Approx(r.energy).epsilon(1e-10));
  CHECK(r.boundary_amplitude < 1e-8);
  for (std::size_t i = 1; i < r.energy_history.size(); ++i)
    CHECK(r.energy_history[i] <= r.energy_history[i - 1] * (1 + 1e-13));
  CHECK(energy_functional(r.psi, Potential::harmonic(1), kUnits) == doctest::Approx(r.energy).epsilon(1e-9));
}

TEST_CASE("plain steepest descent reaches the same state") {
  const Grid1D g(-6, 6, 256);
  VariationalOptions o;
  o.preconditioned = false;
  o.max_iterations = 200000;
  const auto a = variational_ground_state(Potential::quartic(1), g, kUnits, 1e-6, o);
  const auto b = variational_ground_state(Potential::quartic(1), g, kUnits, 1e-6);
  CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-9));
  CHECK(b.iterations < a.iterations);
}

TEST_CASE("non-convergence is reported with the last iterate") {
  VariationalOptions o;
  o.max_iterations = 2;
  try {
    variational_ground_state(Potential::harmonic(1), Grid1D(-8, 8, 1024), kUnits, 1e-12, o);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.last().iterations == 2);
    CHECK(e.last().energy > 0.5);
  }
  CHECK_THROWS(variational_ground_state(Potential::free(), Grid1D(-8, 8, 256), kUnits));
}

TEST_CASE("gradient matches central differences") {
  const Grid1D g(-6, 6, 300);
  const DiscreteEnergy E(Potential::quartic(0.7), g, PhysicalParams(1.3, 0.8, 1e-3, 20));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> psi(g.size()), dir(g.size());
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    psi[i] = std::exp(-g.x(i) * g.x(i)) + 0.1 * n(rng);
    dir[i] = n(rng);
  }
  std::vector<double> plus(psi), minus(psi);
  for (std::size_t i = 0; i < g.size(); ++i) {
    plus[i] += 1e-4 * dir[i];
    minus[i] -= 1e-4 * dir[i];
  }
  const auto grad = E.gradient(psi);
  double an = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) an += grad[i] * dir[i];
  CHECK((E.value(plus) - E.value(minus)) / 2e-4 == doctest::Approx(an).epsilon(1e-8));
}

TEST_CASE("energy functional rejects an unnormalized state") {
  const Grid1D g(-8, 8, 512);
  auto psi = gaussian_packet(g, 0, 1);
  for (auto& z : psi.values) z *= 1.01;
  CHECK_THROWS_AS(energy_functional(psi, Potential::harmonic(1), kUnits), std::invalid_argument);
}

TEST_CASE("Crank-Nicolson: coherent state oscillates and keeps its norm") {
  const Grid1D g(-10, 10, 2048);
  const auto psi = coherent_state(g, kUnits, 1.0, 1.5, 0.0);
  const auto states = propagate(psi, Potential::harmonic(1), kUnits, 2e-3, 1500, 500);
  REQUIRE(states.size() == 4);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double t = 1.0 * k;
    CHECK(states[k].norm_squared() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(expectation_x(states[k]) == doctest::Approx(1.5 * std::cos(t)).epsilon(1e-4).scale(1));
    CHECK(expectation_x2(states[k]) - std::pow(expectation_x(states[k]), 2) == doctest::Approx(0.5).epsilon(1e-4));
  }
}

TEST_CASE("packets") {
  const Grid1D g(-10, 10, 2001);
  const auto p = gaussian_packet(g, 1.0, 0.7, 2.0);
  CHECK(p.norm_squared() == doctest::Approx(1.0));
  CHECK(expectation_x(p) == doctest::Approx(1.0));
  CHECK(expectation_x2(p) - 1.0 == doctest::Approx(0.49).epsilon(1e-6));
}
