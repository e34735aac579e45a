#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sedlab/balance.hpp"
#include "sedlab/schrodinger_ref.hpp"

using namespace sedlab;

namespace {

const PhysicalParams kUnits(1, 1, 1e-3, 20);

}  // namespace

TEST_CASE("beta = -i / hbar for oscillator and box spectra") {
  for (double hbar : {1.0, 0.37}) {
    const PhysicalParams p(1, hbar, 1e-3, 20);
    const auto ho = eigenpairs(Potential::harmonic(1), Grid1D(-12, 12, 2001), p, 8);
    const auto box = eigenpairs(Potential::box(1), Grid1D(0, 1, 1001), p, 8);
    for (const auto* spec : {&ho.spectrum, &box.spectrum}) {
      const auto r = solve_beta(*spec, p);
      CHECK(std::abs(r.beta - Complex(0, -1 / hbar)) < 1e-10 / hbar);
      for (const auto& q : r.per_frequency_ratios) CHECK(std::abs(q - 1.0) < 1e-8);
      CHECK(std::abs(r.lhs - r.rhs) < 1e-10 * std::abs(r.lhs));
    }
  }
}

TEST_CASE("any other beta breaks the balance term by term") {
  const auto s = SpectralData::from_levels({0.5, 1.5, 2.5}, {0.0, 0.7, 0.1}, 1.0);
  for (Complex beta : {Complex(0, 1), Complex(1, 0), Complex(0, -2)}) {
    const auto l = lhs_terms(s, beta, kUnits), r = rhs_terms(s, beta, kUnits);
    CHECK(std::abs(l[1] - r[1]) > 0.1 * std::abs(l[1]));
  }
  CHECK(lhs_dissipation(s, Complex(0, -1), kUnits) == rhs_diffusion(s, Complex(0, -1), kUnits));
  CHECK_THROWS(solve_beta(SpectralData::from_levels({0.5, 1.5}, {0.0, 0.0}, 1.0), kUnits));
  CHECK_THROWS(SpectralData::from_levels({0.5, 0.2}, {0.0, 1.0}, 1.0).validate());
}

TEST_CASE("commutator expectation is i hbar") {
  const Grid1D g(-8, 8, 2048);
  const auto e = eigenpairs(Potential::harmonic(1), g, kUnits, 3);
  for (const auto& psi : {e.states[0], e.states[2], coherent_state(g, kUnits, 1, 1, 0.5)}) {
    const Complex c = commutator_check(psi, kUnits);
    CHECK(std::abs(c - Complex(0, 1)) < 1e-4);
  }
  const PhysicalParams p2(1, 2.5, 1e-3, 20);
  CHECK(std::abs(commutator_check(gaussian_packet(g, 0, 0.7, 0.3), p2) - Complex(0, 2.5)) < 2.5e-4);
  CHECK_THROWS(commutator_check(gaussian_packet(g, 7, 1), kUnits));
}

TEST_CASE("damped memory integral tends to w^3") {
  const auto s = SpectralData::from_levels({0.5, 1.5, 3.0}, {0.0, 0.7, 0.2}, 1.0);
  const auto d = damped_memory_check(s, 1e-3);
  REQUIRE(d.frequencies.size() == 2);
  CHECK(d.max_relative_error < 0.01);
  // the same integral by quadrature, split at the peak
  for (std::size_t k = 0; k < d.frequencies.size(); ++k) {
    const double wk = d.frequencies[k], eps = 1e-3 * wk;
    auto f = [&](double w) {
      return w * w * w * (eps / (eps * eps + (w - wk) * (w - wk)) + eps / (eps * eps + (w + wk) * (w + wk))) / std::numbers::pi;
    };
    using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double I = Q::integrate(f, 0.0, wk, 20, 1e-12) + Q::integrate(f, wk, 2 * wk, 20, 1e-12);
    CHECK(d.damped[k] == doctest::Approx(I).epsilon(1e-8));
  }
  CHECK(damped_memory_check(s, 1e-5).max_relative_error < damped_memory_check(s, 1e-3).max_relative_error);
}

TEST_CASE("classical response") {
  CHECK(classical_response(Potential::harmonic(2), PhysicalParams(3, 1, 0, 20), 0.4) ==
        doctest::Approx(std::sin(0.8) / 6));
  CHECK_THROWS(classical_response(Potential::box(1), kUnits, 1.0));
}
