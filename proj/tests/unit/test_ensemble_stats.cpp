#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sedlab/ensemble_stats.hpp"
#include "test_util.hpp"

using namespace sedlab;

namespace {

const PhysicalParams kUnits(1, 1, 1e-3, 20);

GridField exact_ground_density(const Grid1D& g) { return density_field(g, testutil::gaussian_pdf(g, 0, 0.5)); }

}  // namespace

TEST_CASE("KDE of 1e5 standard normals") {
  const Grid1D g(-6, 6, 601);
  const auto e = testutil::normal_ensemble(100000, 1.0, 1.0, 1);
  const auto rho = density_kde(e, g);
  CHECK(trapezoid(g, rho.values) == doctest::Approx(1.0).epsilon(1e-6));
  const auto pdf = testutil::gaussian_pdf(g, 0, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g.x(i)) < 3) worst = std::max(worst, std::abs(rho.values[i] - pdf[i]));
  CHECK(worst < 0.01);
}

TEST_CASE("bandwidth rules") {
  std::vector<double> s{-1, 1};
  for (int i = 0; i < 98; ++i) s.push_back(i % 2 ? 1.0 : -1.0);
  const double sd = std::sqrt(100.0 / 99.0);
  CHECK(silverman_bandwidth(s) == doctest::Approx(0.9 * std::min(sd, 2.0 / 1.34) * std::pow(100.0, -0.2)));
  CHECK(curvature_bandwidth(s) > silverman_bandwidth(s));
  CHECK_THROWS_AS(silverman_bandwidth(std::vector<double>(10, 2.0)), DegenerateEnsemble);
}

TEST_CASE("degenerate ensembles are rejected") {
  const Grid1D g(-5, 5, 101);
  CHECK_THROWS_AS(density_kde(testutil::normal_ensemble(99, 1, 1, 2), g), DegenerateEnsemble);
  EnsembleState same{std::vector<double>(200, 0.3), std::vector<double>(200, 0.0)};
  CHECK_THROWS_AS(density_kde(same, g), DegenerateEnsemble);
  const auto far = testutil::normal_ensemble(500, 1, 1, 3, 100.0);
  CHECK_THROWS_AS(density_kde(far, g), DegenerateEnsemble);
}

TEST_CASE("constant momentum: v = c, zero dispersion") {
  const Grid1D g(-5, 5, 201);
  auto e = testutil::normal_ensemble(2000, 1, 1, 4);
  std::fill(e.momenta.begin(), e.momenta.end(), 0.7);
  const auto m = local_moments(e, g, PhysicalParams(2, 1, 1e-3, 20));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.v.valid(i)) continue;
    CHECK(m.v.values[i] == doctest::Approx(0.35));
    CHECK(std::abs(m.sigma_p2.values[i]) < 1e-12);
  }
}

TEST_CASE("independent momenta: local dispersion equals the global one") {
  const Grid1D g(-5, 5, 201);
  const auto e = testutil::normal_ensemble(200000, 1, std::sqrt(0.3), 5);
  const auto s = local_momentum_dispersion(e, g);
  const auto v = flux_velocity(e, g, kUnits);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.x(i)) > 1.5) continue;
    CHECK(s.values[i] == doctest::Approx(0.3).epsilon(0.05));
    CHECK(std::abs(v.values[i]) < 0.03);
  }
  const auto stress = stress_tensor(e, density_kde(e, g), g, kUnits);
  const auto mid = g.size() / 2;
  CHECK(stress.dynamic.values[mid] == doctest::Approx(-2 * 0.3).epsilon(0.05));
}

TEST_CASE("exact ground-state density: u = -x, T_kin = -1, dispersion = 1/2") {
  const Grid1D g(-6, 6, 1201);
  const auto rho = exact_ground_density(g);
  const auto u = diffusive_velocity(rho, kUnits);
  const double h = g.spacing();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!u.valid(i)) continue;
    const double x = g.x(i);
    // D (rho_{+} - rho_{-}) / (2 h rho) = -D sinh(2 x h) / h e^{-h^2}
    CHECK(u.values[i] == doctest::Approx(-0.5 * std::sinh(2 * x * h) * std::exp(-h * h) / h).epsilon(1e-9).scale(1));
  }
  const auto minus = dispersion_from_density(rho, kUnits, -1), plus = dispersion_from_density(rho, kUnits, +1);
  const auto curv = log_density_curvature(rho);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!minus.valid(i)) continue;
    CHECK(curv.values[i] == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(minus.values[i] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(plus.values[i] == doctest::Approx(-0.5).epsilon(1e-9));
  }
  LocalMoments m{rho, rho, rho, 0.0};
  const auto st = stress_tensor(m, kUnits);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!st.kinetic.valid(i)) continue;
    CHECK(st.kinetic.values[i] == doctest::Approx(-1.0).epsilon(1e-9));
    // m^2 D T_kin = -(hbar^2 / 4)(ln rho)'' * (-1)
    CHECK(kUnits.mass() * kUnits.mass() * kUnits.diffusion() * st.kinetic.values[i] == doctest::Approx(plus.values[i]));
  }
}

TEST_CASE("u integrates to zero against rho") {
  const Grid1D g(-8, 8, 801);
  std::vector<double> r = testutil::gaussian_pdf(g, 0.4, 0.8);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.6 * r[i] + 0.4 * testutil::gaussian_pdf(g, -1.5, 0.3)[i];
  const auto rho = density_field(g, r);
  const auto u = diffusive_velocity(rho, kUnits);
  std::vector<double> ur(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (u.valid(i)) ur[i] = u.values[i] * r[i];
  CHECK(std::abs(trapezoid(g, ur)) < 1e-3);
}

TEST_CASE("continuity residual: spreading free Gaussian") {
  // sigma(t)^2 = s0^2 (1 + t^2), v = x t / (1 + t^2) with hbar = m = 1, s0^2 = 1/2
  const Grid1D g(-10, 10, 2001);
  std::vector<GridField> rho, v;
  for (int k = 0; k < 5; ++k) {
    const double t = 0.5 + 1e-3 * k;
    const double var = 0.5 * (1 + t * t);
    rho.push_back(density_field(g, testutil::gaussian_pdf(g, 0, var), t));
    std::vector<double> vel(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) vel[i] = g.x(i) * t / (1 + t * t);
    v.emplace_back(g, vel, FieldKind::flux_velocity, t);
  }
  CHECK(continuity_residual(rho, v) < 1e-3);
  // stationary exact fields
  std::vector<GridField> r2(3, density_field(g, testutil::gaussian_pdf(g, 0, 0.5))), v2(3, GridField(g, std::vector<double>(g.size(), 0.0)));
  for (int k = 0; k < 3; ++k) r2[k].t = v2[k].t = k;
  CHECK(continuity_residual(r2, v2) == 0.0);
}

TEST_CASE("radiative estimate") {
  const Grid1D g(-5, 5, 201);
  const auto e = testutil::normal_ensemble(50000, std::sqrt(0.5), std::sqrt(0.5), 6);
  const auto zero = radiative_term_estimate(e, Potential::harmonic(1), PhysicalParams(1, 1, 0.0, 20), g);
  for (double v : zero.force_density.values) CHECK(v == 0.0);
  const auto r = radiative_term_estimate(e, Potential::harmonic(1), kUnits, g);
  // tau f' v^2 = -tau <p^2>
  double p2 = 0.0;
  for (double p : e.momenta) p2 += p * p;
  p2 /= static_cast<double>(e.size());
  CHECK(trapezoid(g, r.power_density.values) == doctest::Approx(-1e-3 * p2).epsilon(1e-3));
  REQUIRE(r.diffusive_surrogate.has_value());
  CHECK(trapezoid(g, r.diffusive_surrogate->values) == doctest::Approx(5e-4).epsilon(1e-6));
  CHECK_FALSE(radiative_term_estimate(e, Potential::quartic(1), kUnits, g).diffusive_surrogate.has_value());
}

TEST_CASE("KS distance") {
  const Grid1D g(-8, 8, 1601);
  const auto a = density_field(g, testutil::gaussian_pdf(g, 0, 1));
  const auto b = density_field(g, testutil::gaussian_pdf(g, 0.1, 1));
  CHECK(ks_distance(a, a) == 0.0);
  // sup |Phi(x) - Phi(x - 0.1)| = Phi(0.05) - Phi(-0.05)
  CHECK(ks_distance(a, b) == doctest::Approx(std::erf(0.05 / std::sqrt(2))).epsilon(1e-4));
}

TEST_CASE("sample moments") {
  EnsembleState e{{1, 2, 3, 4}, {0, 0, 2, 2}};
  const auto m = sample_moments(e);
  CHECK(m.mean_x == 2.5);
  CHECK(m.var_x == doctest::Approx(5.0 / 3.0));
  CHECK(m.var_p == doctest::Approx(4.0 / 3.0));
}
