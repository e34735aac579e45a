#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sedlab/dynamics.hpp"

using namespace sedlab;

namespace {

TrajectoryState run_free(TrajectoryState s, const Potential& pot, const PhysicalParams& p, double dt, int n) {
  const StepDrive none{};
  for (int i = 0; i < n; ++i) s = step(s, none, pot, p, dt);
  return s;
}

}  // namespace

TEST_CASE("undriven oscillator: RK4 matches cos(w t)") {
  const PhysicalParams p(1.0, 1.0, 0.0, 20.0);
  const auto pot = Potential::harmonic(1.0);
  const auto s = run_free({1.0, 0.0, 0.0}, pot, p, 1e-3, 6283);
  const double t = 6283e-3;
  CHECK(s.t == doctest::Approx(t));
  CHECK(s.x == doctest::Approx(std::cos(t)).epsilon(1e-10));
  CHECK(s.p == doctest::Approx(-std::sin(t)).scale(1.0).epsilon(1e-10));
}

TEST_CASE("order-reduced radiation reaction is viscous damping tau w0^2 for the oscillator") {
  const double tau = 0.05, w = 1.0, g = tau * w * w;
  const PhysicalParams p(1.0, 1.0, tau, 20.0);
  const auto s = run_free({1.0, 0.0, 0.0}, Potential::harmonic(w), p, 1e-3, 10000);
  // x'' + g x' + w^2 x = 0, x(0) = 1, x'(0) = 0
  const double wd = std::sqrt(w * w - g * g / 4), t = 10.0;
  const double x = std::exp(-g * t / 2) * (std::cos(wd * t) + g / (2 * wd) * std::sin(wd * t));
  CHECK(s.x == doctest::Approx(x).epsilon(1e-9));
  CHECK(rr_force(p, Potential::harmonic(w), 0.3, 2.0) == doctest::Approx(-tau * 2.0));
}

TEST_CASE("single-mode drive: x'' + x = cos 2t") {
  const PhysicalParams p(1.0, 1.0, 0.0, 20.0);
  FieldRealization f{{2.0}, {1.0}, {0.0}, {1.0}};
  TrajectoryState s{0.0, 0.0, 0.0};
  for (int i = 0; i < 5000; ++i) s = step(s, f, Potential::harmonic(1.0), p, 1e-3);
  const double t = 5.0;
  CHECK(s.x == doctest::Approx((std::cos(t) - std::cos(2 * t)) / 3).epsilon(1e-10));
}

TEST_CASE("runaway and domain exits are reported") {
  const PhysicalParams p(1.0, 1.0, 0.0, 20.0);
  const StepDrive huge{1e9, 1e9, 1e9};
  CHECK_THROWS_AS(step({0.0, 0.0, 0.0}, huge, Potential::free(), p, 0.1), DivergenceError);
  CHECK_THROWS_AS(run_free({0.99, 5.0, 0.0}, Potential::box(1.0), p, 0.01, 10), DomainError);
}

TEST_CASE("config violations name the broken constraint") {
  const ZpfSpectrum s{PhysicalParams(1, 1, 1e-3, 20), 40000};
  IntegrationConfig c;
  CHECK(c.violations(s).empty());
  c.dt = 0.03;
  auto v = c.violations(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("dt·Ω ≥ 0.5") != std::string::npos);
  c.dt = 0.02;
  c.t_end = 20000;
  v = c.violations(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("2π/Δω") != std::string::npos);
  CHECK(c.steps() == 1000000);
}

TEST_CASE("power summaries") {
  std::vector<PowerRecord> r{{0, 1, 2.0, -1.0}, {1, 3, 1.0, -1.0}};
  const auto s = summarize_power(r);
  CHECK(s.absorbed == doctest::Approx(4.0 / 3.0));
  CHECK(s.dissipated == doctest::Approx(-1.0));
  CHECK(s.ratio == doctest::Approx((4.0 / 3.0 - 1.0) / (4.0 / 3.0)));
  CHECK(power_balance(std::vector<PowerRecord>{{0, 1, 0.0, 0.0}}) == 0.0);
  CHECK(power_balance(std::vector<PowerRecord>{{0, 1, 0.0, -1.0}}) == -1.0);
  CHECK(records_from(r, 0.5).size() == 1);
}

TEST_CASE("ensemble output does not depend on the thread count") {
  const PhysicalParams p(1, 1, 1e-3, 20);
  const ZpfSpectrum s{p, 2000};
  IntegrationConfig c;
  c.dt = 0.02;
  c.t_end = 20;
  c.record_stride = 100;
  c.n_trajectories = 37;
  c.power_windows = 4;
  c.master_seed = 11;
  const auto init = InitialDistribution::gaussian(0.5, 0.5);
  const auto a = simulate_ensemble(init, Potential::harmonic(1), p, s, c);
  c.threads = 4;
  const auto b = simulate_ensemble(init, Potential::harmonic(1), p, s, c);
  REQUIRE(a.snapshots.size() == 11);
  REQUIRE(b.snapshots.size() == 11);
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    CHECK(a.snapshots[k].positions == b.snapshots[k].positions);
    CHECK(a.snapshots[k].momenta == b.snapshots[k].momenta);
  }
  REQUIRE(a.power.size() == 4);
  for (std::size_t w = 0; w < 4; ++w) CHECK(a.power[w].absorbed == b.power[w].absorbed);
}

TEST_CASE("early growth of <x^2> from rest follows the absorption rate") {
  // <x^2>(t) = (hbar / 2 m w0)(1 - exp(-tau w0^2 t)) for small tau
  const PhysicalParams p(1, 1, 1e-3, 20);
  const ZpfSpectrum s{p, 4000};
  IntegrationConfig c;
  c.dt = 0.02;
  c.t_end = 100;
  c.record_stride = 5000;
  c.n_trajectories = 600;
  c.master_seed = 3;
  const auto run = simulate_ensemble(InitialDistribution::point(0, 0), Potential::harmonic(1), p, s, c);
  const auto& last = run.snapshots.back();
  double x2 = 0.0;
  for (double x : last.positions) x2 += x * x;
  x2 /= static_cast<double>(last.size());
  const double expected = 0.5 * (1 - std::exp(-1e-3 * 100));
  CHECK(x2 == doctest::Approx(expected).epsilon(0.2));
}
