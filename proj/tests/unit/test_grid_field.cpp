#include <cmath>

#include "doctest.h"
#include "sedlab/grid_field.hpp"

using namespace sedlab;

TEST_CASE("grid construction") {
  CHECK_THROWS_AS(Grid1D(0, 1, 63), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D(1, 1, 100), std::invalid_argument);
  const Grid1D g(-1, 1, 101);
  CHECK(g.spacing() == doctest::Approx(0.02));
  CHECK(g.x(100) == doctest::Approx(1.0));
}

TEST_CASE("trapezoid is exact for linear data") {
  const Grid1D g(0, 2, 65);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3 * g.x(i) + 1;
  CHECK(trapezoid(g, v) == doctest::Approx(8.0));
}

TEST_CASE("centered differences of a cubic") {
  const Grid1D g(-1, 1, 201);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(g.x(i), 3);
  const GridField f(g, v);
  const auto d1 = derivative(f), d2 = second_derivative(f);
  CHECK_FALSE(d1.valid(0));
  CHECK_FALSE(d2.valid(200));
  const double h = g.spacing();
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double x = g.x(i);
    CHECK(d1.values[i] == doctest::Approx(3 * x * x + h * h).epsilon(1e-9).scale(1.0));
    CHECK(d2.values[i] == doctest::Approx(6 * x).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("masks propagate through derivatives and combine") {
  const Grid1D g(0, 1, 64);
  GridField a(g, std::vector<double>(64, 1.0)), b(g, std::vector<double>(64, 2.0));
  a.mask[10] = 0;
  const auto d = derivative(a);
  CHECK_FALSE(d.valid(9));
  CHECK_FALSE(d.valid(10));
  CHECK_FALSE(d.valid(11));
  CHECK(d.valid(12));
  const auto c = combine(a, b, [](double x, double y) { return x + y; });
  CHECK(c.values[5] == 3.0);
  CHECK_FALSE(c.valid(10));
  const GridField other(Grid1D(0, 2, 64), std::vector<double>(64, 0.0));
  CHECK_THROWS(combine(a, other, [](double x, double) { return x; }));
}

TEST_CASE("density floor") {
  const auto m = density_mask(std::vector<double>{0.0, 0.5e-3, 2e-3, 1.0});
  CHECK(m == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("rms and max over a window") {
  const Grid1D g(-2, 2, 401);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g.x(i) + 0.1;
  const GridField f(g, v);
  CHECK(rms_deviation(f, [](double x) { return x; }, -1, 1) == doctest::Approx(0.1));
  CHECK(max_abs(f, -1, 1) == doctest::Approx(1.1));
  CHECK_THROWS(rms_deviation(f, [](double x) { return x; }, 5, 6));
}
