#include "sedlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace sedlab {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
  if (n_points < kMinPoints) throw std::invalid_argument("grid needs at least 64 points");
  if (!(x_max > x_min)) throw std::invalid_argument("grid requires x_max > x_min");
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

double trapezoid(const Grid1D& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * grid.spacing();
}

Wavefunction::Wavefunction(Grid1D g, std::vector<std::complex<double>> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw std::invalid_argument("wavefunction: size mismatch");
}

double Wavefunction::norm_squared() const { return trapezoid(grid, density()); }

void Wavefunction::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw std::domain_error("cannot normalize a zero wavefunction");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& z : values) z *= s;
}

std::vector<double> Wavefunction::density() const {
  std::vector<double> rho(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rho[i] = std::norm(values[i]);
  return rho;
}

std::complex<double> inner_product(const Wavefunction& a, const Wavefunction& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("inner_product: grid mismatch");
  const std::size_t n = a.values.size();
  std::complex<double> s = 0.5 * (std::conj(a.values[0]) * b.values[0] +
                                  std::conj(a.values[n - 1]) * b.values[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) s += std::conj(a.values[i]) * b.values[i];
  return s * a.grid.spacing();
}

}  // namespace sedlab
