#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sedlab {

/// Uniform 1D grid including both endpoints: h = (x_max - x_min) / (n - 1).
class Grid1D {
 public:
  static constexpr std::size_t kMinPoints = 64;

  /// Throws std::invalid_argument for n < 64 or x_max <= x_min.
  Grid1D(double x_min, double x_max, std::size_t n_points);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (x_max_ - x_min_) / static_cast<double>(n_ - 1); }
  double x(std::size_t i) const { return x_min_ + spacing() * static_cast<double>(i); }
  std::vector<double> points() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

double trapezoid(const Grid1D& grid, std::span<const double> values);

/// Complex grid function with the L2 norm taken by the trapezoid rule.
struct Wavefunction {
  Wavefunction(Grid1D g, std::vector<std::complex<double>> v);

  Grid1D grid;
  std::vector<std::complex<double>> values;

  double norm_squared() const;
  /// Rescales to unit norm; throws std::domain_error on a zero function.
  void normalize();
  std::vector<double> density() const;
};

/// <a|b> with the trapezoid weight.
std::complex<double> inner_product(const Wavefunction& a, const Wavefunction& b);

}  // namespace sedlab
