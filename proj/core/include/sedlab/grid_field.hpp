#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sedlab/grid.hpp"

namespace sedlab {

enum class FieldKind {
  density,
  flux_velocity,
  diffusive_velocity,
  stress,
  momentum_dispersion,
  scalar,
};

std::string to_string(FieldKind kind);

/// Real field on a grid. mask[i] == 0 marks points where the value is not
/// meaningful (density below the floor, missing neighbours, nodes).
struct GridField {
  GridField(Grid1D g, std::vector<double> v, FieldKind k = FieldKind::scalar, double time = 0.0);

  Grid1D grid;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;
  FieldKind kind;
  double t;

  bool valid(std::size_t i) const { return mask[i] != 0; }
  std::size_t valid_count() const;
};

/// Points with rho <= floor_fraction * max(rho) are masked.
inline constexpr double kDensityFloor = 1e-3;

std::vector<std::uint8_t> density_mask(std::span<const double> rho,
                                       double floor_fraction = kDensityFloor);

/// Density field with the floor mask applied; the values are not rescaled.
GridField density_field(Grid1D grid, std::vector<double> rho, double t = 0.0);

/// Centered first and second differences. A point is valid only if it and
/// both neighbours are; the two ends are always masked.
GridField derivative(const GridField& f);
GridField second_derivative(const GridField& f);

/// Pointwise combination of two fields on the same grid; the mask is the
/// intersection.
GridField combine(const GridField& a, const GridField& b, const std::function<double(double, double)>& op,
                  FieldKind kind = FieldKind::scalar);

/// RMS of f - reference(x) over valid points with lo <= x <= hi. Throws if no
/// point qualifies.
double rms_deviation(const GridField& f, const std::function<double(double)>& reference,
                     double lo, double hi);

/// Largest |value| over valid points in [lo, hi].
double max_abs(const GridField& f, double lo, double hi);

void require_same_grid(const GridField& a, const GridField& b, const char* where);

}  // namespace sedlab
