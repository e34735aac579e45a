#include "sedlab/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sedlab {

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::density: return "density";
    case FieldKind::flux_velocity: return "flux_velocity";
    case FieldKind::diffusive_velocity: return "diffusive_velocity";
    case FieldKind::stress: return "stress";
    case FieldKind::momentum_dispersion: return "momentum_dispersion";
    case FieldKind::scalar: return "scalar";
  }
  return "scalar";
}

GridField::GridField(Grid1D g, std::vector<double> v, FieldKind k, double time)
    : grid(g), values(std::move(v)), mask(grid.size(), 1), kind(k), t(time) {
  if (values.size() != grid.size()) throw std::invalid_argument("GridField: size mismatch");
}

std::size_t GridField::valid_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::vector<std::uint8_t> density_mask(std::span<const double> rho, double floor_fraction) {
  std::vector<std::uint8_t> mask(rho.size(), 0);
  if (rho.empty()) return mask;
  const double peak = *std::max_element(rho.begin(), rho.end());
  if (!(peak > 0.0)) return mask;
  const double floor = floor_fraction * peak;
  for (std::size_t i = 0; i < rho.size(); ++i) mask[i] = rho[i] > floor ? 1 : 0;
  return mask;
}

GridField density_field(Grid1D grid, std::vector<double> rho, double t) {
  GridField f(grid, std::move(rho), FieldKind::density, t);
  f.mask = density_mask(f.values);
  return f;
}

void require_same_grid(const GridField& a, const GridField& b, const char* where) {
  if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

GridField derivative(const GridField& f) {
  const std::size_t n = f.grid.size();
  const double inv = 1.0 / (2.0 * f.grid.spacing());
  GridField out(f.grid, std::vector<double>(n, 0.0), FieldKind::scalar, f.t);
  out.mask.assign(n, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(f.valid(i - 1) && f.valid(i) && f.valid(i + 1))) continue;
    out.values[i] = (f.values[i + 1] - f.values[i - 1]) * inv;
    out.mask[i] = 1;
  }
  return out;
}

GridField second_derivative(const GridField& f) {
  const std::size_t n = f.grid.size();
  const double h = f.grid.spacing();
  const double inv = 1.0 / (h * h);
  GridField out(f.grid, std::vector<double>(n, 0.0), FieldKind::scalar, f.t);
  out.mask.assign(n, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(f.valid(i - 1) && f.valid(i) && f.valid(i + 1))) continue;
    out.values[i] = (f.values[i + 1] - 2.0 * f.values[i] + f.values[i - 1]) * inv;
    out.mask[i] = 1;
  }
  return out;
}

GridField combine(const GridField& a, const GridField& b,
                  const std::function<double(double, double)>& op, FieldKind kind) {
  require_same_grid(a, b, "combine");
  const std::size_t n = a.grid.size();
  GridField out(a.grid, std::vector<double>(n, 0.0), kind, a.t);
  for (std::size_t i = 0; i < n; ++i) {
    out.mask[i] = a.valid(i) && b.valid(i) ? 1 : 0;
    if (out.mask[i]) out.values[i] = op(a.values[i], b.values[i]);
  }
  return out;
}

double rms_deviation(const GridField& f, const std::function<double(double)>& reference, double lo,
                     double hi) {
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double x = f.grid.x(i);
    if (!f.valid(i) || x < lo || x > hi) continue;
    const double d = f.values[i] - reference(x);
    s += d * d;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("rms_deviation: no valid points in range");
  return std::sqrt(s / static_cast<double>(count));
}

double max_abs(const GridField& f, double lo, double hi) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double x = f.grid.x(i);
    if (f.valid(i) && x >= lo && x <= hi) m = std::max(m, std::abs(f.values[i]));
  }
  return m;
}

}  // namespace sedlab
