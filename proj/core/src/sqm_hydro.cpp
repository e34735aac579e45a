#include "sedlab/sqm_hydro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sedlab {

void SqmParams::validate() const {
  if (lambda != 1 && lambda != -1) throw std::invalid_argument("lambda must be +1 or -1");
  if (!(diffusion >= 0.0)) throw std::invalid_argument("diffusion must be >= 0");
}

HydroFields wavefunction_to_fields(const Wavefunction& psi, const PhysicalParams& params, double t,
                                   double floor_fraction) {
  const Grid1D& g = psi.grid;
  const std::size_t n = g.size();
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = std::norm(psi.values[i]);
  GridField rho_f(g, std::move(rho), FieldKind::density, t);
  rho_f.mask = density_mask(rho_f.values, floor_fraction);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rho_f.values[i] > 0.0)) rho_f.mask[i] = 0;
  }

  GridField v(g, std::vector<double>(n, 0.0), FieldKind::flux_velocity, t);
  GridField u(g, std::vector<double>(n, 0.0), FieldKind::diffusive_velocity, t);
  v.mask.assign(n, 0);
  u.mask.assign(n, 0);
  const double scale = params.hbar() / (params.mass() * 2.0 * g.spacing());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(rho_f.valid(i - 1) && rho_f.valid(i) && rho_f.valid(i + 1))) continue;
    const auto& a = psi.values[i - 1];
    const auto& b = psi.values[i + 1];
    v.values[i] = scale * std::arg(b * std::conj(a));
    u.values[i] = scale * (std::log(std::abs(b)) - std::log(std::abs(a)));
    v.mask[i] = 1;
    u.mask[i] = 1;
  }
  return {std::move(rho_f), std::move(v), std::move(u), t};
}

Wavefunction fields_to_wavefunction(const HydroFields& fields, const PhysicalParams& params) {
  require_same_grid(fields.rho, fields.v, "fields_to_wavefunction");
  const Grid1D& g = fields.rho.grid;
  const std::size_t n = g.size();
  const auto& mask = fields.rho.mask;
  const auto first = std::find(mask.begin(), mask.end(), std::uint8_t{1});
  if (first == mask.end()) throw std::invalid_argument("fields_to_wavefunction: empty density mask");
  const auto lo = static_cast<std::size_t>(first - mask.begin());
  std::size_t hi = n - 1;
  while (!mask[hi]) --hi;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (!mask[i]) throw std::invalid_argument("fields_to_wavefunction: density mask is disconnected");
  }

  // v on the density interval; its end points borrow the nearest valid value.
  std::vector<double> mv(n, 0.0);
  bool any = false;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (fields.v.valid(i)) {
      mv[i] = params.mass() * fields.v.values[i];
      any = true;
    }
  }
  if (any) {
    std::size_t i = lo;
    while (!fields.v.valid(i)) ++i;
    for (std::size_t j = lo; j < i; ++j) mv[j] = mv[i];
    std::size_t k = hi;
    while (!fields.v.valid(k)) --k;
    for (std::size_t j = k + 1; j <= hi; ++j) mv[j] = mv[k];
    for (std::size_t j = i; j <= k; ++j) {
      if (!fields.v.valid(j)) mv[j] = mv[j - 1];
    }
  }

  std::vector<double> phase(n, 0.0);
  const double h = g.spacing();
  for (std::size_t i = lo + 1; i <= hi; ++i) phase[i] = phase[i - 1] + 0.5 * h * (mv[i - 1] + mv[i]);
  for (std::size_t i = hi + 1; i < n; ++i) phase[i] = phase[hi];

  std::vector<std::complex<double>> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::polar(std::sqrt(std::max(0.0, fields.rho.values[i])), phase[i] / params.hbar());
  }
  Wavefunction psi(g, std::move(values));
  psi.normalize();
  return psi;
}

GridField systematic_derivative(std::span<const GridField> series, std::size_t k, const GridField& v) {
  if (series.empty()) throw std::invalid_argument("systematic_derivative: empty series");
  if (k >= series.size()) throw std::invalid_argument("systematic_derivative: slice out of range");
  const GridField& f = series[k];
  require_same_grid(f, v, "systematic_derivative");
  GridField out = derivative(f);
  const std::size_t n = f.grid.size();
  const bool stationary = series.size() == 1;
  if (!stationary && (k == 0 || k + 1 == series.size()))
    throw std::invalid_argument("systematic_derivative: centered time difference needs slices k-1 and k+1");
  double dt = 0.0;
  if (!stationary) {
    require_same_grid(series[k - 1], f, "systematic_derivative");
    require_same_grid(series[k + 1], f, "systematic_derivative");
    dt = series[k + 1].t - series[k - 1].t;
    if (!(dt > 0.0)) throw std::invalid_argument("systematic_derivative: slice times must increase");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.valid(i) || !v.valid(i)) {
      out.mask[i] = 0;
      continue;
    }
    double ft = 0.0;
    if (!stationary) {
      if (!series[k - 1].valid(i) || !series[k + 1].valid(i)) {
        out.mask[i] = 0;
        continue;
      }
      ft = (series[k + 1].values[i] - series[k - 1].values[i]) / dt;
    }
    out.values[i] = ft + v.values[i] * out.values[i];
  }
  out.t = f.t;
  return out;
}

GridField stochastic_derivative(const GridField& f, const GridField& u, double diffusion) {
  require_same_grid(f, u, "stochastic_derivative");
  GridField d1 = derivative(f);
  const GridField d2 = second_derivative(f);
  for (std::size_t i = 0; i < d1.values.size(); ++i) {
    if (!d1.valid(i) || !d2.valid(i) || !u.valid(i)) {
      d1.mask[i] = 0;
      continue;
    }
    d1.values[i] = u.values[i] * d1.values[i] + diffusion * d2.values[i];
  }
  d1.t = f.t;
  return d1;
}

ComplexField complex_velocity(const HydroFields& fields) {
  require_same_grid(fields.v, fields.u, "complex_velocity");
  const std::size_t n = fields.v.grid.size();
  ComplexField w{fields.v.grid, std::vector<std::complex<double>>(n), std::vector<std::uint8_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!fields.v.valid(i) || !fields.u.valid(i)) continue;
    w.values[i] = {fields.v.values[i], -fields.u.values[i]};
    w.mask[i] = 1;
  }
  return w;
}

double momentum_operator_check(const Wavefunction& psi, const PhysicalParams& params, int stencil_order) {
  if (stencil_order != 2 && stencil_order != 4) throw std::invalid_argument("stencil_order must be 2 or 4");
  const HydroFields fields = wavefunction_to_fields(psi, params);
  const ComplexField w = complex_velocity(fields);
  const std::size_t n = psi.grid.size();
  const double h = psi.grid.spacing();
  const auto& p = psi.values;
  const std::complex<double> minus_i_hbar(0.0, -params.hbar());
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!w.mask[i]) continue;
    std::complex<double> dpsi;
    if (stencil_order == 2) {
      dpsi = (p[i + 1] - p[i - 1]) / (2.0 * h);
    } else {
      dpsi = (-p[i + 2] + 8.0 * p[i + 1] - 8.0 * p[i - 1] + p[i - 2]) / (12.0 * h);
    }
    const std::complex<double> lhs = minus_i_hbar * dpsi;
    const std::complex<double> rhs = params.mass() * w.values[i] * p[i];
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, params.hbar() * std::abs(dpsi));
  }
  if (!(scale > 0.0)) throw std::invalid_argument("momentum_operator_check: psi' vanishes on the mask");
  return worst / scale;
}

namespace {

struct NormAccumulator {
  double residual = 0.0;
  std::vector<double> terms;

  explicit NormAccumulator(std::size_t n_terms) : terms(n_terms, 0.0) {}

  double value() const {
    double denom = 0.0;
    for (double t : terms) denom += std::sqrt(t);
    if (denom == 0.0) return residual == 0.0 ? 0.0 : 1.0;
    return std::sqrt(residual) / denom;
  }
};

std::vector<std::size_t> interior_slices(std::size_t count) {
  if (count == 1) return {0};
  if (count < 3) throw std::invalid_argument("residuals need one stationary slice or at least three");
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < count; ++k) out.push_back(k);
  return out;
}

}  // namespace

SqmResidual sqm_residual(std::span<const HydroFields> series, const Potential& potential,
                         const PhysicalParams& params, const SqmParams& sqm) {
  sqm.validate();
  const auto slices = interior_slices(series.size());
  std::vector<GridField> v_series, u_series;
  for (const auto& f : series) {
    v_series.push_back(f.v);
    u_series.push_back(f.u);
  }
  const double m = params.mass();
  const double d = sqm.diffusion;
  // Normalized by the norms of the individual pieces (time derivative,
  // advection, diffusion, force): for a coherent state D_c u and D_s v vanish
  // identically while their pieces do not.
  NormAccumulator first(5), second(4);
  for (std::size_t k : slices) {
    const GridField& v = series[k].v;
    const GridField& u = series[k].u;
    const GridField dcv = systematic_derivative(v_series, k, v);
    const GridField dcu = systematic_derivative(u_series, k, v);
    const GridField v1 = derivative(v), v2 = second_derivative(v);
    const GridField u1 = derivative(u), u2 = second_derivative(u);
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      if (!dcv.valid(i) || !dcu.valid(i) || !v1.valid(i) || !v2.valid(i) || !u1.valid(i) || !u2.valid(i)) continue;
      const double vt = dcv.values[i] - v.values[i] * v1.values[i];
      const double ut = dcu.values[i] - v.values[i] * u1.values[i];
      {
        const double pieces[5] = {m * vt, m * v.values[i] * v1.values[i], m * sqm.lambda * u.values[i] * u1.values[i],
                                  m * sqm.lambda * d * u2.values[i], force(potential, params, v.grid.x(i))};
        const double r = pieces[0] + pieces[1] - pieces[2] - pieces[3] - pieces[4];
        first.residual += r * r;
        for (int j = 0; j < 5; ++j) first.terms[j] += pieces[j] * pieces[j];
      }
      {
        const double pieces[4] = {m * ut, m * v.values[i] * u1.values[i], m * u.values[i] * v1.values[i],
                                  m * d * v2.values[i]};
        const double r = pieces[0] + pieces[1] + pieces[2] + pieces[3];
        second.residual += r * r;
        for (int j = 0; j < 4; ++j) second.terms[j] += pieces[j] * pieces[j];
      }
    }
  }
  return {first.value(), second.value()};
}

double complex_residual(std::span<const HydroFields> series, const Potential& potential,
                        const PhysicalParams& params) {
  using C = std::complex<double>;
  const auto slices = interior_slices(series.size());
  const double m = params.mass();
  const double d = params.diffusion();
  const C i_unit(0.0, 1.0);
  NormAccumulator acc(4);
  for (std::size_t k : slices) {
    const ComplexField w = complex_velocity(series[k]);
    const double h = w.grid.spacing();
    const std::size_t n = w.values.size();
    ComplexField prev = w, next = w;
    double dt = 0.0;
    if (series.size() > 1) {
      prev = complex_velocity(series[k - 1]);
      next = complex_velocity(series[k + 1]);
      dt = series[k + 1].t - series[k - 1].t;
      if (!(dt > 0.0)) throw std::invalid_argument("complex_residual: slice times must increase");
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (!(w.mask[i - 1] && w.mask[i] && w.mask[i + 1] && prev.mask[i] && next.mask[i])) continue;
      const C wt = dt > 0.0 ? (next.values[i] - prev.values[i]) / dt : C(0.0, 0.0);
      const C w1 = (w.values[i + 1] - w.values[i - 1]) / (2.0 * h);
      const C w2 = (w.values[i + 1] - 2.0 * w.values[i] + w.values[i - 1]) / (h * h);
      const C a = m * wt;
      const C b = m * w.values[i] * w1;
      const C c = -m * i_unit * d * w2;
      const double f = force(potential, params, w.grid.x(i));
      const C r = a + b + c - f;
      acc.residual += std::norm(r);
      acc.terms[0] += std::norm(a);
      acc.terms[1] += std::norm(b);
      acc.terms[2] += std::norm(c);
      acc.terms[3] += f * f;
    }
  }
  return acc.value();
}

KineticSplit kinetic_energy_split(const HydroFields& fields, const PhysicalParams& params) {
  const Grid1D& g = fields.rho.grid;
  const std::size_t n = g.size();
  std::vector<double> tv(n, 0.0), tu(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = fields.rho.values[i];
    if (fields.v.valid(i)) tv[i] = fields.v.values[i] * fields.v.values[i] * r;
    if (fields.u.valid(i)) tu[i] = fields.u.values[i] * fields.u.values[i] * r;
  }
  KineticSplit s;
  s.t_v = 0.5 * params.mass() * trapezoid(g, tv);
  s.t_u = 0.5 * params.mass() * trapezoid(g, tu);
  s.total = s.t_v + s.t_u;
  const Wavefunction psi = fields_to_wavefunction(fields, params);
  double grad = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) grad += std::norm(psi.values[i + 1] - psi.values[i]);
  s.from_wavefunction = params.hbar() * params.hbar() / (2.0 * params.mass()) * grad / g.spacing();
  return s;
}

}  // namespace sedlab
