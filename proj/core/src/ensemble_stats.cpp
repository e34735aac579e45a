#include "sedlab/ensemble_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace sedlab {

namespace {

constexpr double kKernelReach = 8.0;

void check_ensemble(const EnsembleState& e) {
  if (e.positions.size() != e.momenta.size())
    throw DegenerateEnsemble("ensemble positions and momenta differ in length");
  if (e.size() < kMinEnsemble) throw DegenerateEnsemble("ensemble needs at least 100 samples");
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!std::isfinite(e.positions[i]) || !std::isfinite(e.momenta[i]))
      throw DegenerateEnsemble("ensemble contains non-finite entries");
  }
  const auto [lo, hi] = std::minmax_element(e.positions.begin(), e.positions.end());
  if (*lo == *hi) throw DegenerateEnsemble("all ensemble positions are identical");
}

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

// sums[c][i] = sum_j K_h(x_i - x_j) weights[c][j]; channel weights are given
// per sample by fill(j, out).
template <class Fill>
std::vector<std::vector<double>> kernel_sums(std::span<const double> xs, const Grid1D& grid, double h,
                                             std::size_t channels, Fill&& fill) {
  const std::size_t n = grid.size();
  std::vector<std::vector<double>> sums(channels, std::vector<double>(n, 0.0));
  const double dx = grid.spacing();
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h);
  const double inv_h = 1.0 / h;
  std::vector<double> w(channels);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double xj = xs[j];
    const double lo = std::ceil((xj - kKernelReach * h - grid.x_min()) / dx);
    const double hi = std::floor((xj + kKernelReach * h - grid.x_min()) / dx);
    if (hi < 0.0 || lo > static_cast<double>(n - 1)) continue;
    const auto i0 = static_cast<std::size_t>(std::max(lo, 0.0));
    const auto i1 = static_cast<std::size_t>(std::min(hi, static_cast<double>(n - 1)));
    fill(j, w.data());
    for (std::size_t i = i0; i <= i1; ++i) {
      const double z = (grid.x(i) - xj) * inv_h;
      const double k = norm * std::exp(-0.5 * z * z);
      for (std::size_t c = 0; c < channels; ++c) sums[c][i] += k * w[c];
    }
  }
  return sums;
}

double resolve_bandwidth(const EnsembleState& e, std::optional<double> bandwidth) {
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    return *bandwidth;
  }
  return silverman_bandwidth(e.positions);
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

namespace {

double robust_spread(std::span<const double> samples) {
  if (samples.size() < 2) throw DegenerateEnsemble("bandwidth needs at least two samples");
  const double mean = mean_of(samples);
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size() - 1);
  const double sd = std::sqrt(var);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (!(sd > 0.0) || sorted.front() == sorted.back()) throw DegenerateEnsemble("all ensemble positions are identical");
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  return iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  return 0.9 * robust_spread(samples) * std::pow(static_cast<double>(samples.size()), -0.2);
}

double curvature_bandwidth(std::span<const double> samples) {
  return std::pow(4.0 / 7.0, 1.0 / 9.0) * robust_spread(samples) *
         std::pow(static_cast<double>(samples.size()), -1.0 / 9.0);
}

LocalMoments local_moments(const EnsembleState& ensemble, const Grid1D& grid,
                           const PhysicalParams& params, std::optional<double> bandwidth) {
  check_ensemble(ensemble);
  const double h = resolve_bandwidth(ensemble, bandwidth);
  // Momenta are shifted by their global mean so a constant momentum gives an
  // exactly zero dispersion.
  const double p_shift = mean_of(ensemble.momenta);
  auto sums = kernel_sums(ensemble.positions, grid, h, 3, [&](std::size_t j, double* w) {
    const double q = ensemble.momenta[j] - p_shift;
    w[0] = 1.0;
    w[1] = q;
    w[2] = q * q;
  });
  const std::size_t n = grid.size();
  const double n_samples = static_cast<double>(ensemble.size());
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = sums[0][i] / n_samples;
  const double mass = trapezoid(grid, rho);
  if (!(mass > 1e-6)) throw DegenerateEnsemble("ensemble has no kernel mass on the grid");
  for (auto& r : rho) r /= mass;

  LocalMoments out{density_field(grid, std::move(rho), ensemble.t),
                   GridField(grid, std::vector<double>(n, 0.0), FieldKind::flux_velocity, ensemble.t),
                   GridField(grid, std::vector<double>(n, 0.0), FieldKind::momentum_dispersion,
                             ensemble.t),
                   h};
  out.v.mask = out.rho.mask;
  out.sigma_p2.mask = out.rho.mask;
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.rho.valid(i) || !(sums[0][i] > 0.0)) {
      out.v.mask[i] = 0;
      out.sigma_p2.mask[i] = 0;
      continue;
    }
    const double m1 = sums[1][i] / sums[0][i];
    const double m2 = sums[2][i] / sums[0][i];
    out.v.values[i] = (m1 + p_shift) / params.mass();
    out.sigma_p2.values[i] = std::max(0.0, m2 - m1 * m1);
  }
  return out;
}

GridField density_kde(const EnsembleState& ensemble, const Grid1D& grid,
                      std::optional<double> bandwidth) {
  return local_moments(ensemble, grid, PhysicalParams{}, bandwidth).rho;
}

GridField flux_velocity(const EnsembleState& ensemble, const Grid1D& grid,
                        const PhysicalParams& params, std::optional<double> bandwidth) {
  return local_moments(ensemble, grid, params, bandwidth).v;
}

GridField local_momentum_dispersion(const EnsembleState& ensemble, const Grid1D& grid,
                                    std::optional<double> bandwidth) {
  return local_moments(ensemble, grid, PhysicalParams{}, bandwidth).sigma_p2;
}

GridField diffusive_velocity(const GridField& rho, const PhysicalParams& params) {
  const std::size_t n = rho.grid.size();
  const double d = params.diffusion();
  const double inv = 1.0 / (2.0 * rho.grid.spacing());
  GridField u(rho.grid, std::vector<double>(n, 0.0), FieldKind::diffusive_velocity, rho.t);
  u.mask.assign(n, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(rho.valid(i - 1) && rho.valid(i) && rho.valid(i + 1)) || !(rho.values[i] > 0.0)) continue;
    u.values[i] = d * (rho.values[i + 1] - rho.values[i - 1]) * inv / rho.values[i];
    u.mask[i] = 1;
  }
  return u;
}

GridField log_density_curvature(const GridField& rho) {
  GridField log_rho(rho.grid, std::vector<double>(rho.grid.size(), 0.0), FieldKind::scalar, rho.t);
  for (std::size_t i = 0; i < rho.grid.size(); ++i) {
    const bool ok = rho.valid(i) && rho.values[i] > 0.0;
    log_rho.mask[i] = ok ? 1 : 0;
    if (ok) log_rho.values[i] = std::log(rho.values[i]);
  }
  return second_derivative(log_rho);
}

StressPair stress_tensor(const LocalMoments& moments, const PhysicalParams& params) {
  GridField dyn = moments.sigma_p2;
  dyn.kind = FieldKind::stress;
  const double scale = -2.0 / (params.mass() * params.hbar());
  for (auto& v : dyn.values) v *= scale;

  GridField kin = log_density_curvature(moments.rho);
  kin.kind = FieldKind::stress;
  for (auto& v : kin.values) v *= params.diffusion();

  for (std::size_t i = 0; i < dyn.mask.size(); ++i) {
    const std::uint8_t both = dyn.mask[i] && kin.mask[i];
    dyn.mask[i] = both;
    kin.mask[i] = both;
  }
  return {std::move(dyn), std::move(kin)};
}

StressPair stress_tensor(const EnsembleState& ensemble, const GridField& rho, const Grid1D& grid,
                         const PhysicalParams& params, std::optional<double> bandwidth) {
  LocalMoments m = local_moments(ensemble, grid, params, bandwidth);
  require_same_grid(m.rho, rho, "stress_tensor");
  m.rho = rho;
  return stress_tensor(m, params);
}

GridField dispersion_from_density(const GridField& rho, const PhysicalParams& params, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  GridField out = log_density_curvature(rho);
  out.kind = FieldKind::momentum_dispersion;
  const double scale = sign * params.hbar() * params.hbar() / 4.0;
  for (auto& v : out.values) v *= scale;
  return out;
}

double continuity_residual(std::span<const GridField> rho_series, std::span<const GridField> v_series) {
  if (rho_series.size() != v_series.size())
    throw std::invalid_argument("continuity_residual: series lengths differ");
  if (rho_series.size() < 3) throw std::invalid_argument("continuity_residual needs >= 3 slices");
  for (std::size_t k = 0; k < rho_series.size(); ++k) {
    require_same_grid(rho_series[0], rho_series[k], "continuity_residual");
    require_same_grid(rho_series[0], v_series[k], "continuity_residual");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k + 1 < rho_series.size(); ++k) {
    const double dt = rho_series[k + 1].t - rho_series[k - 1].t;
    if (!(dt > 0.0)) throw std::invalid_argument("continuity_residual: slice times must increase");
    const GridField flux = combine(rho_series[k], v_series[k], [](double r, double v) { return r * v; });
    const GridField dflux = derivative(flux);
    for (std::size_t i = 0; i < dflux.values.size(); ++i) {
      if (!dflux.valid(i) || !rho_series[k - 1].valid(i) || !rho_series[k + 1].valid(i)) continue;
      const double drho = (rho_series[k + 1].values[i] - rho_series[k - 1].values[i]) / dt;
      const double r = drho + dflux.values[i];
      num += r * r;
      den += dflux.values[i] * dflux.values[i];
    }
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

RadiativeEstimate radiative_term_estimate(const EnsembleState& ensemble, const Potential& potential,
                                          const PhysicalParams& params, const Grid1D& grid,
                                          std::optional<double> bandwidth) {
  check_ensemble(ensemble);
  const double h = resolve_bandwidth(ensemble, bandwidth);
  const double tau = params.tau();
  const double inv_m = 1.0 / params.mass();
  auto sums = kernel_sums(ensemble.positions, grid, h, 3, [&](std::size_t j, double* w) {
    const double v = ensemble.momenta[j] * inv_m;
    const double fp = force_gradient(potential, params, ensemble.positions[j]);
    w[0] = 1.0;
    w[1] = fp * v;
    w[2] = fp * v * v;
  });
  const std::size_t n = grid.size();
  const double n_samples = static_cast<double>(ensemble.size());
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = sums[0][i] / n_samples;
  const double mass = trapezoid(grid, rho);
  if (!(mass > 1e-6)) throw DegenerateEnsemble("ensemble has no kernel mass on the grid");
  const double scale = tau / (n_samples * mass);

  std::vector<double> force(n), power(n);
  for (std::size_t i = 0; i < n; ++i) {
    force[i] = scale * sums[1][i];
    power[i] = scale * sums[2][i];
  }
  RadiativeEstimate out{GridField(grid, std::move(force), FieldKind::scalar, ensemble.t),
                        GridField(grid, std::move(power), FieldKind::scalar, ensemble.t),
                        std::nullopt};
  if (const auto* ho = potential.get_if<Harmonic>()) {
    const double w0 = ho->omega0;
    const double rate = w0 <= params.cutoff() ? 0.5 * tau * params.hbar() * w0 * w0 * w0 : 0.0;
    std::vector<double> surrogate(n);
    for (std::size_t i = 0; i < n; ++i) surrogate[i] = rate * rho[i] / mass;
    out.diffusive_surrogate = GridField(grid, std::move(surrogate), FieldKind::scalar, ensemble.t);
  }
  return out;
}

double ks_distance(const GridField& a, const GridField& b) {
  require_same_grid(a, b, "ks_distance");
  const std::size_t n = a.grid.size();
  const double ta = trapezoid(a.grid, a.values);
  const double tb = trapezoid(b.grid, b.values);
  if (!(ta > 0.0) || !(tb > 0.0)) throw std::invalid_argument("ks_distance: zero-mass density");
  const double half_h = 0.5 * a.grid.spacing();
  double ca = 0.0, cb = 0.0, d = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    ca += half_h * (a.values[i - 1] + a.values[i]);
    cb += half_h * (b.values[i - 1] + b.values[i]);
    d = std::max(d, std::abs(ca / ta - cb / tb));
  }
  return d;
}

SampleMoments sample_moments(const EnsembleState& e) {
  if (e.size() < 2) throw DegenerateEnsemble("sample_moments needs at least two samples");
  SampleMoments m;
  m.mean_x = mean_of(e.positions);
  m.mean_p = mean_of(e.momenta);
  for (std::size_t i = 0; i < e.size(); ++i) {
    m.var_x += (e.positions[i] - m.mean_x) * (e.positions[i] - m.mean_x);
    m.var_p += (e.momenta[i] - m.mean_p) * (e.momenta[i] - m.mean_p);
  }
  const double n = static_cast<double>(e.size());
  m.var_x /= n - 1.0;
  m.var_p /= n - 1.0;
  return m;
}

}  // namespace sedlab
