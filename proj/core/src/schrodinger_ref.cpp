#include "sedlab/schrodinger_ref.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace sedlab {

SpectralData SpectralData::from_levels(std::vector<double> levels, std::vector<double> dipoles,
                                       double hbar) {
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be > 0");
  SpectralData s;
  s.levels = std::move(levels);
  s.dipoles = std::move(dipoles);
  s.frequencies.resize(s.levels.size());
  for (std::size_t k = 0; k < s.levels.size(); ++k) s.frequencies[k] = (s.levels[k] - s.levels[0]) / hbar;
  s.validate();
  return s;
}

void SpectralData::validate() const {
  if (levels.empty()) throw std::invalid_argument("spectral data is empty");
  if (frequencies.size() != levels.size() || dipoles.size() != levels.size())
    throw std::invalid_argument("spectral data arrays differ in length");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!std::isfinite(levels[k]) || !std::isfinite(frequencies[k]) || !std::isfinite(dipoles[k]))
      throw std::invalid_argument("spectral data contains non-finite values");
    if (levels[k] < levels[0]) throw std::invalid_argument("level 0 is not the lowest");
    if (frequencies[k] < 0.0) throw std::invalid_argument("negative transition frequency");
  }
}

namespace {

constexpr double kNormTolerance = 1e-6;

std::vector<double> potential_on(const Potential& potential, const Grid1D& grid, double mass) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = potential.value(grid.x(i), mass);
  return v;
}

// Solves a constant-coefficient tridiagonal system (off-diagonal c on both
// sides) by the Thomas algorithm with the forward sweep precomputed.
template <class T>
class Tridiagonal {
 public:
  Tridiagonal(std::vector<T> diag, T off) : off_(off), inv_(diag.size()), cprime_(diag.size()) {
    T denom = diag[0];
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (i > 0) denom = diag[i] - off_ * cprime_[i - 1];
      if (std::abs(denom) == 0.0) throw std::runtime_error("singular tridiagonal system");
      inv_[i] = T(1) / denom;
      cprime_[i] = off_ * inv_[i];
    }
  }

  void solve(std::vector<T>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - off_ * rhs[i - 1]) * inv_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cprime_[i] * rhs[i + 1];
  }

 private:
  T off_;
  std::vector<T> inv_;
  std::vector<T> cprime_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double boundary_amplitude_of(std::span<const double> psi) {
  double peak = 0.0;
  for (double v : psi) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  return std::max(std::abs(psi[1]), std::abs(psi[psi.size() - 2])) / peak;
}

Wavefunction to_wavefunction(const Grid1D& grid, std::span<const double> psi) {
  std::vector<std::complex<double>> values(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) values[i] = psi[i];
  return Wavefunction(grid, std::move(values));
}

}  // namespace

double energy_functional(const Wavefunction& psi, const Potential& potential,
                         const PhysicalParams& params) {
  const double n2 = psi.norm_squared();
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << "energy_functional needs a normalized state (norm^2 = " << n2 << ")";
    throw std::invalid_argument(os.str());
  }
  const Grid1D& g = psi.grid;
  const double h = g.spacing();
  const std::size_t n = g.size();
  double kinetic = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) kinetic += std::norm(psi.values[i + 1] - psi.values[i]);
  kinetic *= params.hbar() * params.hbar() / (2.0 * params.mass() * h);
  std::vector<double> vrho(n);
  for (std::size_t i = 0; i < n; ++i) vrho[i] = potential.value(g.x(i), params.mass()) * std::norm(psi.values[i]);
  return kinetic + trapezoid(g, vrho);
}

DiscreteEnergy::DiscreteEnergy(const Potential& potential, const Grid1D& grid,
                               const PhysicalParams& params)
    : grid_(grid), v_(potential_on(potential, grid, params.mass())) {
  const double h = grid.spacing();
  const double t = params.hbar() * params.hbar() / (2.0 * params.mass() * h * h);
  kin_diag_ = 2.0 * t;
  off_ = -t;
}

std::vector<double> DiscreteEnergy::apply(std::span<const double> psi) const {
  const std::size_t n = grid_.size();
  if (psi.size() != n) throw std::invalid_argument("DiscreteEnergy: size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = i > 1 ? psi[i - 1] : 0.0;
    const double right = i + 2 < n ? psi[i + 1] : 0.0;
    out[i] = (kin_diag_ + v_[i]) * psi[i] + off_ * (left + right);
  }
  return out;
}

double DiscreteEnergy::value(std::span<const double> psi) const {
  const std::size_t n = grid_.size();
  if (psi.size() != n) throw std::invalid_argument("DiscreteEnergy: size mismatch");
  const double h = grid_.spacing();
  double kinetic = 0.0, pot = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = i == 0 ? 0.0 : psi[i];
    const double b = i + 2 == n ? 0.0 : psi[i + 1];
    kinetic += (b - a) * (b - a);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) pot += v_[i] * psi[i] * psi[i];
  // -off = hbar^2 / 2m h^2
  return -off_ * h * kinetic + h * pot;
}

std::vector<double> DiscreteEnergy::gradient(std::span<const double> psi) const {
  std::vector<double> g = apply(psi);
  const double s = 2.0 * grid_.spacing();
  for (auto& v : g) v *= s;
  return g;
}

double DiscreteEnergy::norm_squared(std::span<const double> psi) const {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < psi.size(); ++i) s += psi[i] * psi[i];
  return s * grid_.spacing();
}

VariationalResult variational_ground_state(const Potential& potential, const Grid1D& grid,
                                           const PhysicalParams& params, double tol,
                                           const VariationalOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (!potential.confining()) throw std::invalid_argument("variational_ground_state needs a confining potential");
  const DiscreteEnergy energy(potential, grid, params);
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const auto& vpot = energy.potential_values();

  // sigma < min V keeps H - sigma positive definite; the extra
  // hbar^2 pi^2 / 2mL^2 puts it about one box ground energy below the spectrum.
  const double length = grid.x_max() - grid.x_min();
  const double v_min = *std::min_element(vpot.begin() + 1, vpot.end() - 1);
  const double sigma = v_min - params.hbar() * params.hbar() * std::numbers::pi * std::numbers::pi /
                                   (2.0 * params.mass() * length * length);
  std::vector<double> shifted(n - 2);
  for (std::size_t i = 0; i < n - 2; ++i) shifted[i] = energy.diagonal_kinetic() + vpot[i + 1] - sigma;
  const Tridiagonal<double> precond(shifted, energy.off_diagonal());
  const double v_max = *std::max_element(vpot.begin() + 1, vpot.end() - 1);
  const double sd_step = 1.0 / (2.0 * energy.diagonal_kinetic() + std::abs(v_max));

  std::vector<double> psi(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i)
    psi[i] = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  auto normalize = [&](std::vector<double>& f) {
    const double s = 1.0 / std::sqrt(energy.norm_squared(f));
    for (auto& v : f) v *= s;
  };
  normalize(psi);

  VariationalResult result{to_wavefunction(grid, psi), 0.0, 0.0, 0, 0.0, 0.0, {}};
  std::vector<double> r(n), d(n), trial(n);
  for (std::size_t it = 0;; ++it) {
    const std::vector<double> hpsi = energy.apply(psi);
    const double pp = dot(psi, psi);
    const double gamma = dot(psi, hpsi) / pp;
    for (std::size_t i = 0; i < n; ++i) r[i] = hpsi[i] - gamma * psi[i];
    const double grad_norm = std::sqrt(h * dot(r, r) / (h * pp));
    const double e = energy.value(psi);
    result.energy_history.push_back(e);
    result.energy = e;
    result.gamma = gamma;
    result.grad_norm = grad_norm;
    result.iterations = it;
    if (grad_norm < tol) break;
    if (it >= options.max_iterations) {
      result.psi = to_wavefunction(grid, psi);
      result.boundary_amplitude = boundary_amplitude_of(psi);
      std::ostringstream os;
      os << "variational descent did not converge in " << options.max_iterations
         << " iterations (grad_norm = " << grad_norm << ")";
      throw NonConvergence(os.str(), std::move(result));
    }

    double alpha = 1.0;
    if (options.preconditioned) {
      std::vector<double> z(r.begin() + 1, r.end() - 1);
      precond.solve(z);
      d[0] = d[n - 1] = 0.0;
      for (std::size_t i = 0; i < n - 2; ++i) d[i + 1] = -z[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) d[i] = -r[i];
      alpha = sd_step;
    }
    // Rayleigh quotient change along psi + a d, written without cancellation:
    // R(psi + a d) - R(psi) = (2 a d.r + a^2 (d.Hd - gamma d.d)) / |psi + a d|^2.
    const std::vector<double> hd = energy.apply(d);
    const double dr = dot(d, r);
    const double curv = dot(d, hd) - gamma * dot(d, d);
    const double slope = 2.0 * dr / pp;
    double delta = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = psi[i] + alpha * d[i];
      delta = (2.0 * alpha * dr + alpha * alpha * curv) / dot(trial, trial);
      if (delta <= options.armijo * alpha * slope) break;
      alpha *= 0.5;
    }
    if (!(delta <= 0.0)) {
      result.psi = to_wavefunction(grid, psi);
      result.boundary_amplitude = boundary_amplitude_of(psi);
      std::ostringstream os;
      os << "variational descent stalled at grad_norm = " << grad_norm;
      throw NonConvergence(os.str(), std::move(result));
    }
    psi.swap(trial);
    normalize(psi);
  }

  // The minimizer has no node, so fixing the sign is a global flip; abs also
  // clears round-off signs in the far tails.
  for (auto& v : psi) v = std::abs(v);
  result.psi = to_wavefunction(grid, psi);
  result.boundary_amplitude = boundary_amplitude_of(psi);
  return result;
}

Eigenpairs eigenpairs(const Potential& potential, const Grid1D& grid, const PhysicalParams& params,
                      std::size_t k) {
  const std::size_t n = grid.size();
  const std::size_t m = n - 2;
  if (k == 0) throw std::invalid_argument("eigenpairs: K must be >= 1");
  if (k > 20) throw std::invalid_argument("eigenpairs: K must be <= 20");
  if (k >= m / 8) throw std::invalid_argument("eigenpairs: K exceeds what the grid resolves (K < interior/8)");
  const DiscreteEnergy energy(potential, grid, params);
  std::vector<double> diag(m), off(m, energy.off_diagonal());
  for (std::size_t i = 0; i < m; ++i) diag[i] = energy.diagonal_kinetic() + energy.potential_values()[i + 1];

  std::vector<double> w(m), z(m * k);
  std::vector<lapack_int> support(2 * k);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(m), diag.data(),
                                         off.data(), 0.0, 0.0, 1, static_cast<lapack_int>(k), 0.0, &found,
                                         w.data(), z.data(), static_cast<lapack_int>(m), support.data());
  if (info != 0 || static_cast<std::size_t>(found) != k) {
    throw std::runtime_error("eigenpairs: tridiagonal eigensolver failed (info = " + std::to_string(info) + ")");
  }

  const double scale = 1.0 / std::sqrt(grid.spacing());
  Eigenpairs out;
  std::vector<std::vector<double>> states(k, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < k; ++j) {
    auto& s = states[j];
    double peak = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      s[i + 1] = z[j * m + i] * scale;
      peak = std::max(peak, std::abs(s[i + 1]));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(s[i]) > 1e-3 * peak) {
        if (s[i] < 0.0)
          for (auto& v : s) v = -v;
        break;
      }
    }
  }
  std::vector<double> levels(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<double> dipoles(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) s += states[j][i] * grid.x(i) * states[0][i];
    dipoles[j] = s * grid.spacing();
  }
  out.spectrum = SpectralData::from_levels(std::move(levels), std::move(dipoles), params.hbar());
  for (auto& s : states) out.states.push_back(to_wavefunction(grid, s));
  return out;
}

std::vector<Wavefunction> propagate(const Wavefunction& psi, const Potential& potential,
                                    const PhysicalParams& params, double dt, std::size_t steps,
                                    std::size_t record_every) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
  if (record_every == 0) throw std::invalid_argument("propagate: record_every must be >= 1");
  const Grid1D& grid = psi.grid;
  const DiscreteEnergy energy(potential, grid, params);
  const std::size_t n = grid.size();
  const std::size_t m = n - 2;
  using C = std::complex<double>;
  const C ib(0.0, 0.5 * dt / params.hbar());
  std::vector<C> diag(m);
  for (std::size_t i = 0; i < m; ++i) diag[i] = 1.0 + ib * (energy.diagonal_kinetic() + energy.potential_values()[i + 1]);
  const C off = ib * energy.off_diagonal();
  const Tridiagonal<C> lhs(diag, off);

  std::vector<C> cur(m);
  for (std::size_t i = 0; i < m; ++i) cur[i] = psi.values[i + 1];
  auto snapshot = [&] {
    std::vector<C> full(n, C(0.0, 0.0));
    std::copy(cur.begin(), cur.end(), full.begin() + 1);
    return Wavefunction(grid, std::move(full));
  };
  std::vector<Wavefunction> out;
  out.push_back(snapshot());
  std::vector<C> rhs(m);
  for (std::size_t s = 1; s <= steps; ++s) {
    // (1 - i dt H / 2 hbar) psi  with diag' = 2 - diag.
    for (std::size_t i = 0; i < m; ++i) {
      const C left = i > 0 ? cur[i - 1] : C(0.0, 0.0);
      const C right = i + 1 < m ? cur[i + 1] : C(0.0, 0.0);
      rhs[i] = (2.0 - diag[i]) * cur[i] - off * (left + right);
    }
    lhs.solve(rhs);
    cur.swap(rhs);
    if (s % record_every == 0) out.push_back(snapshot());
  }
  return out;
}

Wavefunction gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_packet: sigma must be > 0");
  std::vector<std::complex<double>> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    const double a = (x - x0) / sigma;
    v[i] = std::polar(std::exp(-0.25 * a * a), k0 * x);
  }
  Wavefunction psi(grid, std::move(v));
  psi.normalize();
  return psi;
}

Wavefunction coherent_state(const Grid1D& grid, const PhysicalParams& params, double omega0,
                            double x0, double p0) {
  const double sigma = std::sqrt(params.hbar() / (2.0 * params.mass() * omega0));
  return gaussian_packet(grid, x0, sigma, p0 / params.hbar());
}

double expectation_x(const Wavefunction& psi) {
  std::vector<double> f(psi.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = psi.grid.x(i) * std::norm(psi.values[i]);
  return trapezoid(psi.grid, f) / psi.norm_squared();
}

double expectation_x2(const Wavefunction& psi) {
  std::vector<double> f(psi.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = psi.grid.x(i);
    f[i] = x * x * std::norm(psi.values[i]);
  }
  return trapezoid(psi.grid, f) / psi.norm_squared();
}

}  // namespace sedlab
