#include "sedlab/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sedlab {

namespace {

std::vector<double> summands(const SpectralData& spec) {
  spec.validate();
  std::vector<double> s(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double w = spec.frequencies[k];
    s[k] = (spec.levels[k] - spec.levels[0]) * w * w * w * spec.dipoles[k] * spec.dipoles[k];
  }
  return s;
}

Complex sum(const std::vector<Complex>& v) {
  Complex s(0.0, 0.0);
  for (const auto& z : v) s += z;
  return s;
}

// Antiderivative in y of w^3 eps / (eps^2 + y^2) with w = y + a.
double lorentz_cubic(double y, double a, double eps) {
  const double e2 = eps * eps;
  return eps * (0.5 * y * y + 3.0 * a * y + 0.5 * (3.0 * a * a - e2) * std::log(y * y + e2)) +
         (a * a * a - 3.0 * a * e2) * std::atan(y / eps);
}

}  // namespace

std::vector<Complex> lhs_terms(const SpectralData& spec, Complex beta, const PhysicalParams&) {
  const auto s = summands(spec);
  const Complex c = Complex(0.0, -1.0) * beta;
  std::vector<Complex> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = c * s[k];
  return out;
}

std::vector<Complex> rhs_terms(const SpectralData& spec, Complex beta, const PhysicalParams& params) {
  const auto s = summands(spec);
  const Complex c = params.hbar() * beta * beta;
  std::vector<Complex> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = c * s[k];
  return out;
}

Complex lhs_dissipation(const SpectralData& spec, Complex beta, const PhysicalParams& params) {
  return sum(lhs_terms(spec, beta, params));
}

Complex rhs_diffusion(const SpectralData& spec, Complex beta, const PhysicalParams& params) {
  return sum(rhs_terms(spec, beta, params));
}

BalanceReport solve_beta(const SpectralData& spec, const PhysicalParams& params) {
  const auto s = summands(spec);
  double total = 0.0;
  for (double v : s) total += v;
  if (std::none_of(s.begin(), s.end(), [](double v) { return v != 0.0; }) || total == 0.0)
    throw std::invalid_argument("solve_beta: every summand vanishes (all dipoles zero?)");
  // -i beta S = hbar beta^2 S  =>  beta = -i S / (hbar S)
  BalanceReport r;
  r.beta = Complex(0.0, -total) / (params.hbar() * total);
  r.lhs_terms = lhs_terms(spec, r.beta, params);
  r.rhs_terms = rhs_terms(spec, r.beta, params);
  r.lhs = sum(r.lhs_terms);
  r.rhs = sum(r.rhs_terms);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == 0.0) continue;
    r.ratio_index.push_back(k);
    r.per_frequency_ratios.push_back(r.lhs_terms[k] / r.rhs_terms[k]);
  }
  return r;
}

Complex commutator_check(const Wavefunction& psi, const PhysicalParams& params, double boundary_tolerance) {
  const auto& p = psi.values;
  const std::size_t n = p.size();
  double peak = 0.0;
  for (const auto& z : p) peak = std::max(peak, std::abs(z));
  if (!(peak > 0.0)) throw std::invalid_argument("commutator_check: zero state");
  if (std::max(std::abs(p.front()), std::abs(p.back())) > boundary_tolerance * peak)
    throw std::invalid_argument("commutator_check: state does not decay at the grid ends");
  const double h = psi.grid.spacing();
  const Complex minus_i_hbar(0.0, -params.hbar());
  auto at = [&](std::size_t i) { return i < n ? p[i] : Complex(0.0, 0.0); };
  Complex xp(0.0, 0.0), px(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex left = i > 0 ? p[i - 1] : Complex(0.0, 0.0);
    const double xl = psi.grid.x(i) - h;
    const double xr = psi.grid.x(i) + h;
    const Complex d_psi = (at(i + 1) - left) / (2.0 * h);
    const Complex d_xpsi = (xr * at(i + 1) - xl * left) / (2.0 * h);
    const Complex c = std::conj(p[i]);
    xp += c * psi.grid.x(i) * minus_i_hbar * d_psi;
    px += c * minus_i_hbar * d_xpsi;
  }
  return (xp - px) * h / psi.norm_squared();
}

double classical_response(const Potential& potential, const PhysicalParams& params, double t_lag) {
  const auto* ho = potential.get_if<Harmonic>();
  if (!ho) throw std::invalid_argument("classical_response is closed-form for the harmonic potential only");
  return std::sin(ho->omega0 * t_lag) / (params.mass() * ho->omega0);
}

DampedMemoryCheck damped_memory_check(const SpectralData& spec, double damping_fraction) {
  spec.validate();
  if (!(damping_fraction > 0.0)) throw std::invalid_argument("damping_fraction must be > 0");
  DampedMemoryCheck out;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double wk = spec.frequencies[k];
    if (!(wk > 0.0)) continue;
    const double eps = damping_fraction * wk;
    // near peak: y = w - wk over [-wk, wk]; mirror peak: y = w + wk over [wk, 3 wk]
    const double near = lorentz_cubic(wk, wk, eps) - lorentz_cubic(-wk, wk, eps);
    const double mirror = lorentz_cubic(3.0 * wk, -wk, eps) - lorentz_cubic(wk, -wk, eps);
    const double damped = (near + mirror) / std::numbers::pi;
    const double limit = wk * wk * wk;
    out.frequencies.push_back(wk);
    out.limit.push_back(limit);
    out.damped.push_back(damped);
    out.relative_error.push_back(std::abs(damped - limit) / limit);
    out.max_relative_error = std::max(out.max_relative_error, out.relative_error.back());
  }
  if (out.frequencies.empty()) throw std::invalid_argument("damped_memory_check: no transition with w > 0");
  return out;
}

}  // namespace sedlab
