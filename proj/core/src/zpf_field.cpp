#include "sedlab/zpf_field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace sedlab {

std::string to_string(PhaseMode mode) {
  return mode == PhaseMode::gaussian ? "gaussian" : "random_phase";
}

PhaseMode phase_mode_from_string(const std::string& s) {
  if (s == "gaussian") return PhaseMode::gaussian;
  if (s == "random_phase") return PhaseMode::random_phase;
  throw std::invalid_argument("unknown phase_mode '" + s + "'");
}

double ZpfSpectrum::spacing() const {
  return (omega_max() - omega_min) / static_cast<double>(n_modes);
}

double ZpfSpectrum::density(double omega) const {
  if (omega < omega_min || omega > omega_max()) return 0.0;
  return params.mass() * params.tau() * params.hbar() * omega * omega * omega /
         std::numbers::pi;
}

double ZpfSpectrum::frequency(std::size_t k) const {
  return omega_min + (static_cast<double>(k) + 0.5) * spacing();
}

double ZpfSpectrum::weight(std::size_t k) const {
  return std::sqrt(density(frequency(k)) * spacing());
}

double ZpfSpectrum::recurrence_time() const { return 2.0 * std::numbers::pi / spacing(); }

void ZpfSpectrum::validate() const {
  if (n_modes < 2) throw std::invalid_argument("spectrum needs n_modes >= 2");
  if (!(omega_min >= 0.0)) throw std::invalid_argument("omega_min must be >= 0");
  if (!(omega_max() > omega_min)) throw std::invalid_argument("spectrum needs omega_max > omega_min");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FieldRealization sample_realization(const ZpfSpectrum& spectrum, std::uint64_t seed) {
  spectrum.validate();
  const std::size_t n = spectrum.n_modes;
  FieldRealization r;
  r.frequencies.resize(n);
  r.weights.resize(n);
  r.a.resize(n);
  r.b.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    r.frequencies[k] = spectrum.frequency(k);
    r.weights[k] = spectrum.weight(k);
  }
  std::mt19937_64 rng(seed);
  if (spectrum.phase_mode == PhaseMode::gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      r.a[k] = normal(rng);
      r.b[k] = normal(rng);
    }
  } else {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < n; ++k) {
      const double phi = phase(rng);
      r.a[k] = std::numbers::sqrt2 * std::cos(phi);
      r.b[k] = -std::numbers::sqrt2 * std::sin(phi);
    }
  }
  return r;
}

double force_at(const FieldRealization& r, double t) {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double wt = r.frequencies[k] * t;
    s += r.weights[k] * (r.a[k] * std::cos(wt) + r.b[k] * std::sin(wt));
  }
  return s;
}

namespace {

// integral_0^w y^3 cos(y t) dy as an even power series in t; used where the
// by-parts form cancels badly.
double cubic_cosine_series(double w, double t) {
  const double wt2 = (w * t) * (w * t);
  double term = 1.0;  // (-1)^n (w t)^{2n} / (2n)!
  double sum = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double contrib = term / (2.0 * n + 4.0);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum) && n > 2) break;
    term *= -wt2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
  }
  return sum * w * w * w * w;
}

double cubic_cosine_antiderivative(double w, double t) {
  const double s = std::sin(w * t);
  const double c = std::cos(w * t);
  const double t2 = t * t;
  return w * w * w * s / t + 3.0 * w * w * c / t2 - 6.0 * w * s / (t2 * t) - 6.0 * c / (t2 * t2);
}

// integral_0^w y^3 cos(y t) dy for t > 0.
double cubic_cosine_integral(double w, double t) {
  if (w == 0.0) return 0.0;
  if (w * t < 2.0) return cubic_cosine_series(w, t);
  return cubic_cosine_antiderivative(w, t) - cubic_cosine_antiderivative(0.0, t);
}

}  // namespace

double covariance_analytic(const ZpfSpectrum& spectrum, double t) {
  spectrum.validate();
  const double tt = std::abs(t);
  const double pref = spectrum.params.mass() * spectrum.params.tau() * spectrum.params.hbar() /
                      std::numbers::pi;
  if (pref == 0.0) return 0.0;
  const double upper = spectrum.omega_max();
  const double lower = spectrum.omega_min;
  if (tt == 0.0) {
    return pref * (std::pow(upper, 4) - std::pow(lower, 4)) / 4.0;
  }
  return pref * (cubic_cosine_integral(upper, tt) - cubic_cosine_integral(lower, tt));
}

std::vector<CovarianceEstimate> empirical_covariance(const ZpfSpectrum& spectrum,
                                                     std::size_t n_realizations,
                                                     std::span<const double> lags,
                                                     const CovarianceOptions& options) {
  spectrum.validate();
  if (n_realizations < 100) throw std::invalid_argument("empirical_covariance needs >= 100 realizations");
  if (options.window_points == 0) throw std::invalid_argument("window_points must be > 0");
  const std::size_t n_lags = lags.size();
  const std::size_t n_win = options.window_points;
  const std::size_t n_modes = spectrum.n_modes;

  // Every realization shares the comb, so cos/sin tables over the distinct
  // evaluation times are built once.
  std::vector<double> times;
  times.reserve(n_win * (n_lags + 1));
  for (std::size_t i = 0; i < n_win; ++i) {
    const double t0 = options.window_start + options.window_spacing * static_cast<double>(i);
    times.push_back(t0);
    for (double lag : lags) times.push_back(t0 + lag);
  }
  const std::size_t n_times = times.size();
  std::vector<double> cos_table(n_times * n_modes), sin_table(n_times * n_modes);
  std::vector<double> freq(n_modes), weight(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    freq[k] = spectrum.frequency(k);
    weight[k] = spectrum.weight(k);
  }
  for (std::size_t j = 0; j < n_times; ++j) {
    for (std::size_t k = 0; k < n_modes; ++k) {
      cos_table[j * n_modes + k] = weight[k] * std::cos(freq[k] * times[j]);
      sin_table[j * n_modes + k] = weight[k] * std::sin(freq[k] * times[j]);
    }
  }

  // per_realization[r * n_lags + l]: window average of F(t_i) F(t_i + lag_l).
  std::vector<double> per_realization(n_realizations * n_lags, 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<double> f(n_times);
    for (std::size_t r = next++; r < n_realizations; r = next++) {
      const FieldRealization real = sample_realization(spectrum, derive_seed(options.master_seed, r));
      for (std::size_t j = 0; j < n_times; ++j) {
        const double* c = &cos_table[j * n_modes];
        const double* s = &sin_table[j * n_modes];
        double acc = 0.0;
        for (std::size_t k = 0; k < n_modes; ++k) acc += real.a[k] * c[k] + real.b[k] * s[k];
        f[j] = acc;
      }
      for (std::size_t l = 0; l < n_lags; ++l) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_win; ++i) {
          const std::size_t base = i * (n_lags + 1);
          acc += f[base] * f[base + 1 + l];
        }
        per_realization[r * n_lags + l] = acc / static_cast<double>(n_win);
      }
    }
  };
  const unsigned n_threads = std::max(1u, options.threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }

  std::vector<CovarianceEstimate> out(n_lags);
  const double n = static_cast<double>(n_realizations);
  for (std::size_t l = 0; l < n_lags; ++l) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n_realizations; ++r) mean += per_realization[r * n_lags + l];
    mean /= n;
    double var = 0.0;
    for (std::size_t r = 0; r < n_realizations; ++r) {
      const double d = per_realization[r * n_lags + l] - mean;
      var += d * d;
    }
    var /= (n - 1.0);
    out[l].lag = lags[l];
    out[l].analytic = covariance_analytic(spectrum, lags[l]);
    out[l].empirical = mean;
    out[l].standard_error = std::sqrt(var / n);
  }
  return out;
}

}  // namespace sedlab
