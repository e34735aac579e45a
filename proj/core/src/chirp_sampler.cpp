// Bluestein evaluation of a ZPF comb on a uniform time grid.
//
// With w_k = w_s + k dw and t_j = t0 + j dt, write theta = dw dt and use
// k j = (k^2 + j^2 - (j - k)^2) / 2:
//
//   sum_k c_k e^{i w_k t_j}
//     = e^{i w_s t_j} e^{i theta j^2 / 2} sum_k A_k B_{j-k},
//   A_k = c_k e^{i k dw t0} e^{i theta k^2 / 2},  B_m = e^{-i theta m^2 / 2},
//
// and the inner sum is a linear convolution done with one forward and one
// inverse FFT of a smooth length L >= n + J - 1. c_k = w_k (a_k - i b_k).

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sedlab/zpf_field.hpp"

namespace sedlab {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer make_buffer(std::size_t n) {
  auto* p = fftw_alloc_complex(n);
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

std::size_t smooth_size(std::size_t minimum) {
  for (std::size_t n = minimum;; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

// e^{i * scale * k^2} with the phase reduced in extended precision; k^2 times
// the scale reaches 1e6 rad for full-size runs.
std::complex<double> quadratic_phase(long double scale, std::size_t k) {
  const long double kk = static_cast<long double>(k);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double phase = std::fmod(scale * kk * kk, two_pi);
  return std::polar(1.0, static_cast<double>(phase));
}

}  // namespace

struct UniformFieldSampler::Impl {
  std::size_t n_modes = 0;
  std::size_t count = 0;
  std::size_t size = 0;
  double t0 = 0.0;
  double step = 0.0;
  std::vector<std::complex<double>> pre_chirp;   // n_modes
  std::vector<std::complex<double>> post_chirp;  // count
  FftwBuffer kernel;                             // FFT of B, pre-scaled by 1/L
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

UniformFieldSampler::UniformFieldSampler(const ZpfSpectrum& spectrum, double t0, double step,
                                         std::size_t count)
    : impl_(std::make_unique<Impl>()) {
  spectrum.validate();
  if (count == 0) throw std::invalid_argument("UniformFieldSampler: count must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("UniformFieldSampler: step must be > 0");
  auto& s = *impl_;
  s.n_modes = spectrum.n_modes;
  s.count = count;
  s.t0 = t0;
  s.step = step;
  s.size = smooth_size(s.n_modes + count - 1);

  const long double dw = static_cast<long double>(spectrum.spacing());
  const long double half_theta = 0.5L * dw * static_cast<long double>(step);
  const long double w_start = static_cast<long double>(spectrum.omega_min) + 0.5L * dw;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;

  s.pre_chirp.resize(s.n_modes);
  for (std::size_t k = 0; k < s.n_modes; ++k) {
    const long double shift = std::fmod(static_cast<long double>(k) * dw * t0, two_pi);
    s.pre_chirp[k] = quadratic_phase(half_theta, k) * std::polar(1.0, static_cast<double>(shift));
  }
  s.post_chirp.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const long double tj = static_cast<long double>(t0) + static_cast<long double>(j) * step;
    const long double carrier = std::fmod(w_start * tj, two_pi);
    s.post_chirp[j] = quadratic_phase(half_theta, j) * std::polar(1.0, static_cast<double>(carrier));
  }

  s.kernel = make_buffer(s.size);
  auto* kern = reinterpret_cast<std::complex<double>*>(s.kernel.get());
  std::fill(kern, kern + s.size, std::complex<double>(0.0, 0.0));
  for (std::size_t m = 0; m < count; ++m) kern[m] = std::conj(quadratic_phase(half_theta, m));
  for (std::size_t m = 1; m < s.n_modes; ++m) kern[s.size - m] = std::conj(quadratic_phase(half_theta, m));

  {
    std::lock_guard lock(planner_mutex());
    const int n = static_cast<int>(s.size);
    s.forward = fftw_plan_dft_1d(n, s.kernel.get(), s.kernel.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_1d(n, s.kernel.get(), s.kernel.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!s.forward || !s.backward) throw std::runtime_error("FFTW planning failed");
  }
  // ESTIMATE planning leaves the array untouched, so the kernel is still intact.
  fftw_execute_dft(s.forward, s.kernel.get(), s.kernel.get());
  const double inv = 1.0 / static_cast<double>(s.size);
  for (std::size_t i = 0; i < s.size; ++i) kern[i] *= inv;
}

UniformFieldSampler::~UniformFieldSampler() = default;
UniformFieldSampler::UniformFieldSampler(UniformFieldSampler&&) noexcept = default;
UniformFieldSampler& UniformFieldSampler::operator=(UniformFieldSampler&&) noexcept = default;

std::size_t UniformFieldSampler::count() const { return impl_->count; }
double UniformFieldSampler::step() const { return impl_->step; }
double UniformFieldSampler::t0() const { return impl_->t0; }
std::size_t UniformFieldSampler::transform_size() const { return impl_->size; }

std::vector<double> UniformFieldSampler::sample(const FieldRealization& r) const {
  const auto& s = *impl_;
  if (r.size() != s.n_modes) throw std::invalid_argument("UniformFieldSampler: mode count mismatch");
  FftwBuffer buffer = make_buffer(s.size);
  auto* buf = reinterpret_cast<std::complex<double>*>(buffer.get());
  for (std::size_t k = 0; k < s.n_modes; ++k) {
    buf[k] = std::complex<double>(r.weights[k] * r.a[k], -r.weights[k] * r.b[k]) * s.pre_chirp[k];
  }
  std::fill(buf + s.n_modes, buf + s.size, std::complex<double>(0.0, 0.0));
  fftw_execute_dft(s.forward, buffer.get(), buffer.get());
  const auto* kern = reinterpret_cast<const std::complex<double>*>(s.kernel.get());
  for (std::size_t i = 0; i < s.size; ++i) buf[i] *= kern[i];
  fftw_execute_dft(s.backward, buffer.get(), buffer.get());

  std::vector<double> out(s.count);
  for (std::size_t j = 0; j < s.count; ++j) out[j] = (s.post_chirp[j] * buf[j]).real();
  return out;
}

}  // namespace sedlab
