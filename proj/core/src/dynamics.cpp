#include "sedlab/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace sedlab {

EnsembleState pool(std::span<const EnsembleState> snapshots) {
  EnsembleState out;
  std::size_t total = 0;
  for (const auto& s : snapshots) total += s.size();
  out.positions.reserve(total);
  out.momenta.reserve(total);
  double t_sum = 0.0;
  for (const auto& s : snapshots) {
    out.positions.insert(out.positions.end(), s.positions.begin(), s.positions.end());
    out.momenta.insert(out.momenta.end(), s.momenta.begin(), s.momenta.end());
    t_sum += s.t;
  }
  out.t = snapshots.empty() ? 0.0 : t_sum / static_cast<double>(snapshots.size());
  return out;
}

std::size_t IntegrationConfig::steps() const {
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

std::vector<std::string> IntegrationConfig::violations(const ZpfSpectrum& spectrum) const {
  std::vector<std::string> out;
  if (!(dt > 0.0)) out.emplace_back("dt must be > 0");
  if (!(t_end > 0.0)) out.emplace_back("t_end must be > 0");
  if (record_stride == 0) out.emplace_back("record_stride must be >= 1");
  if (n_trajectories == 0) out.emplace_back("n_trajectories must be >= 1");
  if (power_windows == 0) out.emplace_back("power_windows must be >= 1");
  if (dt > 0.0 && dt * spectrum.omega_max() >= 0.5) {
    std::ostringstream os;
    os << "dt·Ω ≥ 0.5 (dt = " << dt << ", Ω = " << spectrum.omega_max()
       << "): the fastest field mode is not resolved";
    out.push_back(os.str());
  }
  if (spectrum.n_modes >= 1 && spectrum.omega_max() > spectrum.omega_min &&
      t_end >= spectrum.recurrence_time()) {
    std::ostringstream os;
    os << "t_end ≥ 2π/Δω (t_end = " << t_end << ", 2π/Δω = " << spectrum.recurrence_time()
       << "): the mode comb recurs inside the run; raise n_modes";
    out.push_back(os.str());
  }
  return out;
}

double rr_force(const PhysicalParams& params, const Potential& potential, double x, double v) {
  return params.tau() * force_gradient(potential, params, x) * v;
}

namespace {

// Potential resolved once per trajectory so the inner loop avoids a visit.
struct HarmonicModel {
  double k;  // m w0^2
  double f(double x) const { return -k * x; }
  double fp(double) const { return -k; }
};
struct QuarticModel {
  double k;
  double f(double x) const { return -4.0 * k * x * x * x; }
  double fp(double x) const { return -12.0 * k * x * x; }
};
struct BoxModel {
  double length;
  void check(double x) const {
    if (!(x >= 0.0 && x <= length)) throw DomainError("trajectory left the box");
  }
  double f(double x) const {
    check(x);
    return 0.0;
  }
  double fp(double x) const {
    check(x);
    return 0.0;
  }
};
struct FreeModel {
  double f(double) const { return 0.0; }
  double fp(double) const { return 0.0; }
};
struct GenericModel {
  const Potential* potential;
  const PhysicalParams* params;
  double f(double x) const { return force(*potential, *params, x); }
  double fp(double x) const { return force_gradient(*potential, *params, x); }
};

template <class Model>
TrajectoryState rk4_step(const TrajectoryState& s, const StepDrive& drive, const Model& model,
                         double inv_mass, double tau, double dt) {
  auto dp = [&](double x, double p, double field) {
    const double v = p * inv_mass;
    return model.f(x) + tau * model.fp(x) * v + field;
  };
  const double h2 = 0.5 * dt;
  const double k1x = s.p * inv_mass;
  const double k1p = dp(s.x, s.p, drive.start);
  const double x2 = s.x + h2 * k1x, p2 = s.p + h2 * k1p;
  const double k2x = p2 * inv_mass;
  const double k2p = dp(x2, p2, drive.mid);
  const double x3 = s.x + h2 * k2x, p3 = s.p + h2 * k2p;
  const double k3x = p3 * inv_mass;
  const double k3p = dp(x3, p3, drive.mid);
  const double x4 = s.x + dt * k3x, p4 = s.p + dt * k3p;
  const double k4x = p4 * inv_mass;
  const double k4p = dp(x4, p4, drive.end);

  TrajectoryState out;
  out.x = s.x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  out.p = s.p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  out.t = s.t + dt;
  if (!std::isfinite(out.x) || !std::isfinite(out.p) || std::abs(out.x) > kDivergenceThreshold ||
      std::abs(out.p) > kDivergenceThreshold) {
    std::ostringstream os;
    os << "trajectory diverged at t = " << out.t << " (x = " << out.x << ", p = " << out.p << ")";
    throw DivergenceError(os.str());
  }
  return out;
}

template <class Fn>
decltype(auto) with_model(const Potential& potential, const PhysicalParams& params, Fn&& fn) {
  if (const auto* h = potential.get_if<Harmonic>())
    return fn(HarmonicModel{params.mass() * h->omega0 * h->omega0});
  if (const auto* q = potential.get_if<Quartic>()) return fn(QuarticModel{q->k});
  if (const auto* b = potential.get_if<Box>()) return fn(BoxModel{b->length});
  return fn(FreeModel{});
}


}  // namespace

TrajectoryState step(const TrajectoryState& state, const StepDrive& drive,
                     const Potential& potential, const PhysicalParams& params, double dt) {
  return rk4_step(state, drive, GenericModel{&potential, &params}, 1.0 / params.mass(),
                  params.tau(), dt);
}

TrajectoryState step(const TrajectoryState& state, const FieldRealization& field,
                     const Potential& potential, const PhysicalParams& params, double dt) {
  const StepDrive drive{force_at(field, state.t), force_at(field, state.t + 0.5 * dt),
                        force_at(field, state.t + dt)};
  return step(state, drive, potential, params, dt);
}

EnsembleRun simulate_ensemble(const InitialDistribution& init, const Potential& potential,
                              const PhysicalParams& params, const ZpfSpectrum& spectrum,
                              const IntegrationConfig& config) {
  spectrum.validate();
  if (auto v = config.violations(spectrum); !v.empty()) {
    std::string msg = "invalid integration config:";
    for (const auto& s : v) msg += "\n  " + s;
    throw std::invalid_argument(msg);
  }
  if (init.kind == InitialDistribution::Kind::gaussian &&
      (init.sigma_x < 0.0 || init.sigma_p < 0.0)) {
    throw std::invalid_argument("gaussian initial widths must be >= 0");
  }

  const std::size_t n_traj = config.n_trajectories;
  const std::size_t n_steps = config.steps();
  const double dt = config.dt;
  const std::size_t stride = config.record_stride;
  const std::size_t n_snap = n_steps / stride + 1;
  const std::size_t n_win = config.power_windows;
  const bool driven = params.tau() > 0.0;

  std::optional<UniformFieldSampler> sampler;
  if (driven) sampler.emplace(spectrum, 0.0, 0.5 * dt, 2 * n_steps + 1);

  std::vector<std::size_t> window_start(n_win + 1);
  for (std::size_t w = 0; w <= n_win; ++w) window_start[w] = w * n_steps / n_win;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> xs(n_snap, std::vector<double>(n_traj, nan));
  std::vector<std::vector<double>> ps(n_snap, std::vector<double>(n_traj, nan));
  std::vector<double> power(n_traj * n_win * 2, 0.0);
  std::vector<char> failed(n_traj, 0);

  const double inv_mass = 1.0 / params.mass();
  const double tau = params.tau();

  auto run_one = [&](std::size_t j) {
    TrajectoryState s{init.x0, init.p0, 0.0};
    if (init.kind == InitialDistribution::Kind::gaussian) {
      std::mt19937_64 rng(derive_seed(config.master_seed ^ 0x696e6974ULL, j));
      std::normal_distribution<double> normal(0.0, 1.0);
      s.x = init.x0 + init.sigma_x * normal(rng);
      s.p = init.p0 + init.sigma_p * normal(rng);
    }
    std::vector<double> field;
    if (driven) field = sampler->sample(sample_realization(spectrum, derive_seed(config.master_seed, j)));
    double* pw = &power[j * n_win * 2];

    try {
      with_model(potential, params, [&](const auto& model) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < n_steps; ++i) {
          if (i % stride == 0) {
            xs[i / stride][j] = s.x;
            ps[i / stride][j] = s.p;
          }
          while (i >= window_start[w + 1]) ++w;
          StepDrive drive;
          if (driven) drive = {field[2 * i], field[2 * i + 1], field[2 * i + 2]};
          const double v = s.p * inv_mass;
          pw[2 * w] += drive.start * v;
          pw[2 * w + 1] += tau * model.fp(s.x) * v * v;
          s = rk4_step(s, drive, model, inv_mass, tau, dt);
        }
        if (n_steps % stride == 0) {
          xs[n_steps / stride][j] = s.x;
          ps[n_steps / stride][j] = s.p;
        }
        return 0;
      });
    } catch (const DivergenceError&) {
      failed[j] = 1;
    } catch (const DomainError&) {
      failed[j] = 1;
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < n_traj; j = next++) run_one(j);
  };
  {
    const unsigned n_threads = std::max(1u, config.threads);
    std::vector<std::jthread> pool_threads;
    for (unsigned i = 1; i < n_threads; ++i) pool_threads.emplace_back(worker);
    worker();
  }

  EnsembleRun run;
  for (std::size_t j = 0; j < n_traj; ++j) {
    if (failed[j]) {
      ++run.failed;
    } else {
      run.trajectory_ids.push_back(j);
    }
  }
  if (static_cast<double>(run.failed) > 1e-3 * static_cast<double>(n_traj)) {
    std::ostringstream os;
    os << run.failed << " of " << n_traj << " trajectories diverged or left the domain";
    throw std::runtime_error(os.str());
  }

  run.snapshots.resize(n_snap);
  for (std::size_t s = 0; s < n_snap; ++s) {
    auto& snap = run.snapshots[s];
    snap.t = static_cast<double>(s * stride) * dt;
    snap.positions.reserve(run.trajectory_ids.size());
    snap.momenta.reserve(run.trajectory_ids.size());
    for (std::size_t j : run.trajectory_ids) {
      snap.positions.push_back(xs[s][j]);
      snap.momenta.push_back(ps[s][j]);
    }
  }

  run.power.resize(n_win);
  const double n_ok = static_cast<double>(run.trajectory_ids.size());
  for (std::size_t w = 0; w < n_win; ++w) {
    double abs_sum = 0.0, diss_sum = 0.0;
    for (std::size_t j : run.trajectory_ids) {
      abs_sum += power[(j * n_win + w) * 2];
      diss_sum += power[(j * n_win + w) * 2 + 1];
    }
    const double count = static_cast<double>(window_start[w + 1] - window_start[w]);
    auto& rec = run.power[w];
    rec.t_begin = static_cast<double>(window_start[w]) * dt;
    rec.t_end = static_cast<double>(window_start[w + 1]) * dt;
    const double denom = n_ok * count;
    rec.absorbed = denom > 0.0 ? abs_sum / denom : 0.0;
    rec.dissipated = denom > 0.0 ? diss_sum / denom : 0.0;
  }
  return run;
}

PowerSummary summarize_power(std::span<const PowerRecord> records) {
  if (records.empty()) throw std::invalid_argument("power_balance: empty window");
  double total = 0.0, abs_sum = 0.0, diss_sum = 0.0;
  for (const auto& r : records) {
    const double w = r.t_end - r.t_begin;
    total += w;
    abs_sum += w * r.absorbed;
    diss_sum += w * r.dissipated;
  }
  if (!(total > 0.0)) throw std::invalid_argument("power_balance: zero-length window");
  PowerSummary s;
  s.absorbed = abs_sum / total;
  s.dissipated = diss_sum / total;
  if (s.absorbed == 0.0) {
    s.ratio = s.dissipated == 0.0 ? 0.0 : (s.dissipated < 0.0 ? -1.0 : 1.0);
  } else {
    s.ratio = (s.absorbed + s.dissipated) / std::abs(s.absorbed);
  }
  return s;
}

double power_balance(std::span<const PowerRecord> records) { return summarize_power(records).ratio; }

std::vector<PowerRecord> records_from(std::span<const PowerRecord> records, double t_from) {
  std::vector<PowerRecord> out;
  for (const auto& r : records) {
    if (r.t_begin >= t_from - 1e-9) out.push_back(r);
  }
  return out;
}

std::vector<EnsembleState> snapshots_from(std::span<const EnsembleState> snapshots, double t_from) {
  std::vector<EnsembleState> out;
  for (const auto& s : snapshots) {
    if (s.t >= t_from - 1e-9) out.push_back(s);
  }
  return out;
}

double mean_energy(const EnsembleState& state, const Potential& potential,
                   const PhysicalParams& params) {
  if (state.size() == 0) throw std::invalid_argument("mean_energy: empty ensemble");
  double e = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    e += 0.5 * state.momenta[i] * state.momenta[i] / params.mass() +
         potential.value(state.positions[i], params.mass());
  }
  return e / static_cast<double>(state.size());
}

}  // namespace sedlab
