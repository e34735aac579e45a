#include "sedlab/experiment.hpp"

#include <fftw3.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sedlab/balance.hpp"
#include "sedlab/ensemble_stats.hpp"
#include "sedlab/report_io.hpp"
#include "sedlab/schrodinger_ref.hpp"
#include "sedlab/sqm_hydro.hpp"

namespace sedlab {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---- config parsing -------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
      errors_.push_back(path + ": expected an object");
      return;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
        errors_.push_back(path + "." + it.key() + ": unknown key");
    }
  }

  void number(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const auto& v = obj[key];
    if (!v.is_number()) {
      errors_.push_back(path + "." + key + ": expected a number");
      return;
    }
    out = v.get<double>();
  }

  template <class Int>
  void integer(const json& obj, const std::string& path, const char* key, Int& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const auto& v = obj[key];
    if (v.is_number_unsigned()) {
      out = static_cast<Int>(v.get<std::uint64_t>());
    } else if (v.is_number_integer()) {
      errors_.push_back(path + "." + key + ": must be >= 0");
    } else {
      errors_.push_back(path + "." + key + ": expected a non-negative integer");
    }
  }

  void string(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const auto& v = obj[key];
    if (!v.is_string()) {
      errors_.push_back(path + "." + key + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& errors_;
};

json potential_json(const Potential& p) {
  json j;
  j["kind"] = p.name();
  if (const auto* h = p.get_if<Harmonic>()) j["omega0"] = h->omega0;
  if (const auto* q = p.get_if<Quartic>()) j["k"] = q->k;
  if (const auto* b = p.get_if<Box>()) j["length"] = b->length;
  return j;
}

json init_json(const InitialDistribution& d) {
  json j;
  j["kind"] = d.kind == InitialDistribution::Kind::point ? "point" : "gaussian";
  j["x0"] = d.x0;
  j["p0"] = d.p0;
  if (d.kind == InitialDistribution::Kind::gaussian) {
    j["sigma_x"] = d.sigma_x;
    j["sigma_p"] = d.sigma_p;
  }
  return j;
}

// ---- run helpers ----------------------------------------------------------

class Run {
 public:
  Run(const ExperimentConfig& cfg, Manifest& manifest) : cfg_(cfg), manifest_(manifest) {}

  void write(const std::string& name, const std::string& content) {
    write_text(cfg_.output_dir / name, content);
    manifest_.outputs.push_back({name, sha256_hex(content), content.size()});
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  /// |value - target| <= tolerance
  bool within(const std::string& name, double value, double target, double tolerance, std::string detail = {}) {
    const bool ok = std::isfinite(value) && std::abs(value - target) <= tolerance;
    manifest_.checks.push_back({name, value, target, tolerance, ok, std::move(detail)});
    return ok;
  }

  /// value < bound
  bool below(const std::string& name, double value, double bound, std::string detail = {}) {
    const bool ok = std::isfinite(value) && value < bound;
    manifest_.checks.push_back({name, value, 0.0, bound, ok, std::move(detail)});
    return ok;
  }

  /// value > bound
  bool above(const std::string& name, double value, double bound, std::string detail = {}) {
    const bool ok = std::isfinite(value) && value > bound;
    manifest_.checks.push_back({name, value, bound, 0.0, ok, std::move(detail)});
    return ok;
  }

  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  const ExperimentConfig& cfg_;
  Manifest& manifest_;
};

double harmonic_omega(const Potential& p) {
  const auto* h = p.get_if<Harmonic>();
  return h ? h->omega0 : 0.0;
}

std::string wavefunction_csv(const Wavefunction& psi) {
  CsvTable t({"x", "re", "im", "density"});
  for (std::size_t i = 0; i < psi.grid.size(); ++i) {
    t.add_row({psi.grid.x(i), psi.values[i].real(), psi.values[i].imag(), std::norm(psi.values[i])});
  }
  return t.text();
}

std::string spectrum_csv(const SpectralData& s) {
  CsvTable t({"k", "level", "frequency", "dipole"});
  for (std::size_t k = 0; k < s.size(); ++k)
    t.add_row({static_cast<double>(k), s.levels[k], s.frequencies[k], s.dipoles[k]});
  return t.text();
}

std::string power_csv(const std::vector<PowerRecord>& records) {
  CsvTable t({"t_begin", "t_end", "absorbed", "dissipated"});
  for (const auto& r : records) t.add_row({r.t_begin, r.t_end, r.absorbed, r.dissipated});
  return t.text();
}

// ---- covariance -------------------------------------------------------------

void run_covariance(Run& run) {
  const auto& cfg = run.cfg();
  const ZpfSpectrum spectrum{cfg.params, cfg.covariance.n_modes, cfg.spectrum.omega_min, cfg.spectrum.phase_mode};
  CovarianceOptions opt;
  opt.master_seed = cfg.master_seed;
  opt.window_points = cfg.covariance.window_points;
  opt.window_start = cfg.covariance.window_start;
  opt.window_spacing = cfg.covariance.window_spacing;
  opt.threads = cfg.threads;
  const auto est = empirical_covariance(spectrum, cfg.covariance.n_realizations, cfg.covariance.lags, opt);

  CsvTable t({"lag", "analytic", "empirical", "stderr"});
  json rows = json::array();
  for (const auto& e : est) {
    t.add_row({e.lag, e.analytic, e.empirical, e.standard_error});
    rows.push_back({{"lag", e.lag}, {"analytic", e.analytic}, {"empirical", e.empirical}, {"stderr", e.standard_error}});
    run.within("covariance_lag_" + format_double(e.lag), e.empirical, e.analytic, 3.0 * e.standard_error,
               "empirical within 3 standard errors of the closed form");
  }
  run.write("covariance.csv", t.text());
  json summary;
  summary["n_realizations"] = cfg.covariance.n_realizations;
  summary["n_modes"] = cfg.covariance.n_modes;
  summary["variance_closed_form"] = covariance_analytic(spectrum, 0.0);
  summary["lags"] = rows;
  run.write_json("covariance.json", summary);
}

// ---- ensemble ---------------------------------------------------------------

struct RelaxFit {
  double time_constant = 0.0;
  double plateau = 0.0;
  double amplitude = 0.0;
  double rms = 0.0;
};

// E(t) = plateau - amplitude * exp(-t / T): scan T on a log grid, linear least
// squares for the other two.
RelaxFit fit_relaxation(const std::vector<double>& t, const std::vector<double>& e, double t_guess) {
  RelaxFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  const std::size_t n = t.size();
  for (int s = 0; s <= 600; ++s) {
    const double tc = t_guess * std::pow(10.0, -1.0 + 2.0 * s / 600.0);
    double s1 = 0, sg = 0, sgg = 0, se = 0, sge = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = std::exp(-t[i] / tc);
      s1 += 1;
      sg += g;
      sgg += g * g;
      se += e[i];
      sge += g * e[i];
    }
    const double det = s1 * sgg - sg * sg;
    if (std::abs(det) < 1e-300) continue;
    const double c = (se * sgg - sg * sge) / det;   // plateau
    const double b = (s1 * sge - sg * se) / det;    // coefficient of g
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = e[i] - (c + b * std::exp(-t[i] / tc));
      sse += r * r;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best = {tc, c, -b, std::sqrt(sse / static_cast<double>(n))};
    }
  }
  return best;
}

void run_relax(Run& run) {
  const auto& cfg = run.cfg();
  const auto ens = simulate_ensemble(cfg.init, cfg.potential, cfg.params, cfg.zpf_spectrum(), cfg.integration_config());

  CsvTable t({"t", "mean_energy", "mean_x", "var_x", "mean_p", "var_p"});
  std::vector<double> ts, es;
  for (const auto& s : ens.snapshots) {
    const double e = mean_energy(s, cfg.potential, cfg.params);
    SampleMoments m;
    if (s.size() >= 2) m = sample_moments(s);
    t.add_row({s.t, e, m.mean_x, m.var_x, m.mean_p, m.var_p});
    ts.push_back(s.t);
    es.push_back(e);
  }
  run.write("energy_series.csv", t.text());
  run.write("power.csv", power_csv(ens.power));

  json summary;
  summary["trajectories"] = ens.trajectory_ids.size();
  summary["failed"] = ens.failed;
  const double w0 = harmonic_omega(cfg.potential);
  if (w0 > 0.0 && cfg.params.tau() > 0.0) {
    const double expected = 1.0 / (cfg.params.tau() * w0 * w0);
    const RelaxFit fit = fit_relaxation(ts, es, expected);
    summary["fit"] = {{"time_constant", fit.time_constant},
                      {"plateau", fit.plateau},
                      {"amplitude", fit.amplitude},
                      {"rms", fit.rms},
                      {"expected_time_constant", expected}};
    run.within("relaxation_time_ratio", fit.time_constant / expected, 1.0, 0.2,
               "fitted energy relaxation time over 1/(tau w0^2)");
  }

  // Continuity on consecutive snapshots; reported, not gated (Monte Carlo noise).
  std::vector<GridField> rhos, vs;
  for (const auto& s : ens.snapshots) {
    try {
      const LocalMoments m = local_moments(s, cfg.grid, cfg.params);
      rhos.push_back(m.rho);
      vs.push_back(m.v);
    } catch (const DegenerateEnsemble&) {
    }
  }
  if (rhos.size() >= 3) summary["continuity_residual"] = continuity_residual(rhos, vs);
  const auto stationary = records_from(ens.power, cfg.transient_fraction * cfg.integration.t_end);
  if (!stationary.empty()) {
    const auto p = summarize_power(stationary);
    summary["power"] = {{"absorbed", p.absorbed}, {"dissipated", p.dissipated}, {"ratio", p.ratio}};
  }
  run.write_json("relax.json", summary);
}

struct Reference {
  double x2 = 0.0;
  double energy = 0.0;
  double sigma_p2 = 0.0;
  double dissipated = 0.0;
  bool analytic = false;
};

void run_stats(Run& run, bool compare) {
  const auto& cfg = run.cfg();
  const auto& params = cfg.params;
  const auto ens = simulate_ensemble(cfg.init, cfg.potential, params, cfg.zpf_spectrum(), cfg.integration_config());
  const double t_cut = cfg.transient_fraction * cfg.integration.t_end;
  const auto window = snapshots_from(ens.snapshots, t_cut);
  const EnsembleState pooled = pool(window);
  const SampleMoments sm = sample_moments(pooled);
  const double energy = mean_energy(pooled, cfg.potential, params);

  const LocalMoments mom = local_moments(pooled, cfg.grid, params);
  const GridField u = diffusive_velocity(mom.rho, params);
  // (ln rho)'' needs a wider kernel than rho itself.
  const double curv_bw = curvature_bandwidth(pooled.positions);
  LocalMoments curv = mom;
  curv.rho = density_kde(pooled, cfg.grid, curv_bw);
  const StressPair stress = stress_tensor(curv, params);
  const GridField disp_neg = dispersion_from_density(curv.rho, params, -1);
  const GridField disp_pos = dispersion_from_density(curv.rho, params, +1);
  const RadiativeEstimate rad = radiative_term_estimate(pooled, cfg.potential, params, cfg.grid);

  VariationalOptions vopt;
  vopt.max_iterations = cfg.solver.max_iterations;
  const VariationalResult ground = variational_ground_state(cfg.potential, cfg.grid, params, cfg.solver.tol, vopt);
  const GridField rho0 = density_field(cfg.grid, ground.psi.density());
  const HydroFields fields0 = wavefunction_to_fields(ground.psi, params);

  // Targets: closed forms for the oscillator, the grid ground state otherwise.
  const double w0 = harmonic_omega(cfg.potential);
  Reference ref;
  if (w0 > 0.0) {
    ref = {params.hbar() / (2.0 * params.mass() * w0), 0.5 * params.hbar() * w0,
           0.5 * params.mass() * params.hbar() * w0, 0.5 * params.tau() * params.hbar() * w0 * w0 * w0, true};
  } else {
    ref.x2 = expectation_x2(ground.psi) - std::pow(expectation_x(ground.psi), 2);
    ref.energy = ground.energy;
  }
  const double sigma = std::sqrt(ref.x2);
  const double lo = -2.0 * sigma + sm.mean_x, hi = 2.0 * sigma + sm.mean_x;

  run.within("sigma_x2", sm.var_x, ref.x2, 0.05 * ref.x2, "stationary <x^2> vs quantum ground state, 5%");
  run.within("mean_energy", energy, ref.energy, 0.05 * ref.energy, "stationary <p^2/2m + V> vs E0, 5%");
  const double ks = ks_distance(mom.rho, rho0);
  run.below("ks_distance", ks, 0.02, "KS distance between rho-hat and |psi0|^2");

  // u = D (ln rho)' by construction.
  {
    GridField log_rho(cfg.grid, std::vector<double>(cfg.grid.size(), 0.0));
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
      log_rho.mask[i] = mom.rho.valid(i) ? 1 : 0;
      if (mom.rho.valid(i)) log_rho.values[i] = std::log(mom.rho.values[i]);
    }
    GridField dlog = derivative(log_rho);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
      const double x = cfg.grid.x(i);
      if (x < lo || x > hi || !u.valid(i) || !dlog.valid(i)) continue;
      // ratio form vs log form differ only at O(h^2)
      worst = std::max(worst, std::abs(u.values[i] - params.diffusion() * dlog.values[i]));
      scale = std::max(scale, std::abs(u.values[i]));
    }
    run.below("u_log_derivative_consistency", worst / scale, 1e-3,
              "max |u - D (ln rho)'| / max |u| on |x| < 2 sigma (difference schemes agree to O(h^2))");
  }
  if (w0 > 0.0) {
    const double rms = rms_deviation(u, [&](double x) { return -w0 * x; }, lo, hi);
    const double umax = max_abs(u, lo, hi);
    run.below("u_vs_ground_state", rms / umax, 0.10, "RMS(u + w0 x) / max|u| on |x| < 2 sigma");
  } else {
    const double rms = rms_deviation(u, [&](double x) {
      const auto i = static_cast<std::size_t>(std::llround((x - cfg.grid.x_min()) / cfg.grid.spacing()));
      return fields0.u.values[i];
    }, lo, hi);
    run.below("u_vs_ground_state", rms / max_abs(u, lo, hi), 0.10, "RMS(u - u0) / max|u| on |x| < 2 sigma");
  }
  {
    const double vmax = max_abs(mom.v, lo, hi);
    const double bound = w0 > 0.0 ? 0.05 * w0 * sigma : 0.05 * std::sqrt(sm.var_p) / params.mass();
    run.below("flux_velocity_zero", vmax, bound, "max |v| on |x| < 2 sigma vs 0.05 w0 sigma_x");
  }
  {
    double worst_ref = 0.0, num = 0.0, den = 0.0;
    std::size_t count = 0;
    const double target = ref.analytic ? ref.sigma_p2 : sm.var_p;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
      const double x = cfg.grid.x(i);
      if (x < lo || x > hi || !mom.sigma_p2.valid(i)) continue;
      worst_ref = std::max(worst_ref, std::abs(mom.sigma_p2.values[i] - target) / target);
      if (!disp_neg.valid(i)) continue;
      const double d = mom.sigma_p2.values[i] - disp_neg.values[i];
      num += d * d;
      den += std::abs(disp_neg.values[i]);
      ++count;
    }
    const double rel = count ? std::sqrt(num / count) / (den / count) : std::numeric_limits<double>::quiet_NaN();
    if (ref.analytic)
      run.below("sigma_p2_vs_ground_state", worst_ref, 0.10, "max relative |sigma_p^2(x) - m hbar w0 / 2| on |x| < 2 sigma");
    run.below("sigma_p2_vs_log_curvature", rel, 0.10,
              "RMS(sigma_p^2 + (hbar^2/4)(ln rho)'') / mean|(hbar^2/4)(ln rho)''| on |x| < 2 sigma");
  }
  {
    double num = 0.0, den = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
      const double x = cfg.grid.x(i);
      if (x < lo || x > hi || !stress.dynamic.valid(i)) continue;
      const double d = stress.dynamic.values[i] - stress.kinetic.values[i];
      num += d * d;
      den += std::abs(stress.kinetic.values[i]);
      ++count;
    }
    const double rel = count ? std::sqrt(num / count) / (den / count) : std::numeric_limits<double>::quiet_NaN();
    run.below("stress_dynamic_vs_kinetic", rel, 0.15, "RMS(T_dyn - T_kin) / mean|T_kin| on |x| < 2 sigma");
  }

  const auto power_window = records_from(ens.power, 0.5 * cfg.integration.t_end);
  const PowerSummary power = summarize_power(power_window);
  run.below("power_balance_ratio", std::abs(power.ratio), 0.05, "|P_abs + P_diss| / |P_abs| over the second half");
  if (ref.analytic)
    run.within("dissipated_power", std::abs(power.dissipated), ref.dissipated, 0.10 * ref.dissipated,
               "|P_diss| vs tau hbar w0^3 / 2, 10%");
  const auto snap_window_power = summarize_power(records_from(ens.power, t_cut));
  const double rad_integral = trapezoid(cfg.grid, rad.power_density.values);
  run.within("radiative_term_power", rad_integral, snap_window_power.dissipated,
             0.15 * std::abs(snap_window_power.dissipated),
             "integral of the radiative power density vs P_diss over the same window");

  // Outputs.
  run.write("density.csv", field_csv(mom.rho));
  run.write("flux_velocity.csv", field_csv(mom.v));
  run.write("diffusive_velocity.csv", field_csv(u));
  run.write("momentum_dispersion.csv", field_csv(mom.sigma_p2));
  run.write("stress_dynamic.csv", field_csv(stress.dynamic));
  run.write("stress_kinetic.csv", field_csv(stress.kinetic));
  run.write("dispersion_from_density_negative.csv", field_csv(disp_neg));
  run.write("dispersion_from_density_positive.csv", field_csv(disp_pos));
  run.write("radiative_power_density.csv", field_csv(rad.power_density));
  run.write("radiative_force_density.csv", field_csv(rad.force_density));
  if (rad.diffusive_surrogate) run.write("diffusive_surrogate.csv", field_csv(*rad.diffusive_surrogate));
  run.write("ground_state_density.csv", field_csv(rho0));
  run.write("power.csv", power_csv(ens.power));

  json summary;
  summary["trajectories"] = ens.trajectory_ids.size();
  summary["failed"] = ens.failed;
  summary["pooled_samples"] = pooled.size();
  summary["window_start"] = t_cut;
  summary["bandwidth"] = mom.bandwidth;
  summary["curvature_bandwidth"] = curv_bw;
  summary["sigma_x2"] = {{"measured", sm.var_x}, {"target", ref.x2}};
  summary["energy"] = {{"measured", energy}, {"target", ref.energy}};
  summary["var_p"] = sm.var_p;
  summary["ks_distance"] = ks;
  summary["power"] = {{"absorbed", power.absorbed}, {"dissipated", power.dissipated}, {"ratio", power.ratio}};
  summary["radiative_power_integral"] = rad_integral;
  if (rad.diffusive_surrogate)
    summary["diffusive_surrogate_integral"] = trapezoid(cfg.grid, rad.diffusive_surrogate->values);
  summary["ground_state_energy"] = ground.energy;

  if (compare) {
    const HydroFields fields{mom.rho, mom.v, u, pooled.t};
    const Wavefunction psi_hat = fields_to_wavefunction(fields, params);
    const double overlap = std::norm(inner_product(psi_hat, ground.psi));
    run.above("overlap_with_ground_state", overlap, 0.99, "|<psi-hat|psi0>|^2 from the ensemble fields");
    summary["overlap"] = overlap;
    run.write("reconstructed_wavefunction.csv", wavefunction_csv(psi_hat));
  }
  run.write_json(compare ? "compare.json" : "stats.json", summary);
}

// ---- hydro ------------------------------------------------------------------

void run_hydro(Run& run) {
  const auto& cfg = run.cfg();
  const auto& params = cfg.params;
  const auto& hs = cfg.hydro;
  const double w0 = harmonic_omega(cfg.potential);
  const Grid1D grid(hs.x_min, hs.x_max, hs.n_points);
  const Wavefunction psi0 = coherent_state(grid, params, w0, hs.x0, hs.p0);
  const auto series = propagate(psi0, cfg.potential, params, hs.dt, hs.steps, 1);

  std::vector<HydroFields> fields;
  fields.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k)
    fields.push_back(wavefunction_to_fields(series[k], params, static_cast<double>(k) * hs.dt));

  const SqmResidual quantum = sqm_residual(fields, cfg.potential, params, SqmParams::quantum(params));
  SqmParams flipped = SqmParams::quantum(params);
  flipped.lambda = -1;
  const SqmResidual brownian = sqm_residual(fields, cfg.potential, params, flipped);
  const double cres = complex_residual(fields, cfg.potential, params);
  run.below("sqm_first_residual", quantum.first, 1e-2, "lambda = +1, m(D_c v - D_s u) - f");
  run.below("sqm_second_residual", quantum.second, 1e-2, "lambda = +1, m(D_c u + D_s v)");
  run.above("sqm_first_residual_flipped", brownian.first, 0.5, "lambda = -1 must not fit quantum data");
  run.below("complex_residual", cres, 1e-2, "complex form of the first equation");

  // -i hbar psi' = m w psi on a moving packet, refined.
  const double sigma = std::sqrt(params.hbar() / (2.0 * params.mass() * w0));
  const double k0 = (hs.p0 != 0.0 ? hs.p0 : params.mass() * w0 * sigma) / params.hbar();
  CsvTable conv({"n_points", "h", "error_order4", "error_order2"});
  std::vector<double> hs_list, err4, err2;
  for (std::size_t n : {256u, 512u, 1024u, 2048u}) {
    const Grid1D g(hs.x_min, hs.x_max, n);
    const Wavefunction packet = gaussian_packet(g, hs.x0, sigma, k0);
    const double e4 = momentum_operator_check(packet, params, 4);
    const double e2 = momentum_operator_check(packet, params, 2);
    conv.add_row({static_cast<double>(n), g.spacing(), e4, e2});
    hs_list.push_back(g.spacing());
    err4.push_back(e4);
    err2.push_back(e2);
  }
  double min_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < err4.size(); ++i)
    min_order = std::min(min_order, std::log(err4[i] / err4[i + 1]) / std::log(hs_list[i] / hs_list[i + 1]));
  run.below("momentum_identity_error", err4.back(), 1e-6, "max relative error at the finest grid");
  run.above("momentum_identity_order", min_order, 1.8, "observed convergence order on halving h (at least 2)");

  // Kinetic split with a low floor so the tails are kept.
  const HydroFields start = wavefunction_to_fields(series.front(), params, 0.0, 1e-12);
  const HydroFields end = wavefunction_to_fields(series.back(), params, series.size() - 1.0, 1e-12);
  const KineticSplit ks0 = kinetic_energy_split(start, params);
  const KineticSplit ks1 = kinetic_energy_split(end, params);
  run.within("kinetic_split_total", ks1.total, ks1.from_wavefunction, 1e-3 * ks1.from_wavefunction,
             "T_v + T_u vs (hbar^2/2m) integral |psi'|^2");

  run.write("momentum_identity.csv", conv.text());
  run.write("final_state.csv", wavefunction_csv(series.back()));
  json summary;
  summary["residual_lambda_plus"] = {{"first", quantum.first}, {"second", quantum.second}};
  summary["residual_lambda_minus"] = {{"first", brownian.first}, {"second", brownian.second}};
  summary["complex_residual"] = cres;
  summary["momentum_identity_order"] = min_order;
  summary["kinetic_split_start"] = {{"t_v", ks0.t_v}, {"t_u", ks0.t_u}, {"total", ks0.total}, {"psi_form", ks0.from_wavefunction}};
  summary["kinetic_split_end"] = {{"t_v", ks1.t_v}, {"t_u", ks1.t_u}, {"total", ks1.total}, {"psi_form", ks1.from_wavefunction}};
  summary["mean_x_end"] = expectation_x(series.back());
  run.write_json("hydro.json", summary);
}

// ---- solve ------------------------------------------------------------------

double analytic_ground_energy(const Potential& p, const PhysicalParams& params, bool& known) {
  known = true;
  if (const auto* h = p.get_if<Harmonic>()) return 0.5 * params.hbar() * h->omega0;
  if (const auto* b = p.get_if<Box>())
    return params.hbar() * params.hbar() * std::numbers::pi * std::numbers::pi /
           (2.0 * params.mass() * b->length * b->length);
  known = false;
  return 0.0;
}

void run_solve(Run& run) {
  const auto& cfg = run.cfg();
  const auto& params = cfg.params;
  VariationalOptions opt;
  opt.max_iterations = cfg.solver.max_iterations;
  const VariationalResult res = variational_ground_state(cfg.potential, cfg.grid, params, cfg.solver.tol, opt);
  const Eigenpairs eig = eigenpairs(cfg.potential, cfg.grid, params, cfg.solver.n_eigen);

  bool known = false;
  const double exact = analytic_ground_energy(cfg.potential, params, known);
  if (cfg.potential.get_if<Harmonic>()) run.within("ground_energy", res.energy, exact, 1e-4, "vs hbar w0 / 2");
  if (cfg.potential.get_if<Box>()) run.within("ground_energy", res.energy, exact, 5e-3, "vs pi^2 hbar^2 / 2 m L^2");
  run.within("ground_energy_vs_eigensolver", res.energy, eig.spectrum.levels[0], 1e-3,
             "variational descent vs tridiagonal eigensolver");
  run.within("multiplier_matches_energy", res.gamma, res.energy, 10.0 * cfg.solver.tol, "gamma vs energy at convergence");

  bool monotone = true;
  for (std::size_t i = 1; i < res.energy_history.size(); ++i) {
    if (res.energy_history[i] > res.energy_history[i - 1] + 1e-13 * std::abs(res.energy_history[i - 1])) monotone = false;
  }
  run.within("monotone_descent", monotone ? 1.0 : 0.0, 1.0, 0.0, "energy never increases (to round-off)");

  // Gradient vs central differences along random directions.
  const DiscreteEnergy energy(cfg.potential, cfg.grid, params);
  std::vector<double> psi(cfg.grid.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = res.psi.values[i].real();
  psi.front() = psi.back() = 0.0;
  std::mt19937_64 rng(cfg.master_seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> dir(psi.size(), 0.0), plus(psi), minus(psi);
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) dir[i] = normal(rng);
    // a perturbed base point, so the gradient is not just gamma psi
    std::vector<double> base(psi);
    for (std::size_t i = 1; i + 1 < psi.size(); ++i) base[i] += 0.1 * normal(rng) * std::abs(psi[i]);
    const double eps = 1e-3;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      plus[i] = base[i] + eps * dir[i];
      minus[i] = base[i] - eps * dir[i];
    }
    const double fd = (energy.value(plus) - energy.value(minus)) / (2.0 * eps);
    const auto g = energy.gradient(base);
    double an = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) an += g[i] * dir[i];
    worst = std::max(worst, std::abs(fd - an) / std::abs(an));
  }
  run.below("gradient_check", worst, 1e-6, "analytic gradient vs central differences, relative");
  if (!cfg.potential.get_if<Box>())
    run.below("boundary_amplitude", res.boundary_amplitude, 1e-8, "domain padding adequate");

  run.write("ground_state.csv", wavefunction_csv(res.psi));
  run.write("spectrum.csv", spectrum_csv(eig.spectrum));
  json conv;
  conv["potential"] = potential_json(cfg.potential);
  conv["energy"] = res.energy;
  conv["gamma"] = res.gamma;
  conv["iterations"] = res.iterations;
  conv["grad_norm"] = res.grad_norm;
  conv["boundary_amplitude"] = res.boundary_amplitude;
  conv["eigensolver_ground_energy"] = eig.spectrum.levels[0];
  if (known) conv["analytic_ground_energy"] = exact;
  conv["energy_history"] = res.energy_history;
  run.write_json("convergence.json", conv);
}

// ---- balance ----------------------------------------------------------------

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

void run_balance(Run& run) {
  const auto& cfg = run.cfg();
  const auto& params = cfg.params;
  const auto& bs = cfg.balance;
  const Eigenpairs eig = eigenpairs(cfg.potential, cfg.grid, params, bs.n_eigen);
  const BalanceReport rep = solve_beta(eig.spectrum, params);
  const Complex expected(0.0, -1.0 / params.hbar());
  run.below("beta_error", std::abs(rep.beta - expected), 1e-10 / params.hbar(), "|beta + i / hbar|");
  double worst_ratio = 0.0;
  for (const auto& r : rep.per_frequency_ratios) worst_ratio = std::max(worst_ratio, std::abs(r - 1.0));
  run.below("per_frequency_ratio_error", worst_ratio, 1e-8, "max |lhs_k / rhs_k - 1|");

  const DampedMemoryCheck damped = damped_memory_check(eig.spectrum, bs.damping_fraction);
  run.below("damped_memory_check", damped.max_relative_error, 0.01, "damped cosine memory integral vs w_k0^3");

  // Commutator on three states.
  const Grid1D cgrid(cfg.grid.x_min(), cfg.grid.x_max(), bs.commutator_points);
  const Eigenpairs low = eigenpairs(cfg.potential, cgrid, params, 2);
  std::vector<std::pair<std::string, Wavefunction>> states{{"ground", low.states[0]}, {"first_excited", low.states[1]}};
  const double w0 = harmonic_omega(cfg.potential);
  if (w0 > 0.0) {
    states.emplace_back("coherent", coherent_state(cgrid, params, w0, 1.0, 0.5));
  } else {
    const double mid = 0.5 * (cfg.grid.x_min() + cfg.grid.x_max());
    const double width = (cfg.grid.x_max() - cfg.grid.x_min()) / 20.0;
    states.emplace_back("gaussian", gaussian_packet(cgrid, mid, width, 0.0));
  }
  json comm = json::object();
  for (const auto& [name, psi] : states) {
    const Complex c = commutator_check(psi, params);
    comm[name] = complex_json(c);
    run.below("commutator_" + name, std::abs(c - Complex(0.0, params.hbar())) / params.hbar(), 1e-4,
              "|<[x,p]> - i hbar| / hbar");
  }

  json response = json::object();
  if (w0 > 0.0) {
    // Two classical paths, tau = 0 and no field, differing by a momentum kick.
    const PhysicalParams free_params = params.with_tau(0.0);
    const double dt = 1e-3;
    const auto steps = static_cast<std::size_t>(std::llround(bs.response_lag / dt));
    TrajectoryState a{0.3, 0.2, 0.0}, b{0.3, 0.2 + bs.response_kick, 0.0};
    const StepDrive none{};
    for (std::size_t i = 0; i < steps; ++i) {
      a = step(a, none, cfg.potential, free_params, dt);
      b = step(b, none, cfg.potential, free_params, dt);
    }
    const double numeric = (b.x - a.x) / bs.response_kick;
    const double lag = static_cast<double>(steps) * dt;
    const double closed = classical_response(cfg.potential, params, lag);
    run.within("classical_response", numeric, closed, 1e-6, "trajectory kick vs sin(w0 t) / (m w0)");
    response = {{"lag", lag}, {"closed_form", closed}, {"trajectories", numeric}};
  }

  json out;
  out["beta"] = complex_json(rep.beta);
  out["lhs"] = complex_json(rep.lhs);
  out["rhs"] = complex_json(rep.rhs);
  json lhs = json::array(), rhs = json::array(), ratios = json::array();
  for (const auto& z : rep.lhs_terms) lhs.push_back(complex_json(z));
  for (const auto& z : rep.rhs_terms) rhs.push_back(complex_json(z));
  for (std::size_t i = 0; i < rep.per_frequency_ratios.size(); ++i)
    ratios.push_back({{"k", rep.ratio_index[i]}, {"ratio", complex_json(rep.per_frequency_ratios[i])}});
  out["lhs_terms"] = lhs;
  out["rhs_terms"] = rhs;
  out["per_frequency_ratios"] = ratios;
  out["damped_memory"] = {{"frequencies", damped.frequencies},
                          {"limit", damped.limit},
                          {"damped", damped.damped},
                          {"relative_error", damped.relative_error}};
  out["commutator"] = comm;
  out["classical_response"] = response;
  run.write_json("balance.json", out);
  run.write("spectrum.csv", spectrum_csv(eig.spectrum));
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::covariance: return "covariance";
    case ExperimentKind::relax: return "relax";
    case ExperimentKind::stats: return "stats";
    case ExperimentKind::hydro: return "hydro";
    case ExperimentKind::solve: return "solve";
    case ExperimentKind::balance: return "balance";
    case ExperimentKind::compare: return "compare";
  }
  return "compare";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::covariance, ExperimentKind::relax, ExperimentKind::stats, ExperimentKind::hydro,
                 ExperimentKind::solve, ExperimentKind::balance, ExperimentKind::compare}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

ZpfSpectrum ExperimentConfig::zpf_spectrum() const {
  return ZpfSpectrum{params, spectrum.n_modes, spectrum.omega_min, spectrum.phase_mode};
}

IntegrationConfig ExperimentConfig::integration_config() const {
  IntegrationConfig c = integration;
  c.master_seed = master_seed;
  c.threads = threads;
  return c;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument([&] {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

bool Manifest::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  std::vector<std::string> errors;
  Reader r(errors);
  ExperimentConfig c;
  r.allow(j, "config",
          {"experiment", "master_seed", "threads", "output_dir", "params", "potential", "spectrum", "integration",
           "grid", "covariance", "solver", "hydro", "balance"});
  if (!j.is_object()) throw ConfigError(errors);

  std::string kind = to_string(c.kind);
  r.string(j, "config", "experiment", kind);
  try {
    c.kind = experiment_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    r.error(std::string("config.experiment: ") + e.what());
  }
  r.integer(j, "config", "master_seed", c.master_seed);
  r.integer(j, "config", "threads", c.threads);
  std::string out = c.output_dir.string();
  r.string(j, "config", "output_dir", out);
  c.output_dir = out;

  if (j.contains("params")) {
    const auto& p = j["params"];
    r.allow(p, "params", {"mass", "hbar", "tau", "cutoff"});
    double m = c.params.mass(), h = c.params.hbar(), t = c.params.tau(), w = c.params.cutoff();
    r.number(p, "params", "mass", m);
    r.number(p, "params", "hbar", h);
    r.number(p, "params", "tau", t);
    r.number(p, "params", "cutoff", w);
    try {
      c.params = PhysicalParams(m, h, t, w);
    } catch (const std::invalid_argument& e) {
      r.error(std::string("params: ") + e.what());
    }
  }
  if (j.contains("potential")) {
    const auto& p = j["potential"];
    r.allow(p, "potential", {"kind", "omega0", "k", "length"});
    std::string pk = "harmonic";
    r.string(p, "potential", "kind", pk);
    double omega0 = 1.0, k = 1.0, length = 1.0;
    r.number(p, "potential", "omega0", omega0);
    r.number(p, "potential", "k", k);
    r.number(p, "potential", "length", length);
    try {
      if (pk == "harmonic") c.potential = Potential::harmonic(omega0);
      else if (pk == "quartic") c.potential = Potential::quartic(k);
      else if (pk == "box") c.potential = Potential::box(length);
      else if (pk == "free") c.potential = Potential::free();
      else r.error("potential.kind: unknown potential '" + pk + "'");
    } catch (const std::invalid_argument& e) {
      r.error(std::string("potential: ") + e.what());
    }
  }
  if (j.contains("spectrum")) {
    const auto& s = j["spectrum"];
    r.allow(s, "spectrum", {"n_modes", "omega_min", "phase_mode"});
    r.integer(s, "spectrum", "n_modes", c.spectrum.n_modes);
    r.number(s, "spectrum", "omega_min", c.spectrum.omega_min);
    std::string mode = to_string(c.spectrum.phase_mode);
    r.string(s, "spectrum", "phase_mode", mode);
    try {
      c.spectrum.phase_mode = phase_mode_from_string(mode);
    } catch (const std::invalid_argument& e) {
      r.error(std::string("spectrum.phase_mode: ") + e.what());
    }
  }
  if (j.contains("integration")) {
    const auto& s = j["integration"];
    r.allow(s, "integration",
            {"dt", "t_end", "record_stride", "n_trajectories", "power_windows", "transient_fraction", "init"});
    r.number(s, "integration", "dt", c.integration.dt);
    r.number(s, "integration", "t_end", c.integration.t_end);
    r.integer(s, "integration", "record_stride", c.integration.record_stride);
    r.integer(s, "integration", "n_trajectories", c.integration.n_trajectories);
    r.integer(s, "integration", "power_windows", c.integration.power_windows);
    r.number(s, "integration", "transient_fraction", c.transient_fraction);
    if (s.is_object() && s.contains("init")) {
      const auto& in = s["init"];
      r.allow(in, "integration.init", {"kind", "x0", "p0", "sigma_x", "sigma_p"});
      std::string ik = "point";
      double x0 = 0, p0 = 0, sx = 0, sp = 0;
      r.string(in, "integration.init", "kind", ik);
      r.number(in, "integration.init", "x0", x0);
      r.number(in, "integration.init", "p0", p0);
      r.number(in, "integration.init", "sigma_x", sx);
      r.number(in, "integration.init", "sigma_p", sp);
      if (ik == "point") c.init = InitialDistribution::point(x0, p0);
      else if (ik == "gaussian") c.init = InitialDistribution::gaussian(sx, sp, x0, p0);
      else r.error("integration.init.kind: expected point or gaussian");
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    r.allow(g, "grid", {"x_min", "x_max", "n_points"});
    double lo = c.grid.x_min(), hi = c.grid.x_max();
    std::size_t n = c.grid.size();
    r.number(g, "grid", "x_min", lo);
    r.number(g, "grid", "x_max", hi);
    r.integer(g, "grid", "n_points", n);
    try {
      c.grid = Grid1D(lo, hi, n);
    } catch (const std::invalid_argument& e) {
      r.error(std::string("grid: ") + e.what());
    }
  }
  if (j.contains("covariance")) {
    const auto& s = j["covariance"];
    r.allow(s, "covariance", {"n_realizations", "n_modes", "lags", "window_points", "window_start", "window_spacing"});
    r.integer(s, "covariance", "n_realizations", c.covariance.n_realizations);
    r.integer(s, "covariance", "n_modes", c.covariance.n_modes);
    r.integer(s, "covariance", "window_points", c.covariance.window_points);
    r.number(s, "covariance", "window_start", c.covariance.window_start);
    r.number(s, "covariance", "window_spacing", c.covariance.window_spacing);
    if (s.is_object() && s.contains("lags")) {
      const auto& l = s["lags"];
      if (!l.is_array() || !std::all_of(l.begin(), l.end(), [](const json& v) { return v.is_number(); })) {
        r.error("covariance.lags: expected an array of numbers");
      } else {
        c.covariance.lags = l.get<std::vector<double>>();
      }
    }
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    r.allow(s, "solver", {"tol", "max_iterations", "n_eigen"});
    r.number(s, "solver", "tol", c.solver.tol);
    r.integer(s, "solver", "max_iterations", c.solver.max_iterations);
    r.integer(s, "solver", "n_eigen", c.solver.n_eigen);
  }
  if (j.contains("hydro")) {
    const auto& s = j["hydro"];
    r.allow(s, "hydro", {"n_points", "x_min", "x_max", "x0", "p0", "dt", "steps"});
    r.integer(s, "hydro", "n_points", c.hydro.n_points);
    r.number(s, "hydro", "x_min", c.hydro.x_min);
    r.number(s, "hydro", "x_max", c.hydro.x_max);
    r.number(s, "hydro", "x0", c.hydro.x0);
    r.number(s, "hydro", "p0", c.hydro.p0);
    r.number(s, "hydro", "dt", c.hydro.dt);
    r.integer(s, "hydro", "steps", c.hydro.steps);
  }
  if (j.contains("balance")) {
    const auto& s = j["balance"];
    r.allow(s, "balance", {"n_eigen", "commutator_points", "damping_fraction", "response_lag", "response_kick"});
    r.integer(s, "balance", "n_eigen", c.balance.n_eigen);
    r.integer(s, "balance", "commutator_points", c.balance.commutator_points);
    r.number(s, "balance", "damping_fraction", c.balance.damping_fraction);
    r.number(s, "balance", "response_lag", c.balance.response_lag);
    r.number(s, "balance", "response_kick", c.balance.response_kick);
  }
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.kind);
  j["master_seed"] = c.master_seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir.string();
  j["params"] = {{"mass", c.params.mass()}, {"hbar", c.params.hbar()}, {"tau", c.params.tau()}, {"cutoff", c.params.cutoff()}};
  j["potential"] = potential_json(c.potential);
  j["spectrum"] = {{"n_modes", c.spectrum.n_modes},
                   {"omega_min", c.spectrum.omega_min},
                   {"phase_mode", to_string(c.spectrum.phase_mode)}};
  j["integration"] = {{"dt", c.integration.dt},
                      {"t_end", c.integration.t_end},
                      {"record_stride", c.integration.record_stride},
                      {"n_trajectories", c.integration.n_trajectories},
                      {"power_windows", c.integration.power_windows},
                      {"transient_fraction", c.transient_fraction},
                      {"init", init_json(c.init)}};
  j["grid"] = {{"x_min", c.grid.x_min()}, {"x_max", c.grid.x_max()}, {"n_points", c.grid.size()}};
  j["covariance"] = {{"n_realizations", c.covariance.n_realizations},
                     {"n_modes", c.covariance.n_modes},
                     {"lags", c.covariance.lags},
                     {"window_points", c.covariance.window_points},
                     {"window_start", c.covariance.window_start},
                     {"window_spacing", c.covariance.window_spacing}};
  j["solver"] = {{"tol", c.solver.tol}, {"max_iterations", c.solver.max_iterations}, {"n_eigen", c.solver.n_eigen}};
  j["hydro"] = {{"n_points", c.hydro.n_points}, {"x_min", c.hydro.x_min}, {"x_max", c.hydro.x_max},
                {"x0", c.hydro.x0},             {"p0", c.hydro.p0},       {"dt", c.hydro.dt},
                {"steps", c.hydro.steps}};
  j["balance"] = {{"n_eigen", c.balance.n_eigen},
                  {"commutator_points", c.balance.commutator_points},
                  {"damping_fraction", c.balance.damping_fraction},
                  {"response_lag", c.balance.response_lag},
                  {"response_kick", c.balance.response_kick}};
  return j.dump(2);
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> v;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  need(c.threads >= 1, "threads must be >= 1");
  const bool box = c.potential.get_if<Box>() != nullptr;
  const bool harmonic = c.potential.get_if<Harmonic>() != nullptr;
  auto grid_in_box = [&](double lo, double hi) {
    if (box) need(lo >= 0.0 && hi <= c.potential.get_if<Box>()->length, "grid must lie inside the box [0, L]");
  };

  switch (c.kind) {
    case ExperimentKind::covariance: {
      const auto& s = c.covariance;
      need(s.n_realizations >= 100, "covariance.n_realizations must be >= 100");
      need(s.n_modes >= 2, "covariance.n_modes must be >= 2");
      need(s.window_points >= 1, "covariance.window_points must be >= 1");
      need(!s.lags.empty(), "covariance.lags must not be empty");
      need(c.spectrum.omega_min >= 0.0 && c.spectrum.omega_min < c.params.cutoff(),
           "spectrum.omega_min must lie in [0, cutoff)");
      break;
    }
    case ExperimentKind::relax:
    case ExperimentKind::stats:
    case ExperimentKind::compare: {
      need(c.spectrum.n_modes >= 2, "spectrum.n_modes must be >= 2");
      need(c.spectrum.omega_min >= 0.0 && c.spectrum.omega_min < c.params.cutoff(),
           "spectrum.omega_min must lie in [0, cutoff)");
      if (c.spectrum.n_modes >= 2 && c.spectrum.omega_min >= 0.0 && c.spectrum.omega_min < c.params.cutoff()) {
        for (auto& s : c.integration.violations(c.zpf_spectrum())) v.push_back(s);
      }
      need(c.transient_fraction >= 0.0 && c.transient_fraction < 1.0, "transient_fraction must lie in [0, 1)");
      if (c.init.kind == InitialDistribution::Kind::gaussian)
        need(c.init.sigma_x >= 0.0 && c.init.sigma_p >= 0.0, "init widths must be >= 0");
      if (c.kind != ExperimentKind::relax) {
        need(c.potential.confining(), "stats/compare need a confining potential");
        grid_in_box(c.grid.x_min(), c.grid.x_max());
        need(c.solver.tol > 0.0, "solver.tol must be > 0");
        if (c.integration.dt > 0.0 && c.integration.record_stride > 0) {
          const double t_cut = c.transient_fraction * c.integration.t_end;
          const std::size_t steps = c.integration.steps();
          std::size_t in_window = 0;
          for (std::size_t s = 0; s * c.integration.record_stride <= steps; ++s)
            if (static_cast<double>(s * c.integration.record_stride) * c.integration.dt >= t_cut - 1e-9) ++in_window;
          need(in_window >= 1, "no snapshot falls in the stationary window; lower record_stride");
        }
      }
      break;
    }
    case ExperimentKind::hydro: {
      const auto& h = c.hydro;
      need(harmonic, "hydro evolves a coherent state and needs the harmonic potential");
      need(h.n_points >= 256, "hydro.n_points must be >= 256");
      need(h.x_max > h.x_min, "hydro.x_max must exceed hydro.x_min");
      need(h.dt > 0.0, "hydro.dt must be > 0");
      need(h.steps >= 2, "hydro.steps must be >= 2");
      break;
    }
    case ExperimentKind::solve: {
      need(c.potential.confining(), "solve needs a confining potential");
      grid_in_box(c.grid.x_min(), c.grid.x_max());
      need(c.solver.tol > 0.0, "solver.tol must be > 0");
      need(c.solver.n_eigen >= 1 && c.solver.n_eigen <= 20, "solver.n_eigen must lie in [1, 20]");
      need(c.solver.n_eigen < (c.grid.size() - 2) / 8, "solver.n_eigen exceeds grid resolution");
      break;
    }
    case ExperimentKind::balance: {
      const auto& b = c.balance;
      need(c.potential.confining(), "balance needs a confining potential");
      grid_in_box(c.grid.x_min(), c.grid.x_max());
      need(b.n_eigen >= 2 && b.n_eigen <= 20, "balance.n_eigen must lie in [2, 20]");
      need(b.n_eigen < (c.grid.size() - 2) / 8, "balance.n_eigen exceeds grid resolution");
      need(b.commutator_points >= 64, "balance.commutator_points must be >= 64");
      need(b.damping_fraction > 0.0, "balance.damping_fraction must be > 0");
      need(b.response_kick > 0.0, "balance.response_kick must be > 0");
      need(b.response_lag >= 0.0, "balance.response_lag must be >= 0");
      break;
    }
  }
  return v;
}

Manifest run_experiment(const ExperimentConfig& config) {
  if (auto v = validate_config(config); !v.empty()) throw ConfigError(v);
  const auto start = std::chrono::steady_clock::now();
  Manifest manifest;
  manifest.kind = config.kind;
  std::filesystem::create_directories(config.output_dir);
  Run run(config, manifest);
  try {
    switch (config.kind) {
      case ExperimentKind::covariance: run_covariance(run); break;
      case ExperimentKind::relax: run_relax(run); break;
      case ExperimentKind::stats: run_stats(run, false); break;
      case ExperimentKind::compare: run_stats(run, true); break;
      case ExperimentKind::hydro: run_hydro(run); break;
      case ExperimentKind::solve: run_solve(run); break;
      case ExperimentKind::balance: run_balance(run); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(to_string(config.kind) + " experiment failed: " + e.what());
  }
  manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json m;
  m["experiment"] = to_string(config.kind);
  m["timestamp"] = timestamp_utc();
  m["wall_time_s"] = manifest.wall_time_s;
  m["versions"] = {{"sedlab", std::string(kVersion)},
                   {"fftw", std::string(fftw_version)},
                   {"openssl", std::string(OpenSSL_version(OPENSSL_VERSION))},
                   {"compiler", std::string(__VERSION__)}};
  m["seeds"] = {{"master_seed", config.master_seed}, {"per_trajectory", "splitmix64(master_seed, index)"}};
  m["config"] = json::parse(config_to_json(config));
  json checks = json::array();
  for (const auto& c : manifest.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"target", c.target},
                      {"tolerance", c.tolerance}, {"detail", c.detail}});
  }
  m["checks"] = checks;
  m["all_passed"] = manifest.all_passed();
  json outputs = json::array();
  for (const auto& o : manifest.outputs) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  m["outputs"] = outputs;
  write_text(config.output_dir / "manifest.json", m.dump(2) + "\n");
  return manifest;
}

}  // namespace sedlab
