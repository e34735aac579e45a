// sedlab command-line runner.
//
//   sedlab compare --config run.json --seed 7 --out results --threads 4
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 bad config or
// arguments, 3 the experiment itself failed.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sedlab/experiment.hpp"
#include "sedlab/report_io.hpp"

namespace {

int print_violations(const std::vector<std::string>& violations) {
  nlohmann::json j;
  j["error"] = "invalid_config";
  j["violations"] = violations;
  std::cerr << j.dump(2) << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic electrodynamics lab: ZPF-driven ensembles vs quantum references"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned threads = 0;
  bool print_config = false;

  const std::vector<std::pair<const char*, const char*>> commands{
      {"covariance", "ZPF force covariance, Monte Carlo vs closed form"},
      {"relax", "energy relaxation of an ensemble from a point start"},
      {"stats", "stationary ensemble statistics and local moments"},
      {"hydro", "stochastic-hydrodynamic residuals on a Schrodinger evolution"},
      {"solve", "variational ground state and grid eigenpairs"},
      {"balance", "energy balance coefficient and commutator checks"},
      {"compare", "full pipeline: ensemble vs variational ground state"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file (defaults otherwise)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override master_seed");
    sub->add_option("--out", out_dir, "override output_dir");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--print-config", print_config, "print the effective config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  sedlab::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = sedlab::config_from_json(sedlab::read_text(config_path));
  } catch (const sedlab::ConfigError& e) {
    return print_violations(e.violations());
  } catch (const std::exception& e) {
    return print_violations({e.what()});
  }
  config.kind = sedlab::experiment_kind_from_string(kind);
  auto* sub = app.get_subcommand(kind);
  if (sub->count("--seed")) config.master_seed = seed;
  if (sub->count("--out")) config.output_dir = out_dir;
  if (sub->count("--threads")) config.threads = threads;

  if (print_config) {
    std::cout << sedlab::config_to_json(config) << "\n";
    return 0;
  }
  if (auto v = sedlab::validate_config(config); !v.empty()) return print_violations(v);

  sedlab::Manifest manifest;
  try {
    manifest = sedlab::run_experiment(config);
  } catch (const sedlab::ConfigError& e) {
    return print_violations(e.violations());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  for (const auto& c : manifest.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << sedlab::format_double(c.value)
              << "  target=" << sedlab::format_double(c.target) << "  tol=" << sedlab::format_double(c.tolerance)
              << "\n";
  }
  std::cout << "outputs in " << config.output_dir.string() << " (" << manifest.outputs.size() + 1 << " files, "
            << manifest.wall_time_s << " s)\n";
  return manifest.all_passed() ? 0 : 1;
}
