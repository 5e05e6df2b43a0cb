// sprox command line: run experiments, sweep rates, check the prox oracle,
// fit polynomial schedules and run the invariant suites.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sprox/config.hpp"
#include "sprox/errors.hpp"
#include "sprox/harness.hpp"
#include "sprox/polar_express.hpp"
#include "suites.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string preset_path(const std::string& name) {
  return std::string(SPROX_DATA_DIR) + "/experiments/" + name + ".cfg";
}

void print_suite(const sprox::suites::SuiteResult& r, bool quiet) {
  if (quiet && r.pass()) return;
  std::printf("%-4s %-32s checks=%ld failures=%ld worst=%.3g\n", r.pass() ? "ok" : "FAIL",
              r.name.c_str(), r.checks, r.failures, r.worst);
  if (!r.pass() && !r.detail.empty()) std::printf("     first failure: %s\n", r.detail.c_str());
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            const std::string& out, bool quiet) {
  sprox::ExperimentConfig c = sprox::load_config(config);
  if (seed) c.seed = *seed;
  if (!out.empty()) c.output = out;
  const auto outcome = sprox::run_experiment(c);
  if (!quiet) std::cout << outcome.summary;
  return outcome.ok ? kOk : kRuntimeError;
}

int cmd_rates(const std::string& config, const std::string& mode, const std::string& metric,
              const std::string& horizons, std::optional<std::uint64_t> seed,
              const std::string& out, bool quiet) {
  const std::string path = !config.empty() ? config : preset_path("rates_" + mode);
  sprox::ExperimentConfig c = sprox::load_config(path);
  if (seed) c.seed = *seed;
  sprox::RateMetric m = c.mode == "polar" ? sprox::RateMetric::GradNorm : sprox::RateMetric::Gap;
  if (metric == "gap") m = sprox::RateMetric::Gap;
  if (metric == "grad") m = sprox::RateMetric::GradNorm;
  const auto hs = horizons.empty() ? sprox::default_horizons() : sprox::parse_horizons(horizons);

  const auto sweep = sprox::sweep_rates(c, hs, m);
  const auto& est = sweep.estimate;
  for (const auto& w : est.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!quiet) {
    std::printf("mode = %s\nmetric = %s\nrepetitions = %ld\n", c.mode.c_str(),
                m == sprox::RateMetric::Gap ? "gap" : "grad_norm", c.repetitions);
    for (std::size_t i = 0; i < hs.size(); ++i)
      std::printf("K = %ld mean = %.17g\n", hs[i], sweep.means[i]);
  }
  std::printf("slope = %.6f\nintercept = %.6f\nr_squared = %.6f\n", est.slope, est.intercept,
              est.r_squared);
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw sprox::Error("cannot write " + out);
    os << "K,mean\n";
    char buf[64];
    for (std::size_t i = 0; i < hs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%ld,%.17g\n", hs[i], sweep.means[i]);
      os << buf;
    }
  }
  if (sweep.failed_runs > 0 || sweep.step_bound_violations > 0 ||
      sweep.feasibility_violations > 0) {
    std::fprintf(stderr, "failed runs %d, step bound violations %d, infeasible iterates %d\n",
                 sweep.failed_runs, sweep.step_bound_violations, sweep.feasibility_violations);
    return kRuntimeError;
  }
  return kOk;
}

int cmd_prox_check(std::uint64_t seed, int instances, bool quiet) {
  const auto a = sprox::suites::prox_oracle(seed, instances);
  const auto b = sprox::suites::matrix_reduction(seed + 1, instances, 1000);
  print_suite(a, quiet);
  print_suite(b, quiet);
  return a.pass() && b.pass() ? kOk : kValidationFailure;
}

int cmd_polar_fit(double eps, double kappa, const std::string& schedule, int grid,
                  const std::string& out) {
  const bool is_path = schedule.find('/') != std::string::npos ||
                       schedule.find('.') != std::string::npos;
  const auto s = sprox::load_schedule(is_path ? schedule : sprox::shipped_schedule_path(schedule));
  const auto r = sprox::fit_report(s, eps, kappa, sprox::uniform_grid(grid));

  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw sprox::Error("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "t,poly,preconditioner,sign\n";
  char buf[128];
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.t[i], r.poly[i],
                  r.preconditioner[i], r.sign[i]);
    os << buf;
  }
  std::fprintf(out.empty() ? stderr : stdout,
               "schedule = %s\nmax_dev_vs_preconditioner = %.6g\nmax_dev_vs_sign = %.6g\n",
               s.name.c_str(), r.max_dev_vs_preconditioner, r.max_dev_vs_sign);
  return kOk;
}

int cmd_validate(std::uint64_t seed, bool quiet) {
  namespace su = sprox::suites;
  std::vector<su::SuiteResult> all = su::conjugate_calculus(seed, 200);
  all.push_back(su::majorization(seed + 1, 1000));
  all.push_back(su::svd_checks(seed + 2, 100, 16));
  all.push_back(su::prox_oracle(seed + 3, 20));
  all.push_back(su::matrix_reduction(seed + 4, 20, 500));
  bool ok = true;
  for (const auto& r : all) {
    print_suite(r, quiet);
    ok = ok && r.pass();
  }
  if (!quiet) std::printf("%s\n", ok ? "all suites passed" : "suite failures");
  return ok ? kOk : kValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned proximal gradient experiments"};
  app.require_subcommand(1);

  std::string config, out, horizons, mode = "polyak", metric = "auto", schedule = "polar_express";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  int instances = 200, grid = 2001;
  double eps = 3e-4, kappa = 4.0;

  auto* run = app.add_subcommand("run", "Execute an experiment config");
  run->add_option("--config", config, "Config file")->required();
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out", out, "Override the CSV output path");
  run->add_flag("--quiet", quiet, "Suppress the summary");

  auto* rates = app.add_subcommand("rates", "Multi-horizon sweep and rate estimate");
  rates->add_option("--config", config, "Config file (default: shipped preset for --mode)");
  rates->add_option("--mode", mode, "Preset: polyak, storm, polar, heavy_tail")
      ->check(CLI::IsMember({"polyak", "storm", "polar", "heavy_tail"}));
  rates->add_option("--metric", metric, "gap, grad or auto")
      ->check(CLI::IsMember({"auto", "gap", "grad"}));
  rates->add_option("--horizons", horizons, "Comma-separated horizons");
  rates->add_option("--seed", seed, "Override the base seed");
  rates->add_option("--out", out, "Write K,mean CSV");
  rates->add_flag("--quiet", quiet, "Only print the estimate");

  auto* pc = app.add_subcommand("prox-check", "Backward step against brute-force oracles");
  pc->add_option("--seed", seed, "Seed");
  pc->add_option("--instances", instances, "Instances per case")->check(CLI::PositiveNumber);
  pc->add_flag("--quiet", quiet, "Only print failures");

  auto* pf = app.add_subcommand("polar-fit", "Polynomial schedule vs preconditioner and sign");
  pf->add_option("--eps", eps, "Reference epsilon")->check(CLI::PositiveNumber);
  pf->add_option("--kappa", kappa, "Reference kappa")->check(CLI::PositiveNumber);
  pf->add_option("--schedule", schedule, "Shipped schedule name or file path");
  pf->add_option("--grid", grid, "Grid points on [0, 1]")->check(CLI::Range(2, 10000000));
  pf->add_option("--out", out, "CSV path (default stdout)");

  auto* val = app.add_subcommand("validate", "Invariant suites");
  val->add_option("--seed", seed, "Seed");
  val->add_flag("--quiet", quiet, "Only print failures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(config, seed, out, quiet);
    if (*rates) return cmd_rates(config, mode, metric, horizons, seed, out, quiet);
    if (*pc) return cmd_prox_check(seed.value_or(1), instances, quiet);
    if (*pf) return cmd_polar_fit(eps, kappa, schedule, grid, out);
    if (*val) return cmd_validate(seed.value_or(1), quiet);
  } catch (const sprox::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const sprox::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
