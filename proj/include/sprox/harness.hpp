#pragma once

// Experiment execution, CSV traces and empirical rate estimation.

#include <iosfwd>
#include <string>
#include <vector>

#include "sprox/config.hpp"
#include "sprox/optimizer.hpp"

namespace sprox {

struct Instance {
  ProblemPtr problem;
  ReferenceFn ref;
  ConstraintSpec spec;
  ParamVec x0;
  NoiseModel noise;
};

// Builds the problem, reference, constraint, x0 and noise described by the
// config. Throws ConfigError for semantic problems.
Instance build_instance(const ExperimentConfig& c);
RunConfig build_run_config(const ExperimentConfig& c, const Instance& inst,
                           std::uint64_t seed);

// Runs repetitions with seeds seed, seed+1, ... on up to `threads` workers
// (0 = hardware concurrency); traces come back in seed order.
std::vector<Trace> run_repetitions(const ExperimentConfig& c, unsigned threads = 0);

// Header run_id,k,F,gap_bregman,step_norm,gamma_k,alpha_k; 17 significant
// digits.
void write_csv(std::ostream& os, const std::vector<Trace>& traces);
std::string summary_text(const ExperimentConfig& c, const std::vector<Trace>& traces);

struct ExperimentOutcome {
  std::vector<Trace> traces;
  std::string summary;
  bool ok = true;  // every run completed
};

// Runs the experiment, writes c.output and c.output + ".summary".
ExperimentOutcome run_experiment(const ExperimentConfig& c, unsigned threads = 0);

struct RateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<long> horizons;
  std::vector<double> values;
  std::vector<std::string> warnings;
};

// Least-squares fit of log(value) against log(K+1). Needs >= 4 horizons;
// nonpositive values are excluded with a warning.
RateEstimate estimate_rate(const std::vector<long>& horizons,
                           const std::vector<double>& values);

enum class RateMetric { Gap, GradNorm };

struct RateSweep {
  // per_run[i][r]: time-averaged metric of repetition r at horizons[i].
  std::vector<std::vector<double>> per_run;
  std::vector<double> means;
  RateEstimate estimate;
  int step_bound_violations = 0;
  int feasibility_violations = 0;
  int failed_runs = 0;
};

RateSweep sweep_rates(const ExperimentConfig& c, const std::vector<long>& horizons,
                      RateMetric metric, unsigned threads = 0);

std::vector<long> parse_horizons(const std::string& list);
std::vector<long> default_horizons();

}  // namespace sprox
