#pragma once

// Experiment configuration: a flat `key = value` text file.
//
//   # comment
//   problem = quadratic
//   dim = 16
//   mode = polyak
//   eps_hat = auto

#include <cstdint>
#include <optional>
#include <string>

namespace sprox {

struct ExperimentConfig {
  // Problem instance.
  std::string problem = "quadratic";  // quadratic | logistic | matrix_quadratic
  long dim = 8;                        // quadratic dimension
  long rows = 4;                       // matrix_quadratic
  long cols = 3;
  long samples = 64;                   // logistic
  long features = 8;
  double cond = 10.0;
  double target_scale = 1.0;
  std::string spectrum = "log";        // quadratic: log | power
  double spectrum_beta = 2.0;          // power: eigenvalue density ~ lambda^-beta
  std::uint64_t problem_seed = 1;

  // Noise.
  std::string noise = "none";  // none | gaussian | student_t
  double noise_sigma = 0.0;
  double noise_df = 1.8;
  double noise_p = 1.5;

  // Reference function.
  std::string reference = "barrier";  // barrier | hyper_kappa
  std::string structure = "aniso";    // aniso | iso (lifted spectrally on matrix blocks)
  double epsilon = 1.0;
  double kappa = 4.0;

  // Constraint.
  std::string constraint = "zero";
  double radius = 1.0;
  long sparsity = 1;

  // Algorithm.
  std::string mode = "deterministic";  // deterministic | polyak | storm | polar
  std::optional<double> gamma;         // deterministic; unset = mu / L
  double gamma_bar = 1.0;
  long horizon = 100;
  std::optional<double> eps_hat;       // polar; unset = auto
  std::string poly_schedule;           // polar surrogate; empty = exact preconditioner
  std::string x0 = "zero";             // zero | random
  double x0_scale = 1.0;

  // Execution.
  std::uint64_t seed = 0;
  long repetitions = 1;
  std::string output = "trace.csv";

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError carrying the 1-based line of the first problem.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

// Semantic checks (enum names, ranges); throws ConfigError.
void check_config(const ExperimentConfig& c);

}  // namespace sprox
