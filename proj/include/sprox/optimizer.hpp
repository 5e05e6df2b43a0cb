#pragma once

// The forward-backward iteration
//   y = x - gamma grad phi*(d),   x+ = argmin g + (gamma * phi)(. - y)
// in deterministic, Polyak, STORM and normalized (Polar Express) modes.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sprox/constraint.hpp"
#include "sprox/direction.hpp"
#include "sprox/polar_express.hpp"
#include "sprox/problems.hpp"
#include "sprox/reference.hpp"

namespace sprox {

struct Deterministic {
  double gamma = 1.0;
};

struct StochasticPolyak {
  double gamma_bar = 1.0;
};

struct StochasticStorm {
  double gamma_bar = 1.0;
};

// Polyak momentum with the normalized update x+ = x - gamma grad
// phi*(d / (||d|| + eps_hat)); unconstrained only. Without eps_hat the
// value (K+1)^(-min(1/4, (p-1)/(2p))) is used, p from the noise model.
struct PolarExpressMode {
  double gamma_bar = 1.0;
  std::optional<double> eps_hat;
  // When set, the polynomial surrogate replaces grad phi*.
  std::optional<PolySchedule> schedule;
};

using Mode = std::variant<Deterministic, StochasticPolyak, StochasticStorm, PolarExpressMode>;

std::string mode_name(const Mode& m);

struct RunConfig {
  ReferenceFn ref;
  ConstraintSpec spec;
  Mode mode;
  long horizon = 0;  // K; the run performs K+1 steps
  std::uint64_t seed = 0;
  ParamVec x0;
  NoiseModel noise;
  // Also evaluate the regularized gap at every x^k (costs one extra prox).
  bool record_reg_gap = false;
};

struct TraceRecord {
  long k = 0;
  double F = 0.0;             // F(x^k)
  double gap_bregman = 0.0;   // D_{phi*}(grad f(x^{k+1}), -subgrad g(x^{k+1}))
  double step_norm = 0.0;     // ||x^{k+1} - x^k||
  double gamma_k = 0.0;
  double alpha_k = 0.0;
  double grad_norm = 0.0;     // ||grad f(x^k)||
  std::uint64_t token = 0;    // sample identifier drawn from the run stream
  int oracle_calls = 0;
  std::optional<double> reg_gap;  // G(x^k)
};

struct Trace {
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  ParamVec x_final;
  int step_bound_violations = 0;
  int feasibility_violations = 0;
  bool completed = true;
  std::string error;

  // (1/(K+1)) sum_k gap_bregman.
  double mean_gap() const;
  double mean_grad_norm() const;
};

struct StepResult {
  ParamVec x_next;
  ParamVec y;
  ParamVec subgrad;
};

StepResult step(const ParamVec& x, const ParamVec& d, double gamma,
                const ReferenceFn& ref, const ConstraintSpec& spec);

ParamVec polar_express_step(const ParamVec& x, const ParamVec& d, double gamma,
                            const ReferenceFn& ref, double eps_hat,
                            const PolySchedule* schedule = nullptr);

// Default normalization for PolarExpressMode.
double auto_eps_hat(long horizon, double p_moment);

// Throws InvalidConfig for invalid settings.
void validate(const RunConfig& config, const Problem& problem);

// Errors inside the loop end the run early: the partial trace is returned
// with completed = false and the message in `error`.
Trace run(const RunConfig& config, const Problem& problem);

}  // namespace sprox
