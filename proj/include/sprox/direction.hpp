#pragma once

// Stochastic direction estimators d^k.

#include <optional>

#include "sprox/tensor.hpp"

namespace sprox {

enum class EstimatorKind { Plain, Polyak, Storm };

struct DirectionState {
  ParamVec d;
  EstimatorKind kind = EstimatorKind::Plain;
  long k = 0;
  // Previous iterate, kept for STORM's correction term.
  std::optional<ParamVec> x_prev;
};

// d^0 = first sample at x0.
DirectionState init_direction(EstimatorKind kind, const ParamVec& first_sample,
                              const ParamVec& x0);

// d = alpha * g + (1 - alpha) * d.
DirectionState polyak_update(const DirectionState& s, const ParamVec& grad_sample,
                             double alpha);

// d = (1 - a) d + a g(x) + (1 - a)(g(x) - g(x_prev)), both gradients on the
// same sample. `x` becomes the new x_prev.
DirectionState storm_update(const DirectionState& s, const ParamVec& grad_at_x,
                            const ParamVec& grad_at_xprev_same_sample,
                            double alpha, const ParamVec& x);

// Plain estimator: d = g.
DirectionState plain_update(const DirectionState& s, const ParamVec& grad_sample);

enum class ScheduleKind { Polyak43, Storm45 };

struct StepWeights {
  double alpha;
  double gamma;
};

// Polyak43: alpha = (K+1)^(-1/2), gamma = gamma_bar (K+1)^(-3/4) with K the
//           horizon.
// Storm45:  alpha = (k+1)^(-2/3), gamma = gamma_bar (k+1)^(-2/3) with k the
//           iteration index.
StepWeights schedule(ScheduleKind kind, long K_or_k, double gamma_bar = 1.0);

}  // namespace sprox
