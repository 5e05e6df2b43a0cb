#include "sprox/direction.hpp"

#include <cmath>

#include "sprox/errors.hpp"

namespace sprox {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidConfig("momentum weight must lie in (0, 1]");
  }
}

}  // namespace

DirectionState init_direction(EstimatorKind kind, const ParamVec& first_sample,
                              const ParamVec& x0) {
  require_conformable(first_sample, x0);
  DirectionState s;
  s.d = first_sample;
  s.kind = kind;
  s.k = 0;
  if (kind == EstimatorKind::Storm) s.x_prev = x0;
  return s;
}

DirectionState polyak_update(const DirectionState& s, const ParamVec& grad_sample,
                             double alpha) {
  require_alpha(alpha);
  DirectionState out = s;
  out.d = axpy(alpha, grad_sample, scale(1.0 - alpha, s.d));
  ++out.k;
  return out;
}

DirectionState storm_update(const DirectionState& s, const ParamVec& grad_at_x,
                            const ParamVec& grad_at_xprev_same_sample,
                            double alpha, const ParamVec& x) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidConfig("momentum weight must lie in [0, 1]");
  }
  require_conformable(grad_at_x, grad_at_xprev_same_sample);
  DirectionState out = s;
  const double beta = 1.0 - alpha;
  out.d = axpy(beta, s.d,
               axpy(alpha, grad_at_x, scale(beta, grad_at_x - grad_at_xprev_same_sample)));
  out.x_prev = x;
  ++out.k;
  return out;
}

DirectionState plain_update(const DirectionState& s, const ParamVec& grad_sample) {
  require_conformable(s.d, grad_sample);
  DirectionState out = s;
  out.d = grad_sample;
  ++out.k;
  return out;
}

StepWeights schedule(ScheduleKind kind, long K_or_k, double gamma_bar) {
  if (K_or_k < 0) throw InvalidConfig("schedule index must be nonnegative");
  if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) {
    throw InvalidConfig("gamma_bar must be positive and finite");
  }
  const double n = static_cast<double>(K_or_k) + 1.0;
  switch (kind) {
    case ScheduleKind::Polyak43:
      return {1.0 / std::sqrt(n), gamma_bar * std::pow(n, -0.75)};
    case ScheduleKind::Storm45: {
      const double w = std::pow(n, -2.0 / 3.0);
      return {w, gamma_bar * w};
    }
  }
  throw InvalidConfig("unknown schedule");
}

}  // namespace sprox
