#include "sprox/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sprox/errors.hpp"
#include "sprox/prox.hpp"
#include "sprox/stationarity.hpp"

namespace sprox {
namespace {

constexpr double kStepSlack = 1e-12;

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidConfig("step size must be positive and finite");
  }
}

ParamVec surrogate(const PolySchedule& s, const ParamVec& dn) {
  std::vector<Block> out;
  for (const auto& b : dn.blocks()) {
    if (b.is_matrix()) {
      out.push_back(Block::matrix(apply_poly_matrix_raw(s, b.values())));
    } else {
      out.push_back(Block::vector(
          b.flat().unaryExpr([&](double t) { return apply_poly_scalar(s, t); })));
    }
  }
  return ParamVec(std::move(out));
}

bool all_finite(const TraceRecord& r) {
  return std::isfinite(r.F) && std::isfinite(r.gap_bregman) &&
         std::isfinite(r.step_norm) && std::isfinite(r.grad_norm);
}

}  // namespace

std::string mode_name(const Mode& m) {
  switch (m.index()) {
    case 0: return "deterministic";
    case 1: return "polyak";
    case 2: return "storm";
    case 3: return "polar";
  }
  return "unknown";
}

double Trace::mean_gap() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.gap_bregman;
  return s / static_cast<double>(records.size());
}

double Trace::mean_grad_norm() const {
  if (records.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : records) s += r.grad_norm;
  return s / static_cast<double>(records.size());
}

StepResult step(const ParamVec& x, const ParamVec& d, double gamma,
                const ReferenceFn& ref, const ConstraintSpec& spec) {
  require_gamma(gamma);
  StepResult r;
  r.y = x - gamma * precondition(ref, d);
  r.x_next = prox(spec, ref, r.y, gamma);
  r.subgrad = recover_subgradient(r.x_next, r.y, gamma, ref);
  return r;
}

ParamVec polar_express_step(const ParamVec& x, const ParamVec& d, double gamma,
                            const ReferenceFn& ref, double eps_hat,
                            const PolySchedule* schedule) {
  require_gamma(gamma);
  if (!(eps_hat > 0.0)) throw InvalidConfig("eps_hat must be positive");
  const ParamVec dn = (1.0 / (norm2(d) + eps_hat)) * d;
  const ParamVec dir = schedule ? surrogate(*schedule, dn) : precondition(ref, dn);
  return x - gamma * dir;
}

double auto_eps_hat(long horizon, double p_moment) {
  const double e = std::min(0.25, (p_moment - 1.0) / (2.0 * p_moment));
  return std::pow(static_cast<double>(horizon) + 1.0, -e);
}

void validate(const RunConfig& c, const Problem& problem) {
  if (c.horizon < 0) throw InvalidConfig("horizon must be >= 0");
  if (problem.shapes() != c.ref.shapes() || c.spec.shapes() != c.ref.shapes()) {
    throw InvalidConfig("problem, reference and constraint block layouts differ");
  }
  c.ref.require_matches(c.x0);
  c.noise.validate();
  if (!is_feasible(c.spec, c.x0)) throw InvalidConfig("x0 is not feasible for the constraint");
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Deterministic>) {
          require_gamma(m.gamma);
        } else {
          if (!(m.gamma_bar > 0.0) || !std::isfinite(m.gamma_bar)) {
            throw InvalidConfig("gamma_bar must be positive and finite");
          }
        }
        if constexpr (std::is_same_v<M, PolarExpressMode>) {
          if (!c.spec.all_zero()) {
            throw InvalidConfig("polar express mode is unconstrained; use constraint = zero");
          }
          if (m.eps_hat && !(*m.eps_hat > 0.0)) throw InvalidConfig("eps_hat must be positive");
        }
      },
      c.mode);
}

Trace run(const RunConfig& c, const Problem& problem) {
  validate(c, problem);
  Trace trace;
  trace.seed = c.seed;
  trace.records.reserve(static_cast<std::size_t>(c.horizon) + 1);

  std::mt19937_64 stream(c.seed);
  const double D = c.ref.domain_radius();
  const long K = c.horizon;
  const double p = c.noise.kind == NoiseKind::StudentT ? c.noise.p_moment : 2.0;

  ParamVec x = c.x0;
  ParamVec x_prev = c.x0;
  DirectionState dir;
  try {
    for (long k = 0; k <= K; ++k) {
      TraceRecord rec;
      rec.k = k;
      const ParamVec grad = problem.gradient(x);
      rec.F = problem.value(x) + indicator(c.spec, x);
      rec.grad_norm = norm2(grad);
      if (c.record_reg_gap) {
        double gamma_gap = 0.0;
        if (const auto* m = std::get_if<Deterministic>(&c.mode)) gamma_gap = m->gamma;
        if (gamma_gap > 0.0) rec.reg_gap = regularized_gap(c.spec, c.ref, gamma_gap, x, grad);
      }

      ParamVec x_next;
      ParamVec subgrad;
      double gamma = 0.0;
      bool bounded_step = true;

      if (const auto* m = std::get_if<Deterministic>(&c.mode)) {
        gamma = m->gamma;
        rec.alpha_k = 1.0;
        dir.d = grad;
      } else if (std::holds_alternative<StochasticStorm>(c.mode)) {
        const auto& m = std::get<StochasticStorm>(c.mode);
        rec.token = stream();
        const StepWeights w = schedule(ScheduleKind::Storm45, k, m.gamma_bar);
        gamma = w.gamma;
        const ParamVec g = sample_gradient(problem, x, c.noise, rec.token);
        if (k == 0) {
          dir = init_direction(EstimatorKind::Storm, g, x);
          rec.alpha_k = 1.0;
          rec.oracle_calls = 1;
        } else {
          const ParamVec g_prev = sample_gradient(problem, x_prev, c.noise, rec.token);
          dir = storm_update(dir, g, g_prev, w.alpha, x);
          rec.alpha_k = w.alpha;
          rec.oracle_calls = 2;
        }
      } else {
        // Polyak momentum, shared by the plain stochastic and the normalized modes.
        const double gamma_bar = std::holds_alternative<StochasticPolyak>(c.mode)
                                     ? std::get<StochasticPolyak>(c.mode).gamma_bar
                                     : std::get<PolarExpressMode>(c.mode).gamma_bar;
        rec.token = stream();
        const StepWeights w = schedule(ScheduleKind::Polyak43, K, gamma_bar);
        gamma = w.gamma;
        const ParamVec g = sample_gradient(problem, x, c.noise, rec.token);
        rec.oracle_calls = 1;
        if (k == 0) {
          dir = init_direction(EstimatorKind::Polyak, g, x);
          rec.alpha_k = 1.0;
        } else {
          dir = polyak_update(dir, g, w.alpha);
          rec.alpha_k = w.alpha;
        }
      }
      rec.gamma_k = gamma;

      if (const auto* m = std::get_if<PolarExpressMode>(&c.mode)) {
        const double eps_hat = m->eps_hat ? *m->eps_hat : auto_eps_hat(K, p);
        x_next = polar_express_step(x, dir.d, gamma, c.ref, eps_hat,
                                    m->schedule ? &*m->schedule : nullptr);
        subgrad = ParamVec::zeros_like(x);
        bounded_step = !m->schedule.has_value();
      } else {
        StepResult s = step(x, dir.d, gamma, c.ref, c.spec);
        x_next = std::move(s.x_next);
        subgrad = std::move(s.subgrad);
      }

      rec.step_norm = norm2(x_next - x);
      if (bounded_step && rec.step_norm > 2.0 * gamma * D + kStepSlack) {
        ++trace.step_bound_violations;
      }
      if (!is_feasible(c.spec, x_next)) ++trace.feasibility_violations;
      rec.gap_bregman = gap_bregman(c.ref, problem.gradient(x_next), subgrad);
      if (!all_finite(rec)) throw NumericalError("non-finite value in trace at k = " + std::to_string(k));

      trace.records.push_back(rec);
      x_prev = x;
      x = std::move(x_next);
    }
  } catch (const Error& e) {
    trace.completed = false;
    trace.error = e.what();
  }
  trace.x_final = x;
  return trace;
}

}  // namespace sprox
