#include "sprox/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sprox/errors.hpp"
#include "sprox/prox.hpp"

namespace sprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ParamVec gaussian_like(const std::vector<BlockShape>& shapes, double scale,
                       std::mt19937_64& rng) {
  ParamVec z = ParamVec::zeros(shapes);
  std::normal_distribution<double> N(0.0, scale);
  Eigen::VectorXd flat(z.total_size());
  for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) = N(rng);
  return ParamVec::unflatten(shapes, flat);
}

}  // namespace

double gap_bregman(const ReferenceFn& ref, const ParamVec& grad_f,
                   const ParamVec& subgrad_g) {
  return bregman_dual(ref, grad_f, -subgrad_g);
}

double aniso_moreau_env(const ConstraintSpec& spec, const ReferenceFn& ref,
                        double gamma, const ParamVec& y) {
  ParamVec x;
  try {
    x = prox(spec, ref, y, gamma);
  } catch (const NumericalError&) {
    return kInf;
  }
  return prox_objective(spec, ref, x, y, gamma);
}

double regularized_gap(const ConstraintSpec& spec, const ReferenceFn& ref,
                       double gamma, const ParamVec& x, const ParamVec& grad_f) {
  if (!is_feasible(spec, x)) {
    throw InvalidInput("regularized gap: x is not feasible");
  }
  const ParamVec p = precondition(ref, grad_f);
  const double env = aniso_moreau_env(spec, ref, gamma, x - gamma * p);
  return (gamma * phi(ref, p) - env) / gamma;
}

GapReport gap_report(const ConstraintSpec& spec, const ReferenceFn& ref, double gamma,
                     const ParamVec& x, const ParamVec& grad_f,
                     const ParamVec& subgrad_g) {
  GapReport r;
  r.gap_bregman = gap_bregman(ref, grad_f, subgrad_g);
  const ParamVec p = precondition(ref, grad_f);
  r.envelope_value = aniso_moreau_env(spec, ref, gamma, x - gamma * p);
  r.reg_gap = regularized_gap(spec, ref, gamma, x, grad_f);
  return r;
}

DescentCheck check_aniso_descent(const Problem& problem, const ReferenceFn& ref,
                                 double L, int n_samples, std::mt19937_64& rng,
                                 double scale) {
  if (!(L > 0.0)) throw InvalidConfig("descent check: L must be positive");
  const auto shapes = problem.shapes();
  std::uniform_real_distribution<double> spread(-3.0, 3.0);
  DescentCheck out;
  for (int s = 0; s < n_samples; ++s) {
    const ParamVec xbar = gaussian_like(shapes, scale, rng);
    const double fbar = problem.value(xbar);
    const ParamVec pbar = precondition(ref, problem.gradient(xbar));
    const ParamVec ybar = xbar - (1.0 / L) * pbar;
    const double base = phi(ref, pbar) / L;
    // z = grad phi*(w) covers int dom phi as w ranges over the space; the
    // log-uniform magnitude reaches both the center and the boundary.
    const ParamVec w = std::pow(10.0, spread(rng)) * gaussian_like(shapes, 1.0, rng);
    const ParamVec z = precondition(ref, w);
    const ParamVec x = ybar + (1.0 / L) * z;
    const double lhs = problem.value(x);
    const double rhs = fbar + phi(ref, z) / L - base;
    const double excess = lhs - rhs;
    ++out.samples;
    if (excess > 1e-9 * std::max(1.0, std::abs(fbar))) {
      ++out.violations;
      out.max_violation = std::max(out.max_violation, excess);
    }
  }
  return out;
}

}  // namespace sprox
