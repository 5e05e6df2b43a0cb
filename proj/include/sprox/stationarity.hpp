#pragma once

// Stationarity measures and the sampled anisotropic-smoothness checker.

#include <random>

#include "sprox/constraint.hpp"
#include "sprox/problems.hpp"
#include "sprox/reference.hpp"

namespace sprox {

struct GapReport {
  double gap_bregman = 0.0;
  double reg_gap = 0.0;
  double envelope_value = 0.0;
};

// D_{phi*}(grad_f, -subgrad_g).
double gap_bregman(const ReferenceFn& ref, const ParamVec& grad_f,
                   const ParamVec& subgrad_g);

// inf_x g(x) + (gamma * phi)((x - y) / gamma), evaluated at the backward
// step's minimizer. +infinity when y lies outside dom g + gamma dom phi.
double aniso_moreau_env(const ConstraintSpec& spec, const ReferenceFn& ref,
                        double gamma, const ParamVec& y);

// (1/gamma) [g(x) + gamma phi(grad phi*(grad_f)) - env(x - gamma grad phi*(grad_f))].
// Throws InvalidInput when x is infeasible.
double regularized_gap(const ConstraintSpec& spec, const ReferenceFn& ref,
                       double gamma, const ParamVec& x, const ParamVec& grad_f);

GapReport gap_report(const ConstraintSpec& spec, const ReferenceFn& ref, double gamma,
                     const ParamVec& x, const ParamVec& grad_f,
                     const ParamVec& subgrad_g);

struct DescentCheck {
  int samples = 0;
  int violations = 0;
  double max_violation = 0.0;
};

// Samples xbar with N(0, scale^2) entries, forms ybar = xbar - (1/L) grad
// phi*(grad f(xbar)) and probes x = ybar + (1/L) z for z across dom phi:
//   f(x) <= f(xbar) + (1/L * phi)(x - ybar) - (1/L * phi)(xbar - ybar).
// Violations count excesses beyond 1e-9 (relative to max(1, |f(xbar)|)).
DescentCheck check_aniso_descent(const Problem& problem, const ReferenceFn& ref,
                                 double L_candidate, int n_samples,
                                 std::mt19937_64& rng, double scale = 1.0);

}  // namespace sprox
