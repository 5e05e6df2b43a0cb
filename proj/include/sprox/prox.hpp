#pragma once

// Anisotropic backward steps  argmin_x g(x) + (gamma * phi)((x - y) / gamma)
// for indicator functions g of the sets in constraint.hpp.

#include "sprox/constraint.hpp"
#include "sprox/reference.hpp"

namespace sprox {

// Vector block under an Aniso or Iso reference.
Eigen::VectorXd prox_vector(const BlockConstraint& c, const BlockRef& ref,
                            const Eigen::VectorXd& y, double gamma);
// Matrix block under a SpectralAniso or SpectralIso reference: the vector
// prox of sigma(Y) reassembled with the singular vectors of Y.
Eigen::MatrixXd prox_matrix(const BlockConstraint& c, const BlockRef& ref,
                            const Eigen::MatrixXd& Y, double gamma);

Block prox_block(const BlockConstraint& c, const BlockRef& ref, const Block& y,
                 double gamma);
ParamVec prox(const ConstraintSpec& spec, const ReferenceFn& ref,
              const ParamVec& y, double gamma);

// g(x) + (gamma * phi)((x - y) / gamma); +infinity when either term is.
double prox_objective_block(const BlockConstraint& c, const BlockRef& ref,
                            const Block& x, const Block& y, double gamma);
double prox_objective(const ConstraintSpec& spec, const ReferenceFn& ref,
                      const ParamVec& x, const ParamVec& y, double gamma);

// -grad phi((x_next - y) / gamma), the subgradient of g at x_next picked
// out by the backward step.
ParamVec recover_subgradient(const ParamVec& x_next, const ParamVec& y,
                             double gamma, const ReferenceFn& ref);

// Scalar solution of the l2-ball stationarity condition for one coordinate
// with multiplier lambda: x(lambda) in [0, |y|] with sign(y).
double l2_ball_coordinate(const ScalarRef& h, double y, double gamma, double lambda);

}  // namespace sprox
