#pragma once

// Constraint sets C (g = indicator of C), one per parameter block.

#include <optional>
#include <string>
#include <vector>

#include "sprox/tensor.hpp"

namespace sprox {

enum class SetKind {
  Zero,
  // Vector sets.
  SignSet,
  L2Ball,
  LinfBall,
  LinfSphere,
  HardThreshold,
  // Matrix sets.
  Stiefel,
  FrobeniusBall,
  SpectralBall,
  SpectralSphere,
  RankLimit,
};

std::string to_string(SetKind k);
std::optional<SetKind> set_kind_from_string(const std::string& name);

bool is_matrix_set(SetKind k);
bool is_vector_set(SetKind k);
bool is_convex_set(SetKind k);
// Sets parameterized by a sparsity/rank count instead of a radius.
bool uses_count(SetKind k);

// Matrix set -> the vector set acting on singular values, and back.
SetKind spectral_counterpart(SetKind matrix_kind);
SetKind matrix_counterpart(SetKind vector_kind);

struct BlockConstraint {
  SetKind kind = SetKind::Zero;
  double radius = 1.0;
  Eigen::Index count = 1;

  static BlockConstraint zero() { return {}; }
  static BlockConstraint with_radius(SetKind k, double r) { return {k, r, 1}; }
  static BlockConstraint with_count(SetKind k, Eigen::Index s) { return {k, 1.0, s}; }

  bool operator==(const BlockConstraint&) const = default;
  std::string describe() const;
};

// Throws InvalidSpec when `c` cannot be realized on a block of shape `shape`.
void validate(const BlockConstraint& c, const BlockShape& shape);

class ConstraintSpec {
 public:
  ConstraintSpec(std::vector<BlockShape> shapes, std::vector<BlockConstraint> blocks);

  static ConstraintSpec unconstrained(const std::vector<BlockShape>& shapes);
  // Applies `c` to every block, switching to the vector or matrix
  // counterpart where the block kind requires it.
  static ConstraintSpec uniform(const std::vector<BlockShape>& shapes,
                                const BlockConstraint& c);

  std::size_t num_blocks() const { return blocks_.size(); }
  const BlockConstraint& block(std::size_t i) const { return blocks_[i]; }
  const std::vector<BlockShape>& shapes() const { return shapes_; }
  bool all_zero() const;

 private:
  std::vector<BlockShape> shapes_;
  std::vector<BlockConstraint> blocks_;
};

constexpr double kFeasibilityTol = 1e-9;

bool is_feasible_block(const BlockConstraint& c, const Block& x,
                       double tol = kFeasibilityTol);
bool is_feasible(const ConstraintSpec& spec, const ParamVec& x,
                 double tol = kFeasibilityTol);
// Indicator value: 0 on C (up to tol), +infinity elsewhere.
double indicator_block(const BlockConstraint& c, const Block& x,
                       double tol = kFeasibilityTol);
double indicator(const ConstraintSpec& spec, const ParamVec& x,
                 double tol = kFeasibilityTol);

// Euclidean projection onto the vector set (a nearest point for the
// nonconvex ones, with the same tie-breaking as the anisotropic prox).
Eigen::VectorXd project_vector(const BlockConstraint& c, const Eigen::VectorXd& y);
Block project_block(const BlockConstraint& c, const Block& y);
ParamVec project(const ConstraintSpec& spec, const ParamVec& y);

}  // namespace sprox
