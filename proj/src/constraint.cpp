#include "sprox/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sprox/errors.hpp"
#include "sprox/svd.hpp"

namespace sprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NamedKind {
  SetKind kind;
  const char* name;
};

constexpr NamedKind kNames[] = {
    {SetKind::Zero, "zero"},
    {SetKind::SignSet, "sign"},
    {SetKind::L2Ball, "l2_ball"},
    {SetKind::LinfBall, "linf_ball"},
    {SetKind::LinfSphere, "linf_sphere"},
    {SetKind::HardThreshold, "hard_threshold"},
    {SetKind::Stiefel, "stiefel"},
    {SetKind::FrobeniusBall, "frobenius_ball"},
    {SetKind::SpectralBall, "spectral_ball"},
    {SetKind::SpectralSphere, "spectral_sphere"},
    {SetKind::RankLimit, "rank_limit"},
};

double sign_plus(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Index of the largest |v_i|, lowest index on ties.
Eigen::Index argmax_abs(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  return best;
}

}  // namespace

std::string to_string(SetKind k) {
  for (const auto& n : kNames) {
    if (n.kind == k) return n.name;
  }
  return "unknown";
}

std::optional<SetKind> set_kind_from_string(const std::string& name) {
  for (const auto& n : kNames) {
    if (name == n.name) return n.kind;
  }
  return std::nullopt;
}

bool is_matrix_set(SetKind k) {
  switch (k) {
    case SetKind::Stiefel:
    case SetKind::FrobeniusBall:
    case SetKind::SpectralBall:
    case SetKind::SpectralSphere:
    case SetKind::RankLimit:
      return true;
    default:
      return false;
  }
}

bool is_vector_set(SetKind k) { return k != SetKind::Zero && !is_matrix_set(k); }

bool is_convex_set(SetKind k) {
  switch (k) {
    case SetKind::Zero:
    case SetKind::L2Ball:
    case SetKind::LinfBall:
    case SetKind::FrobeniusBall:
    case SetKind::SpectralBall:
      return true;
    default:
      return false;
  }
}

bool uses_count(SetKind k) {
  return k == SetKind::HardThreshold || k == SetKind::RankLimit;
}

SetKind spectral_counterpart(SetKind k) {
  switch (k) {
    case SetKind::Stiefel: return SetKind::SignSet;
    case SetKind::FrobeniusBall: return SetKind::L2Ball;
    case SetKind::SpectralBall: return SetKind::LinfBall;
    case SetKind::SpectralSphere: return SetKind::LinfSphere;
    case SetKind::RankLimit: return SetKind::HardThreshold;
    default: return k;
  }
}

SetKind matrix_counterpart(SetKind k) {
  switch (k) {
    case SetKind::SignSet: return SetKind::Stiefel;
    case SetKind::L2Ball: return SetKind::FrobeniusBall;
    case SetKind::LinfBall: return SetKind::SpectralBall;
    case SetKind::LinfSphere: return SetKind::SpectralSphere;
    case SetKind::HardThreshold: return SetKind::RankLimit;
    default: return k;
  }
}

std::string BlockConstraint::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind);
  if (kind == SetKind::Zero) return os.str();
  if (uses_count(kind)) {
    os << "(s=" << count << ")";
  } else {
    os << "(r=" << radius << ")";
  }
  return os.str();
}

void validate(const BlockConstraint& c, const BlockShape& shape) {
  if (c.kind == SetKind::Zero) return;
  const bool matrix = shape.kind == BlockKind::Matrix;
  if (matrix && !is_matrix_set(c.kind)) {
    throw InvalidSpec(c.describe() + " is a vector set but the block is " +
                      shape.to_string());
  }
  if (!matrix && !is_vector_set(c.kind)) {
    throw InvalidSpec(c.describe() + " is a matrix set but the block is " +
                      shape.to_string());
  }
  if (uses_count(c.kind)) {
    const Eigen::Index dim =
        matrix ? std::min(shape.rows, shape.cols) : shape.size();
    if (c.count < 1 || c.count > dim) {
      throw InvalidSpec(c.describe() + ": count must lie in [1, " +
                        std::to_string(dim) + "]");
    }
  } else if (!(c.radius > 0.0) || !std::isfinite(c.radius)) {
    throw InvalidSpec(c.describe() + ": radius must be positive and finite");
  }
  if (c.kind == SetKind::Stiefel && shape.cols > shape.rows) {
    throw InvalidSpec("stiefel requires cols <= rows, got " + shape.to_string());
  }
}

ConstraintSpec::ConstraintSpec(std::vector<BlockShape> shapes,
                               std::vector<BlockConstraint> blocks)
    : shapes_(std::move(shapes)), blocks_(std::move(blocks)) {
  if (shapes_.size() != blocks_.size()) {
    throw InvalidSpec("constraint spec needs exactly one tag per block");
  }
  for (std::size_t i = 0; i < shapes_.size(); ++i) validate(blocks_[i], shapes_[i]);
}

ConstraintSpec ConstraintSpec::unconstrained(const std::vector<BlockShape>& shapes) {
  return ConstraintSpec(shapes, std::vector<BlockConstraint>(shapes.size()));
}

ConstraintSpec ConstraintSpec::uniform(const std::vector<BlockShape>& shapes,
                                       const BlockConstraint& c) {
  std::vector<BlockConstraint> blocks;
  for (const auto& s : shapes) {
    BlockConstraint b = c;
    b.kind = s.kind == BlockKind::Matrix ? matrix_counterpart(c.kind)
                                         : spectral_counterpart(c.kind);
    blocks.push_back(b);
  }
  return ConstraintSpec(shapes, std::move(blocks));
}

bool ConstraintSpec::all_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const BlockConstraint& c) { return c.kind == SetKind::Zero; });
}

bool is_feasible_block(const BlockConstraint& c, const Block& x, double tol) {
  const double r = c.radius;
  switch (c.kind) {
    case SetKind::Zero:
      return true;
    case SetKind::SignSet:
      return (x.flat().array().abs() - r).abs().maxCoeff() <= tol;
    case SetKind::L2Ball:
    case SetKind::FrobeniusBall:
      return x.frobenius() <= r + tol;
    case SetKind::LinfBall:
      return x.flat().cwiseAbs().maxCoeff() <= r + tol;
    case SetKind::LinfSphere:
      return std::abs(x.flat().cwiseAbs().maxCoeff() - r) <= tol;
    case SetKind::HardThreshold:
      return (x.flat().array().abs() > tol).count() <= c.count;
    case SetKind::Stiefel: {
      const Eigen::VectorXd s = singular_values(x.values());
      return (s.array() - r).abs().maxCoeff() <= tol;
    }
    case SetKind::SpectralBall:
      return singular_values(x.values())(0) <= r + tol;
    case SetKind::SpectralSphere:
      return std::abs(singular_values(x.values())(0) - r) <= tol;
    case SetKind::RankLimit:
      return (singular_values(x.values()).array() > tol).count() <= c.count;
  }
  return false;
}

bool is_feasible(const ConstraintSpec& spec, const ParamVec& x, double tol) {
  if (x.shapes() != spec.shapes()) {
    throw ConformabilityError("constraint: point does not match the spec's blocks");
  }
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    if (!is_feasible_block(spec.block(i), x[i], tol)) return false;
  }
  return true;
}

double indicator_block(const BlockConstraint& c, const Block& x, double tol) {
  return is_feasible_block(c, x, tol) ? 0.0 : kInf;
}

double indicator(const ConstraintSpec& spec, const ParamVec& x, double tol) {
  return is_feasible(spec, x, tol) ? 0.0 : kInf;
}

Eigen::VectorXd project_vector(const BlockConstraint& c, const Eigen::VectorXd& y) {
  const double r = c.radius;
  const Eigen::Index n = y.size();
  switch (c.kind) {
    case SetKind::Zero:
      return y;
    case SetKind::SignSet:
    case SetKind::Stiefel:
      return y.unaryExpr([r](double v) { return r * sign_plus(v); });
    case SetKind::L2Ball:
    case SetKind::FrobeniusBall: {
      const double norm = y.norm();
      return norm <= r ? Eigen::VectorXd(y) : Eigen::VectorXd((r / norm) * y);
    }
    case SetKind::LinfBall:
    case SetKind::SpectralBall:
      return y.cwiseMax(-r).cwiseMin(r);
    case SetKind::LinfSphere:
    case SetKind::SpectralSphere: {
      Eigen::VectorXd x = y.cwiseMax(-r).cwiseMin(r);
      if (y.cwiseAbs().maxCoeff() < r) {
        const Eigen::Index j = argmax_abs(y);
        x(j) = r * sign_plus(y(j));
      }
      return x;
    }
    case SetKind::HardThreshold:
    case SetKind::RankLimit: {
      std::vector<Eigen::Index> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(y(a)) > std::abs(y(b));
      });
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (Eigen::Index k = 0; k < std::min<Eigen::Index>(c.count, n); ++k) {
        x(idx[k]) = y(idx[k]);
      }
      return x;
    }
  }
  throw InvalidSpec("unknown constraint kind");
}

Block project_block(const BlockConstraint& c, const Block& y) {
  if (c.kind == SetKind::Zero) return y;
  if (y.is_vector()) return Block::vector(project_vector(c, y.flat()));
  const SvdResult svd = full_svd(y.values());
  BlockConstraint vc = c;
  vc.kind = spectral_counterpart(c.kind);
  return Block::matrix(compose_svd(svd.U, project_vector(vc, svd.sigma), svd.V));
}

ParamVec project(const ConstraintSpec& spec, const ParamVec& y) {
  if (y.shapes() != spec.shapes()) {
    throw ConformabilityError("constraint: point does not match the spec's blocks");
  }
  std::vector<Block> out;
  out.reserve(y.num_blocks());
  for (std::size_t i = 0; i < y.num_blocks(); ++i) {
    out.push_back(project_block(spec.block(i), y[i]));
  }
  return ParamVec(std::move(out));
}

}  // namespace sprox
