#pragma once

// Block-structured parameter arithmetic.
//
// A ParamVec is a point of a product space E_1 x ... x E_N where every
// factor is either R^n (a Vector block) or R^{m x n} (a Matrix block).
// Vector blocks are stored as n x 1 Eigen matrices so that both kinds share
// one storage type; the kind tag decides which operations are legal.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace sprox {

enum class BlockKind { Vector, Matrix };

struct BlockShape {
  BlockKind kind = BlockKind::Vector;
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;

  Eigen::Index size() const { return rows * cols; }
  bool operator==(const BlockShape&) const = default;
  std::string to_string() const;
};

class Block {
 public:
  // Throws InvalidInput on zero dimensions or non-finite entries.
  static Block vector(Eigen::VectorXd values);
  static Block matrix(Eigen::MatrixXd values);
  static Block zeros(const BlockShape& shape);
  // Rebuilds a block of the given shape from a flat column-major buffer.
  static Block from_flat(const BlockShape& shape, const Eigen::VectorXd& flat);

  BlockKind kind() const { return kind_; }
  bool is_vector() const { return kind_ == BlockKind::Vector; }
  bool is_matrix() const { return kind_ == BlockKind::Matrix; }
  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  Eigen::Index size() const { return values_.size(); }
  BlockShape shape() const { return {kind_, values_.rows(), values_.cols()}; }

  const Eigen::MatrixXd& values() const { return values_; }
  // Column-major flat view (the vector itself for Vector blocks).
  Eigen::Map<const Eigen::VectorXd> flat() const {
    return {values_.data(), values_.size()};
  }
  double frobenius() const { return values_.norm(); }

 private:
  Block(BlockKind kind, Eigen::MatrixXd values);

  BlockKind kind_;
  Eigen::MatrixXd values_;
};

class ParamVec {
 public:
  ParamVec() = default;
  explicit ParamVec(std::vector<Block> blocks);
  ParamVec(std::initializer_list<Block> blocks);

  static ParamVec zeros(const std::vector<BlockShape>& shapes);
  static ParamVec zeros_like(const ParamVec& other);

  std::size_t num_blocks() const { return blocks_.size(); }
  const Block& operator[](std::size_t i) const { return blocks_[i]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::vector<BlockShape> shapes() const;
  Eigen::Index total_size() const;

  // Flattened concatenation of all blocks (column-major within a block).
  Eigen::VectorXd flatten() const;
  static ParamVec unflatten(const std::vector<BlockShape>& shapes,
                            const Eigen::VectorXd& flat);

  bool conformable(const ParamVec& other) const;

 private:
  std::vector<Block> blocks_;
};

// Throws ConformabilityError unless shapes match block by block.
void require_conformable(const ParamVec& x, const ParamVec& y);

// a * x + y.
ParamVec axpy(double a, const ParamVec& x, const ParamVec& y);
ParamVec scale(double a, const ParamVec& x);
double dot(const ParamVec& x, const ParamVec& y);
// Product-space Euclidean norm.
double norm2(const ParamVec& x);
std::vector<double> blockwise_frobenius(const ParamVec& x);
double max_abs_diff(const ParamVec& x, const ParamVec& y);

ParamVec operator+(const ParamVec& x, const ParamVec& y);
ParamVec operator-(const ParamVec& x, const ParamVec& y);
ParamVec operator-(const ParamVec& x);
ParamVec operator*(double a, const ParamVec& x);

// Block-level helpers shared across modules.
Block operator+(const Block& x, const Block& y);
Block operator-(const Block& x, const Block& y);
Block operator*(double a, const Block& x);
void require_same_shape(const Block& x, const Block& y);

}  // namespace sprox
