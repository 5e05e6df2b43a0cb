#include "sprox/tensor.hpp"

#include <cmath>

#include "sprox/errors.hpp"

namespace sprox {

std::string BlockShape::to_string() const {
  if (kind == BlockKind::Vector) return "vector(" + std::to_string(rows) + ")";
  return "matrix(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

Block::Block(BlockKind kind, Eigen::MatrixXd values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InvalidInput("block dimensions must be positive");
  }
  if (!values_.allFinite()) {
    throw InvalidInput("block entries must be finite");
  }
}

Block Block::vector(Eigen::VectorXd values) {
  return Block(BlockKind::Vector, Eigen::MatrixXd(std::move(values)));
}

Block Block::matrix(Eigen::MatrixXd values) {
  return Block(BlockKind::Matrix, std::move(values));
}

Block Block::zeros(const BlockShape& shape) {
  if (shape.kind == BlockKind::Vector && shape.cols != 1) {
    throw InvalidInput("vector blocks have a single column");
  }
  return Block(shape.kind, Eigen::MatrixXd::Zero(shape.rows, shape.cols));
}

Block Block::from_flat(const BlockShape& shape, const Eigen::VectorXd& flat) {
  if (flat.size() != shape.size()) {
    throw ConformabilityError("flat buffer does not match " +
                              shape.to_string());
  }
  Eigen::MatrixXd m = Eigen::Map<const Eigen::MatrixXd>(flat.data(),
                                                        shape.rows, shape.cols);
  return Block(shape.kind, std::move(m));
}

void require_same_shape(const Block& x, const Block& y) {
  if (x.shape() != y.shape()) {
    throw ConformabilityError("block shape mismatch: " +
                              x.shape().to_string() + " vs " +
                              y.shape().to_string());
  }
}

Block operator+(const Block& x, const Block& y) {
  require_same_shape(x, y);
  Eigen::MatrixXd v = x.values() + y.values();
  return x.is_vector() ? Block::vector(v) : Block::matrix(v);
}

Block operator-(const Block& x, const Block& y) {
  require_same_shape(x, y);
  Eigen::MatrixXd v = x.values() - y.values();
  return x.is_vector() ? Block::vector(v) : Block::matrix(v);
}

Block operator*(double a, const Block& x) {
  Eigen::MatrixXd v = a * x.values();
  return x.is_vector() ? Block::vector(v) : Block::matrix(v);
}

ParamVec::ParamVec(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}

ParamVec::ParamVec(std::initializer_list<Block> blocks) : blocks_(blocks) {}

ParamVec ParamVec::zeros(const std::vector<BlockShape>& shapes) {
  std::vector<Block> blocks;
  blocks.reserve(shapes.size());
  for (const auto& s : shapes) blocks.push_back(Block::zeros(s));
  return ParamVec(std::move(blocks));
}

ParamVec ParamVec::zeros_like(const ParamVec& other) {
  return zeros(other.shapes());
}

std::vector<BlockShape> ParamVec::shapes() const {
  std::vector<BlockShape> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.shape());
  return out;
}

Eigen::Index ParamVec::total_size() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks_) n += b.size();
  return n;
}

Eigen::VectorXd ParamVec::flatten() const {
  Eigen::VectorXd out(total_size());
  Eigen::Index offset = 0;
  for (const auto& b : blocks_) {
    out.segment(offset, b.size()) = b.flat();
    offset += b.size();
  }
  return out;
}

ParamVec ParamVec::unflatten(const std::vector<BlockShape>& shapes,
                             const Eigen::VectorXd& flat) {
  Eigen::Index total = 0;
  for (const auto& s : shapes) total += s.size();
  if (total != flat.size()) {
    throw ConformabilityError("flat buffer length does not match shapes");
  }
  std::vector<Block> blocks;
  Eigen::Index offset = 0;
  for (const auto& s : shapes) {
    blocks.push_back(Block::from_flat(s, flat.segment(offset, s.size())));
    offset += s.size();
  }
  return ParamVec(std::move(blocks));
}

bool ParamVec::conformable(const ParamVec& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].shape() != other.blocks_[i].shape()) return false;
  }
  return true;
}

void require_conformable(const ParamVec& x, const ParamVec& y) {
  if (!x.conformable(y)) {
    throw ConformabilityError("parameter vectors are not conformable");
  }
}

ParamVec axpy(double a, const ParamVec& x, const ParamVec& y) {
  require_conformable(x, y);
  std::vector<Block> out;
  out.reserve(x.num_blocks());
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    out.push_back(a * x[i] + y[i]);
  }
  return ParamVec(std::move(out));
}

ParamVec scale(double a, const ParamVec& x) {
  std::vector<Block> out;
  out.reserve(x.num_blocks());
  for (const auto& b : x.blocks()) out.push_back(a * b);
  return ParamVec(std::move(out));
}

double dot(const ParamVec& x, const ParamVec& y) {
  require_conformable(x, y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    s += x[i].values().cwiseProduct(y[i].values()).sum();
  }
  return s;
}

double norm2(const ParamVec& x) {
  double s = 0.0;
  for (const auto& b : x.blocks()) s += b.values().squaredNorm();
  return std::sqrt(s);
}

std::vector<double> blockwise_frobenius(const ParamVec& x) {
  std::vector<double> out;
  out.reserve(x.num_blocks());
  for (const auto& b : x.blocks()) out.push_back(b.frobenius());
  return out;
}

double max_abs_diff(const ParamVec& x, const ParamVec& y) {
  require_conformable(x, y);
  double m = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) {
    m = std::max(m, (x[i].values() - y[i].values()).cwiseAbs().maxCoeff());
  }
  return m;
}

ParamVec operator+(const ParamVec& x, const ParamVec& y) {
  return axpy(1.0, x, y);
}

ParamVec operator-(const ParamVec& x, const ParamVec& y) {
  return axpy(-1.0, y, x);
}

ParamVec operator-(const ParamVec& x) { return scale(-1.0, x); }

ParamVec operator*(double a, const ParamVec& x) { return scale(a, x); }

}  // namespace sprox
