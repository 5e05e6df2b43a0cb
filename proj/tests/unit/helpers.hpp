#pragma once

#include <initializer_list>

#include <Eigen/Dense>

#include "sprox/tensor.hpp"

namespace testing_helpers {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Eigen::MatrixXd diag(std::initializer_list<double> v) {
  return vec(v).asDiagonal();
}

inline sprox::ParamVec pv(std::initializer_list<double> v) {
  return sprox::ParamVec{sprox::Block::vector(vec(v))};
}

inline sprox::ParamVec pm(const Eigen::MatrixXd& m) {
  return sprox::ParamVec{sprox::Block::matrix(m)};
}

inline double max_abs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testing_helpers
