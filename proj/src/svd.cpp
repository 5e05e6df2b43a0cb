#include "sprox/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sprox/errors.hpp"

namespace sprox {
namespace {

constexpr double kOrthTol = 1e-12;
constexpr int kMaxSweeps = 100;

// Orthonormal columns of `basis` (those marked in `filled`) are extended to
// a full orthonormal basis. Each new column is the standard basis vector
// with the largest residual against the columns so far (lowest index on
// ties), orthogonalized twice.
void complete_basis(Eigen::MatrixXd& basis, const std::vector<bool>& filled) {
  const Eigen::Index m = basis.rows();
  std::vector<Eigen::Index> have;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    if (filled[j]) have.push_back(j);
  }
  auto residual = [&](Eigen::VectorXd v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k : have) v -= basis.col(k).dot(v) * basis.col(k);
    }
    return v;
  };
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    if (filled[j]) continue;
    Eigen::VectorXd best;
    double best_norm = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::VectorXd v = residual(Eigen::VectorXd::Unit(m, i));
      const double nv = v.norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(v);
      }
    }
    if (best_norm < 1e-3) {
      throw NumericalError("svd: failed to complete orthonormal basis");
    }
    best = residual(best / best_norm);
    basis.col(j) = best / best.norm();
    have.push_back(j);
  }
}

// Largest-magnitude entry positive, lowest index wins ties.
bool leading_entry_negative(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best))) best = i;
  }
  return v(best) < 0.0;
}

// Requires rows >= cols.
SvdResult jacobi_tall(const Eigen::MatrixXd& M) {
  const Eigen::Index m = M.rows();
  const Eigen::Index n = M.cols();
  Eigen::MatrixXd A = M;
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  // Columns at rounding level of the input take no part in rotations.
  const double tiny = std::pow(std::numeric_limits<double>::epsilon() * M.norm(), 2);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = A.col(p).squaredNorm();
        const double beta = A.col(q).squaredNorm();
        const double gamma = A.col(p).dot(A.col(q));
        if (gamma == 0.0 || alpha <= tiny || beta <= tiny) continue;
        if (std::abs(gamma) <= kOrthTol * std::sqrt(alpha) * std::sqrt(beta)) {
          continue;
        }
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        Eigen::VectorXd ap = A.col(p);
        A.col(p) = c * ap - s * A.col(q);
        A.col(q) = s * ap + c * A.col(q);
        Eigen::VectorXd vp = V.col(p);
        V.col(p) = c * vp - s * V.col(q);
        V.col(q) = s * vp + c * V.col(q);
      }
    }
  }
  if (!converged) throw NumericalError("svd: Jacobi sweeps did not converge");

  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = A.col(j).norm();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return norms(a) > norms(b);
  });

  SvdResult out;
  out.sigma.resize(n);
  out.U = Eigen::MatrixXd::Zero(m, m);
  out.V.resize(n, n);
  const double smax = n > 0 ? norms(order[0]) : 0.0;
  const double rank_tol = static_cast<double>(std::max(m, n)) *
                          std::numeric_limits<double>::epsilon() * smax;
  std::vector<bool> filled(m, false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[j];
    out.V.col(j) = V.col(src);
    if (norms(src) > rank_tol && norms(src) > 0.0) {
      out.sigma(j) = norms(src);
      out.U.col(j) = A.col(src) / norms(src);
      filled[j] = true;
    } else {
      out.sigma(j) = 0.0;
    }
  }
  complete_basis(out.U, filled);
  return out;
}

void apply_sign_convention(SvdResult& r) {
  const Eigen::Index q = r.sigma.size();
  for (Eigen::Index j = 0; j < r.U.cols(); ++j) {
    if (leading_entry_negative(r.U.col(j))) {
      r.U.col(j) *= -1.0;
      if (j < q) r.V.col(j) *= -1.0;
    }
  }
  for (Eigen::Index j = q; j < r.V.cols(); ++j) {
    if (leading_entry_negative(r.V.col(j))) r.V.col(j) *= -1.0;
  }
}

}  // namespace

SvdResult full_svd(const Eigen::MatrixXd& M) {
  if (M.rows() < 1 || M.cols() < 1) {
    throw InvalidInput("svd: matrix dimensions must be positive");
  }
  if (!M.allFinite()) throw InvalidInput("svd: non-finite input");

  SvdResult r;
  if (M.rows() >= M.cols()) {
    r = jacobi_tall(M);
  } else {
    SvdResult t = jacobi_tall(M.transpose());
    r.U = std::move(t.V);
    r.sigma = std::move(t.sigma);
    r.V = std::move(t.U);
  }
  apply_sign_convention(r);
  return r;
}

ReducedSvd reduced_svd(const SvdResult& svd) {
  Eigen::Index r = 0;
  while (r < svd.sigma.size() && svd.sigma(r) > 0.0) ++r;
  return {svd.U.leftCols(r), svd.sigma.head(r), svd.V.leftCols(r)};
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
  return full_svd(M).sigma;
}

Eigen::MatrixXd compose_svd(const Eigen::MatrixXd& U, const Eigen::VectorXd& diag,
                            const Eigen::MatrixXd& V) {
  const Eigen::Index q = diag.size();
  return U.leftCols(q) * diag.asDiagonal() * V.leftCols(q).transpose();
}

}  // namespace sprox
