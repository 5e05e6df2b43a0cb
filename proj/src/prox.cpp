#include "sprox/prox.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sprox/errors.hpp"
#include "sprox/svd.hpp"

namespace sprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kBisectionIters = 200;
constexpr int kMaxBracketDoublings = 1100;

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidConfig("prox: step size must be positive and finite");
  }
}

Eigen::VectorXd l2_ball_point(const ScalarRef& h, const Eigen::VectorXd& y,
                              double gamma, double lambda) {
  Eigen::VectorXd x(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    x(i) = l2_ball_coordinate(h, y(i), gamma, lambda);
  }
  return x;
}

// Aniso prox onto {||x|| <= r}: x_i(lambda) solves the coordinate
// stationarity condition; ||x(lambda)|| decreases in lambda, so bisect.
Eigen::VectorXd aniso_l2_ball(const ScalarRef& h, const Eigen::VectorXd& y,
                              double gamma, double r) {
  const double r2 = r * r;
  if (y.squaredNorm() <= r2) return y;
  auto residual = [&](double lambda) {
    return l2_ball_point(h, y, gamma, lambda).squaredNorm() - r2;
  };

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (residual(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxBracketDoublings || !std::isfinite(hi)) {
      std::ostringstream os;
      os << "l2-ball prox: no multiplier brackets the radius (r=" << r
         << ", gamma=" << gamma << ", ||y||=" << y.norm()
         << "); the ball does not meet y + gamma * dom phi";
      throw NumericalError(os.str());
    }
  }

  for (int it = 0; it < kBisectionIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double res = residual(mid);
    if (std::abs(res) <= 1e-12 * r2) return l2_ball_point(h, y, gamma, mid);
    (res > 0.0 ? lo : hi) = mid;
  }
  // Bracket collapsed to adjacent doubles: take the feasible end.
  const double res_hi = residual(hi);
  if (std::abs(res_hi) <= 1e-10 * r2 || (lo == 0.0 && hi == 0.0)) {
    return l2_ball_point(h, y, gamma, hi);
  }
  std::ostringstream os;
  os << "l2-ball prox: bisection stalled with residual " << res_hi
     << " on [" << lo << ", " << hi << "]";
  throw NumericalError(os.str());
}

// Componentwise minimizer for separable references. Every vector set of
// the table decouples into a coordinate rule except the l2 ball.
Eigen::VectorXd aniso_prox(const BlockConstraint& c, const ScalarRef& h,
                           const Eigen::VectorXd& y, double gamma) {
  switch (c.kind) {
    case SetKind::L2Ball:
    case SetKind::FrobeniusBall:
      return aniso_l2_ball(h, y, gamma, c.radius);
    default:
      // Since h is even and increasing in |t|, the sign, clip, sphere-lift
      // and top-s rules minimize each coordinate's cost exactly as the
      // Euclidean distance does.
      return project_vector(c, y);
  }
}

}  // namespace

double l2_ball_coordinate(const ScalarRef& h, double y, double gamma, double lambda) {
  const double a = std::abs(y);
  if (a == 0.0) return 0.0;
  if (lambda == 0.0) return y;
  const double s = y < 0.0 ? -1.0 : 1.0;
  if (h.kind() == ScalarKind::Barrier || h.kappa() == 1.0) {
    // 2 lambda x^2 + (eps + 2 lambda gamma - 2 lambda |y|) x - eps |y| = 0,
    // positive root in the cancellation-free form.
    const double eps = h.epsilon();
    const double b = eps + 2.0 * lambda * gamma - 2.0 * lambda * a;
    const double disc = std::sqrt(b * b + 8.0 * lambda * eps * a);
    const double x = b > 0.0 ? 2.0 * eps * a / (b + disc) : (disc - b) / (4.0 * lambda);
    return s * std::min(x, a);
  }
  // x + gamma h*'(2 lambda x) = |y| on [0, |y|]; left side increasing.
  auto f = [&](double x) { return x + gamma * h.h_star_prime(2.0 * lambda * x) - a; };
  const double f_hi = f(a);
  if (f_hi <= 0.0) return s * a;
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      f, 0.0, a, -a, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return s * 0.5 * (root.first + root.second);
}

Eigen::VectorXd prox_vector(const BlockConstraint& c, const BlockRef& ref,
                            const Eigen::VectorXd& y, double gamma) {
  require_gamma(gamma);
  if (!y.allFinite()) throw InvalidInput("prox: non-finite input");
  if (c.kind == SetKind::Zero) return y;
  if (uses_count(c.kind) && (c.count < 1 || c.count > y.size())) {
    throw InvalidSpec(c.describe() + ": count exceeds the dimension " + std::to_string(y.size()));
  }
  if (!uses_count(c.kind) && !(c.radius > 0.0 && std::isfinite(c.radius))) {
    throw InvalidSpec(c.describe() + ": radius must be positive and finite");
  }
  switch (ref.structure) {
    case Structure::Iso:
    case Structure::SpectralIso:
      return project_vector(c, y);
    case Structure::Aniso:
    case Structure::SpectralAniso:
      return aniso_prox(c, ref.scalar, y, gamma);
  }
  throw InvalidConfig("unknown structure");
}

Eigen::MatrixXd prox_matrix(const BlockConstraint& c, const BlockRef& ref,
                            const Eigen::MatrixXd& Y, double gamma) {
  require_gamma(gamma);
  if (c.kind == SetKind::Zero) return Y;
  if (!is_matrix_set(c.kind)) {
    throw InvalidSpec(c.describe() + " is not a matrix set");
  }
  if (c.kind == SetKind::Stiefel && Y.cols() > Y.rows()) {
    throw InvalidSpec("stiefel requires cols <= rows");
  }
  const SvdResult svd = full_svd(Y);
  BlockConstraint vc = c;
  vc.kind = spectral_counterpart(c.kind);
  const Eigen::VectorXd x = prox_vector(vc, ref, svd.sigma, gamma);
  return compose_svd(svd.U, x, svd.V);
}

Block prox_block(const BlockConstraint& c, const BlockRef& ref, const Block& y,
                 double gamma) {
  validate(c, y.shape());
  if (y.is_vector()) {
    if (is_spectral(ref.structure)) {
      throw InvalidConfig("prox: spectral reference on a vector block");
    }
    return Block::vector(prox_vector(c, ref, y.flat(), gamma));
  }
  if (!is_spectral(ref.structure)) {
    throw InvalidConfig("prox: non-spectral reference on a matrix block");
  }
  return Block::matrix(prox_matrix(c, ref, y.values(), gamma));
}

ParamVec prox(const ConstraintSpec& spec, const ReferenceFn& ref,
              const ParamVec& y, double gamma) {
  ref.require_matches(y);
  if (spec.shapes() != ref.shapes()) {
    throw ConformabilityError("prox: constraint and reference block layouts differ");
  }
  std::vector<Block> out;
  out.reserve(y.num_blocks());
  for (std::size_t i = 0; i < y.num_blocks(); ++i) {
    out.push_back(prox_block(spec.block(i), ref.block(i), y[i], gamma));
  }
  return ParamVec(std::move(out));
}

double prox_objective_block(const BlockConstraint& c, const BlockRef& ref,
                            const Block& x, const Block& y, double gamma) {
  require_gamma(gamma);
  const double g = indicator_block(c, x);
  if (std::isinf(g)) return kInf;
  return g + episcaled_phi_block(ref, gamma, x - y);
}

double prox_objective(const ConstraintSpec& spec, const ReferenceFn& ref,
                      const ParamVec& x, const ParamVec& y, double gamma) {
  require_gamma(gamma);
  const double g = indicator(spec, x);
  if (std::isinf(g)) return kInf;
  return g + episcaled_phi(ref, gamma, x - y);
}

ParamVec recover_subgradient(const ParamVec& x_next, const ParamVec& y,
                             double gamma, const ReferenceFn& ref) {
  require_gamma(gamma);
  require_conformable(x_next, y);
  ref.require_matches(x_next);
  std::vector<Block> out;
  out.reserve(y.num_blocks());
  for (std::size_t i = 0; i < y.num_blocks(); ++i) {
    const Block z = clamp_to_interior(ref.block(i), (1.0 / gamma) * (x_next[i] - y[i]));
    out.push_back(-1.0 * grad_phi_block(ref.block(i), z));
  }
  return ParamVec(std::move(out));
}

}  // namespace sprox
