#include "oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sprox/errors.hpp"
#include "sprox/problems.hpp"

namespace sprox::oracle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Separable cost sum_i c_i(x_i) with per-coordinate admissible intervals.
struct Separable {
  std::function<double(Eigen::Index, double)> cost;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// min of c_i on [a, b] intersected with the admissible interval.
double coord_min(const Separable& s, Eigen::Index i, double a, double b, double* arg) {
  a = std::max(a, s.lo(i));
  b = std::min(b, s.hi(i));
  if (a > b) {
    if (arg) *arg = std::numeric_limits<double>::quiet_NaN();
    return kInf;
  }
  return minimize_1d([&](double x) { return s.cost(i, x); }, a, b, arg);
}

VectorOptimum separable_min(const BlockConstraint& c, const Separable& s, Eigen::Index n) {
  const double r = c.radius;
  VectorOptimum best;
  best.x = Eigen::VectorXd::Zero(n);
  best.value = kInf;

  switch (spectral_counterpart(c.kind)) {
    case SetKind::Zero: {
      best.value = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        best.value += coord_min(s, i, -kInf, kInf, &best.x(i));
      }
      return best;
    }
    case SetKind::LinfBall: {
      best.value = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) best.value += coord_min(s, i, -r, r, &best.x(i));
      return best;
    }
    case SetKind::SignSet: {
      for (long mask = 0; mask < (1L << n); ++mask) {
        Eigen::VectorXd x(n);
        double v = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          x(i) = (mask >> i) & 1 ? -r : r;
          v += x(i) >= s.lo(i) && x(i) <= s.hi(i) ? s.cost(i, x(i)) : kInf;
        }
        if (v < best.value) best = {x, v};
      }
      return best;
    }
    case SetKind::LinfSphere: {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (double sg : {1.0, -1.0}) {
          Eigen::VectorXd x(n);
          double v = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) {
              x(i) = sg * r;
              v += x(i) >= s.lo(i) && x(i) <= s.hi(i) ? s.cost(i, x(i)) : kInf;
            } else {
              v += coord_min(s, i, -r, r, &x(i));
            }
          }
          if (v < best.value) best = {x, v};
        }
      }
      return best;
    }
    case SetKind::HardThreshold: {
      std::vector<int> pick(n, 0);
      std::fill(pick.end() - c.count, pick.end(), 1);
      do {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        double v = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (pick[i]) {
            v += coord_min(s, i, -kInf, kInf, &x(i));
          } else {
            v += 0.0 >= s.lo(i) && 0.0 <= s.hi(i) ? s.cost(i, 0.0) : kInf;
          }
        }
        if (v < best.value) best = {x, v};
      } while (std::next_permutation(pick.begin(), pick.end()));
      return best;
    }
    case SetKind::L2Ball: {
      Eigen::VectorXd x(n);
      double free = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) free += coord_min(s, i, -kInf, kInf, &x(i));
      if (x.norm() <= r) return {x, free};
      // Dual: q(lambda) = sum_i min_x c_i(x) + lambda x^2 - lambda r^2,
      // concave, maximized where the inner minimizers hit the sphere.
      auto inner = [&](double lambda, Eigen::VectorXd* arg) {
        double v = -lambda * r * r;
        for (Eigen::Index i = 0; i < n; ++i) {
          double xi = 0.0;
          v += minimize_1d([&](double t) { return s.cost(i, t) + lambda * t * t; },
                           s.lo(i), s.hi(i), &xi);
          if (arg) (*arg)(i) = xi;
        }
        return v;
      };
      double hi = 1.0;
      Eigen::VectorXd xl(n);
      for (int k = 0; k < 200; ++k) {
        inner(hi, &xl);
        if (xl.norm() < r) break;
        hi *= 2.0;
      }
      double lambda = 0.0;
      minimize_1d([&](double l) { return -inner(l, nullptr); }, 0.0, hi, &lambda);
      best.value = inner(lambda, &best.x);
      return best;
    }
    default:
      throw InvalidSpec("oracle: unsupported set");
  }
}

}  // namespace

double minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                   double* argmin) {
  double bx = lo;
  double bv = f(lo);
  const double vh = f(hi);
  if (vh < bv) {
    bx = hi;
    bv = vh;
  }
  if (hi > lo) {
    std::uintmax_t iters = 500;
    const auto r = boost::math::tools::brent_find_minima(
        f, lo, hi, std::numeric_limits<double>::digits, iters);
    if (r.second < bv) {
      bx = r.first;
      bv = r.second;
    }
  }
  if (argmin) *argmin = bx;
  return bv;
}

VectorOptimum vector_prox(const BlockConstraint& c, const BlockRef& ref,
                          const Eigen::VectorXd& y, double gamma) {
  const Eigen::Index n = y.size();
  const ScalarRef& h = ref.scalar;
  Separable s;
  s.lo.resize(n);
  s.hi.resize(n);
  const bool iso = ref.structure == Structure::Iso || ref.structure == Structure::SpectralIso;
  if (iso) {
    const double w = y.cwiseAbs().maxCoeff() + c.radius + 10.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      s.lo(i) = y(i) - w;
      s.hi(i) = y(i) + w;
    }
    s.cost = [&](Eigen::Index i, double x) { return (x - y(i)) * (x - y(i)); };
    VectorOptimum o = separable_min(c, s, n);
    const double dist = std::sqrt(o.value);
    o.value = gamma * h.h(dist / gamma);
    return o;
  }
  const double inner = gamma * (1.0 - 1e-15);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.lo(i) = y(i) - inner;
    s.hi(i) = y(i) + inner;
  }
  s.cost = [&](Eigen::Index i, double x) { return gamma * h.h((x - y(i)) / gamma); };
  return separable_min(c, s, n);
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& S0) {
  Eigen::MatrixXd S = 0.5 * (S0 + S0.transpose());
  const Eigen::Index n = S.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += S(p, q) * S(p, q);
    }
    if (off <= 1e-30 * std::max(1.0, S.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (S(p, q) == 0.0) continue;
        const double theta = (S(q, q) - S(p, p)) / (2.0 * S(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double skp = S(k, p), skq = S(k, q);
          S(k, p) = c * skp - sn * skq;
          S(k, q) = sn * skp + c * skq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double spk = S(p, k), sqk = S(q, k);
          S(p, k) = c * spk - sn * sqk;
          S(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  Eigen::VectorXd ev = S.diagonal();
  std::sort(ev.data(), ev.data() + n, std::greater<double>());
  return ev;
}

namespace {

// Adaptive bisection comparing 20- and 30-point Gauss-Legendre rules.
double integrate(const std::function<double(double)>& f, double a, double b, int depth = 0) {
  using boost::math::quadrature::gauss;
  const double coarse = gauss<double, 20>::integrate(f, a, b);
  const double fine = gauss<double, 30>::integrate(f, a, b);
  if (std::abs(fine - coarse) <= 1e-15 * std::max(std::abs(fine), 1e-300) || depth >= 40) {
    return fine;
  }
  const double m = 0.5 * (a + b);
  return integrate(f, a, m, depth + 1) + integrate(f, m, b, depth + 1);
}

}  // namespace

double h_by_quadrature(const ScalarRef& h, double t) {
  const double a = std::abs(t);
  if (a == 0.0) return 0.0;
  return integrate([&](double u) { return h.h_prime(u); }, 0.0, a);
}

double h_star_by_quadrature(const ScalarRef& h, double s) {
  const double a = std::abs(s);
  if (a == 0.0) return 0.0;
  return integrate([&](double u) { return h.h_star_prime(u); }, 0.0, a);
}

Eigen::MatrixXd gaussian(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd M(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) M(i, j) = N(rng);
  }
  return M;
}

Eigen::VectorXd sample_feasible_vector(const BlockConstraint& c, Eigen::Index n,
                                       std::mt19937_64& rng) {
  const double r = c.radius;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  switch (c.kind) {
    case SetKind::SignSet: {
      Eigen::VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = U(rng) < 0.5 ? -r : r;
      return x;
    }
    case SetKind::L2Ball: {
      Eigen::VectorXd g = gaussian(n, 1, rng).col(0);
      return g.normalized() * r * std::pow(U(rng), 1.0 / static_cast<double>(n));
    }
    case SetKind::LinfBall:
    case SetKind::LinfSphere: {
      Eigen::VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = r * (2.0 * U(rng) - 1.0);
      if (c.kind == SetKind::LinfSphere) {
        const auto j = static_cast<Eigen::Index>(U(rng) * n) % n;
        x(j) = U(rng) < 0.5 ? -r : r;
      }
      return x;
    }
    case SetKind::HardThreshold: {
      Eigen::VectorXd x = gaussian(n, 1, rng).col(0);
      std::vector<Eigen::Index> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      for (Eigen::Index k = c.count; k < n; ++k) x(idx[k]) = 0.0;
      return x;
    }
    default:
      return gaussian(n, 1, rng).col(0);
  }
}

Eigen::MatrixXd sample_feasible_matrix(const BlockConstraint& c, Eigen::Index m,
                                       Eigen::Index n, std::mt19937_64& rng) {
  const double r = c.radius;
  const Eigen::Index q = std::min(m, n);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Eigen::MatrixXd P = random_orthogonal(m, rng);
  const Eigen::MatrixXd Q = random_orthogonal(n, rng);
  Eigen::VectorXd sigma(q);
  switch (c.kind) {
    case SetKind::Stiefel:
      sigma.setConstant(r);
      break;
    case SetKind::FrobeniusBall: {
      const Eigen::MatrixXd G = gaussian(m, n, rng);
      return G / G.norm() * r * std::pow(U(rng), 1.0 / static_cast<double>(m * n));
    }
    case SetKind::SpectralBall:
    case SetKind::SpectralSphere:
      for (Eigen::Index i = 0; i < q; ++i) sigma(i) = r * U(rng);
      if (c.kind == SetKind::SpectralSphere) sigma(0) = r;
      break;
    case SetKind::RankLimit:
      for (Eigen::Index i = 0; i < q; ++i) sigma(i) = i < c.count ? 2.0 * U(rng) : 0.0;
      break;
    default:
      return gaussian(m, n, rng);
  }
  return P.leftCols(q) * sigma.asDiagonal() * Q.leftCols(q).transpose();
}

Block sample_feasible_block(const BlockConstraint& c, const BlockShape& shape,
                            std::mt19937_64& rng) {
  if (shape.kind == BlockKind::Vector) {
    return Block::vector(sample_feasible_vector(c, shape.rows, rng));
  }
  return Block::matrix(sample_feasible_matrix(c, shape.rows, shape.cols, rng));
}

ProxInstance random_instance(const BlockConstraint& c, const BlockRef& ref,
                             const BlockShape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Block x = sample_feasible_block(c, shape, rng);
  const double gamma = std::pow(10.0, -1.0 + 1.3 * U(rng));
  const double scale = std::pow(10.0, -1.0 + 2.5 * U(rng));
  const Block d = shape.kind == BlockKind::Vector
                      ? Block::vector(scale * gaussian(shape.rows, 1, rng).col(0))
                      : Block::matrix(scale * gaussian(shape.rows, shape.cols, rng));
  return {x - gamma * precondition_block(ref, d), gamma};
}

BlockConstraint random_constraint(SetKind k, const BlockShape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Eigen::Index dim =
      shape.kind == BlockKind::Matrix ? std::min(shape.rows, shape.cols) : shape.size();
  BlockConstraint c;
  c.kind = k;
  c.radius = 0.5 + 1.5 * U(rng);
  c.count = 1 + static_cast<Eigen::Index>(U(rng) * dim) % dim;
  return c;
}

}  // namespace sprox::oracle
