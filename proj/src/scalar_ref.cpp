#include "sprox/scalar_ref.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "sprox/errors.hpp"

namespace sprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log1p(x) - x without cancellation for small |x|.
double log1p_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    // -x^2/2 + x^3/3 - x^4/4 + ...
    double term = x;
    double sum = 0.0;
    for (int k = 2; k < 30; ++k) {
      term *= -x;
      sum += term / k;
    }
    return sum;
  }
  return std::log1p(x) - x;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

// int_v^inf (1 - (1 + w^-k)^(-1/k)) dw via the binomial series, valid for
// k > 1 and v^-k < 1.
double conjugate_tail(double v, double kappa) {
  const double a = 1.0 / kappa;
  const double x = std::pow(v, -kappa);
  double coef = 1.0;  // (a)_j / j!
  double xp = 1.0;
  double tail = 0.0;
  for (int j = 1; j < 200; ++j) {
    coef *= (a + j - 1) / j;
    xp *= x;
    const double term =
        (j % 2 == 1 ? 1.0 : -1.0) * coef * xp * v / (j * kappa - 1.0);
    tail += term;
    if (std::abs(term) < 1e-18 * std::abs(tail)) break;
  }
  return tail;
}

}  // namespace

ScalarRef::ScalarRef(ScalarKind kind, double epsilon, double kappa)
    : kind_(kind), epsilon_(epsilon), kappa_(kappa) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidConfig("reference epsilon must be positive and finite");
  }
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw InvalidConfig("reference kappa must be >= 1");
  }
  if (kind_ == ScalarKind::HyperKappa && kappa_ > 1.0) {
    // Beyond the split the defect 1 - w/(1+w^k)^(1/k) is expanded in powers
    // of w^-k <= 0.1; the offset matches the two branches at the split.
    split_ = std::pow(10.0, 1.0 / kappa_);
    tail_offset_ = split_ + conjugate_tail(split_, kappa_) -
                   normalized_conjugate(split_);
  }
}

ScalarRef ScalarRef::barrier(double epsilon) {
  return ScalarRef(ScalarKind::Barrier, epsilon, 1.0);
}

ScalarRef ScalarRef::hyper_kappa(double epsilon, double kappa) {
  return ScalarRef(ScalarKind::HyperKappa, epsilon, kappa);
}

std::string ScalarRef::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == ScalarKind::Barrier) {
    os << "barrier(eps=" << epsilon_ << ")";
  } else {
    os << "hyper_kappa(eps=" << epsilon_ << ", kappa=" << kappa_ << ")";
  }
  return os.str();
}

double ScalarRef::normalized_conjugate(double v) const {
  if (v == 0.0) return 0.0;
  if (kappa_ == 1.0) return -log1p_minus_x(v);
  const double k = kappa_;
  // Below w^k = 0.1: binomial series of w (1 + w^k)^(-1/k) integrated
  // termwise. Above w^k = 10: tail expansion. In between, quadrature from
  // the lower switch point, where the integrand is analytic.
  const double low = std::pow(0.1, 1.0 / k);
  auto series = [k](double u) {
    const double x = std::pow(u, k);
    double coef = 1.0;
    double xp = 1.0;
    double sum = 0.5;
    for (int j = 1; j < 200; ++j) {
      coef *= -(1.0 / k + j - 1) / j;
      xp *= x;
      const double term = coef * xp / (j * k + 2.0);
      sum += term;
      if (std::abs(term) < 1e-18 * sum) break;
    }
    return u * u * sum;
  };
  if (v <= low) return series(v);
  if (v <= split_) {
    auto integrand = [k](double w) {
      const double m = std::max(1.0, w);
      const double r = std::min(1.0, w) / m;
      return w / (m * std::pow(1.0 + std::pow(r, k), 1.0 / k));
    };
    // Fixed Gauss-Legendre on geometric panels [a, 1.5 a].
    double sum = series(low);
    for (double a = low; a < v; a *= 1.5) {
      sum += boost::math::quadrature::gauss<double, 30>::integrate(integrand, a,
                                                                   std::min(v, 1.5 * a));
    }
    return sum;
  }
  return v - tail_offset_ + conjugate_tail(v, kappa_);
}

double ScalarRef::h(double t) const {
  const double a = std::abs(t);
  if (!(a < 1.0)) return kInf;
  if (a == 0.0) return 0.0;
  if (kind_ == ScalarKind::Barrier || kappa_ == 1.0) {
    return -epsilon_ * log1p_minus_x(-a);
  }
  // Legendre transform sup_s { s a - h*(s) } attained at s = h'(a).
  const double s = h_prime_unchecked(a);
  return a * s - h_star(s);
}

double ScalarRef::h_prime(double t) const {
  if (std::abs(t) > 1.0 - kBoundaryMargin) {
    throw BoundaryError("reference gradient evaluated within the boundary margin");
  }
  return h_prime_unchecked(t);
}

double ScalarRef::h_prime_unchecked(double t) const {
  const double a = std::abs(t);
  if (a == 0.0) return 0.0;
  if (kind_ == ScalarKind::Barrier || kappa_ == 1.0) {
    return epsilon_ * t / (1.0 - a);
  }
  // 1 - a^kappa computed as -expm1(kappa ln a).
  const double one_minus = -std::expm1(kappa_ * std::log(a));
  return epsilon_ * t / std::pow(one_minus, 1.0 / kappa_);
}

double ScalarRef::h_star(double s) const {
  const double a = std::abs(s);
  if (a == 0.0) return 0.0;
  return epsilon_ * normalized_conjugate(a / epsilon_);
}

double ScalarRef::h_star_prime(double s) const {
  if (s == 0.0) return 0.0;
  const double a = std::abs(s);
  if (kind_ == ScalarKind::Barrier || kappa_ == 1.0) {
    return s / (epsilon_ + a);
  }
  const double m = std::max(epsilon_, a);
  const double r = std::min(epsilon_, a) / m;
  return sign_of(s) * (a / (m * std::pow(1.0 + std::pow(r, kappa_), 1.0 / kappa_)));
}

}  // namespace sprox
