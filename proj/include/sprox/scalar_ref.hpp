#pragma once

// One-dimensional even reference kernels h and their conjugates.
//
// Barrier(eps):          h(t)   = -eps (ln(1 - |t|) + |t|),  |t| < 1
//                        h*'(s) = s / (eps + |s|)
// HyperKappa(eps,kappa): h*'(s) = s / (eps^kappa + |s|^kappa)^(1/kappa)
//
// Both have dom h = (-1, 1), are eps-strongly convex, and their conjugate
// derivatives are odd, increasing and bounded by 1 in magnitude.

#include <memory>
#include <string>

namespace sprox {

enum class ScalarKind { Barrier, HyperKappa };

class ScalarRef {
 public:
  static ScalarRef barrier(double epsilon);
  static ScalarRef hyper_kappa(double epsilon, double kappa);

  ScalarKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  // Exponent of the HyperKappa family; 1 for Barrier.
  double kappa() const { return kappa_; }
  double mu() const { return epsilon_; }
  std::string describe() const;

  // +infinity for |t| >= 1.
  double h(double t) const;
  // Requires |t| < 1.
  double h_prime(double t) const;
  double h_star(double s) const;
  double h_star_prime(double s) const;

  // Boundary guard for h_prime/grad_phi: inputs with |t| > 1 - kBoundaryMargin
  // are rejected.
  static constexpr double kBoundaryMargin = 1e-12;

  bool operator==(const ScalarRef& o) const {
    return kind_ == o.kind_ && epsilon_ == o.epsilon_ && kappa_ == o.kappa_;
  }

 private:
  ScalarRef(ScalarKind kind, double epsilon, double kappa);

  // Normalized conjugate G(v) = int_0^v w / (1 + w^kappa)^(1/kappa) dw, so
  // that h*(s) = eps * G(|s| / eps).
  double normalized_conjugate(double v) const;
  double h_prime_unchecked(double t) const;

  ScalarKind kind_;
  double epsilon_;
  double kappa_;
  // Split point of normalized_conjugate between direct quadrature and the
  // tail expansion, and the matching constant G(v) = v - c + tail(v).
  double split_ = 0.0;
  double tail_offset_ = 0.0;
};

}  // namespace sprox
