#pragma once

// Synthetic smooth objectives with exact gradients and additive-noise
// stochastic oracles.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sprox/tensor.hpp"

namespace sprox {

class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::vector<BlockShape> shapes() const = 0;
  virtual double value(const ParamVec& x) const = 0;
  virtual ParamVec gradient(const ParamVec& x) const = 0;
  // Lipschitz constant of the gradient.
  virtual double lipschitz() const = 0;
  // A lower bound on inf f, if known.
  virtual std::optional<double> f_star_hint() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

using ProblemPtr = std::shared_ptr<const Problem>;

// f(x) = 0.5 ||A x - b||^2.
class QuadraticProblem : public Problem {
 public:
  QuadraticProblem(Eigen::MatrixXd A, Eigen::VectorXd b);
  std::vector<BlockShape> shapes() const override;
  double value(const ParamVec& x) const override;
  ParamVec gradient(const ParamVec& x) const override;
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> f_star_hint() const override;
  std::string name() const override { return "quadratic"; }

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double lipschitz_;
  std::optional<double> f_star_;
};

// f(w) = (1/N) sum_i log(1 + exp(-y_i <a_i, w>)).
class LogisticProblem : public Problem {
 public:
  LogisticProblem(Eigen::MatrixXd features, Eigen::VectorXd labels);
  std::vector<BlockShape> shapes() const override;
  double value(const ParamVec& x) const override;
  ParamVec gradient(const ParamVec& x) const override;
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> f_star_hint() const override { return 0.0; }
  std::string name() const override { return "logistic"; }

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  double lipschitz_;
};

// f(X) = 0.5 ||A X B - C||_F^2.
class MatrixQuadraticProblem : public Problem {
 public:
  MatrixQuadraticProblem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C);
  std::vector<BlockShape> shapes() const override;
  double value(const ParamVec& x) const override;
  ParamVec gradient(const ParamVec& x) const override;
  double lipschitz() const override { return lipschitz_; }
  std::optional<double> f_star_hint() const override { return 0.0; }
  std::string name() const override { return "matrix_quadratic"; }

 private:
  Eigen::MatrixXd A_, B_, C_;
  double lipschitz_;
};

// Layerwise sum f(x_1, ..., x_N) = sum_i f_i(x_i); each part owns a
// consecutive run of blocks.
class SeparableSum : public Problem {
 public:
  explicit SeparableSum(std::vector<ProblemPtr> parts);
  std::vector<BlockShape> shapes() const override;
  double value(const ParamVec& x) const override;
  ParamVec gradient(const ParamVec& x) const override;
  double lipschitz() const override;
  std::optional<double> f_star_hint() const override;
  std::string name() const override { return "separable_sum"; }

 private:
  std::vector<ParamVec> split(const ParamVec& x) const;
  std::vector<ProblemPtr> parts_;
};

// Eigenvalue layout of A^T A between 1/cond and 1.
//   Log    log-spaced (density ~ 1/lambda)
//   Power  density ~ lambda^-beta; beta = 2 gives harmonic spacing
//          lambda_i = 1 / (1 + (cond - 1) i / (n - 1))
enum class Spectrum { Log, Power };

// Square A with A^T A eigenvalues in [1/cond, 1] (so L = 1) and b = A x_star,
// where x_star has i.i.d. N(0, target_scale^2) entries.
std::shared_ptr<QuadraticProblem> make_quadratic(Eigen::Index n, double cond,
                                                 std::mt19937_64& rng,
                                                 double target_scale = 1.0,
                                                 Spectrum spectrum = Spectrum::Log,
                                                 double beta = 2.0);
// Gaussian design normalized by sqrt(N), labels from a planted separator
// with 10% flips.
std::shared_ptr<LogisticProblem> make_logistic(Eigen::Index n_samples,
                                               Eigen::Index n_features,
                                               std::mt19937_64& rng);
// A (m x m) and B (n x n) random with unit spectral norm, C = A X_star B.
std::shared_ptr<MatrixQuadraticProblem> make_matrix_quadratic(Eigen::Index m,
                                                              Eigen::Index n,
                                                              std::mt19937_64& rng,
                                                              double target_scale = 1.0);

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng);

enum class NoiseKind { None, Gaussian, StudentT };

struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  // Gaussian: per-coordinate standard deviation.
  // StudentT: budget with E||noise||^p <= sigma^p.
  double sigma = 0.0;
  double df = 1.8;
  double p_moment = 2.0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma) { return {NoiseKind::Gaussian, sigma, 0.0, 2.0}; }
  static NoiseModel student_t(double df, double sigma, double p = 1.5);

  // Throws InvalidConfig unless sigma >= 0 and, for StudentT, p < df.
  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

std::string to_string(NoiseKind k);

// E|T|^p for a standard Student t with df degrees of freedom (p < df).
double student_t_abs_moment(double df, double p);
// Per-coordinate scale c with n c^p E|T|^p = sigma^p.
double student_t_scale(const NoiseModel& noise, Eigen::Index total_size);

// Noise realization of sample `token`; independent of x.
ParamVec noise_draw(const NoiseModel& noise, const std::vector<BlockShape>& shapes,
                    std::uint64_t token);
// grad f(x) + noise(token).
ParamVec sample_gradient(const Problem& problem, const ParamVec& x,
                         const NoiseModel& noise, std::uint64_t token);

}  // namespace sprox
