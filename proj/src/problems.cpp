#include "sprox/problems.hpp"

#include <algorithm>
#include <cmath>

#include "sprox/errors.hpp"
#include "sprox/svd.hpp"

namespace sprox {
namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd M(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) M(i, j) = N(rng);
  }
  return M;
}

double spectral_norm(const Eigen::MatrixXd& M) { return singular_values(M)(0); }

const Eigen::MatrixXd& single_block(const ParamVec& x, const BlockShape& shape) {
  if (x.num_blocks() != 1 || x[0].shape() != shape) {
    throw ConformabilityError("problem expects a single block " + shape.to_string());
  }
  return x[0].values();
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  const Eigen::MatrixXd G = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw ConformabilityError("quadratic: A and b disagree");
  if (!A_.allFinite() || !b_.allFinite()) throw InvalidInput("quadratic: non-finite data");
  const Eigen::VectorXd s = singular_values(A_);
  lipschitz_ = s(0) * s(0);
  // Residual of the least-squares fit gives inf f exactly.
  const Eigen::VectorXd xs = A_.completeOrthogonalDecomposition().solve(b_);
  f_star_ = 0.5 * (A_ * xs - b_).squaredNorm();
}

std::vector<BlockShape> QuadraticProblem::shapes() const {
  return {{BlockKind::Vector, A_.cols(), 1}};
}

double QuadraticProblem::value(const ParamVec& x) const {
  const auto& v = single_block(x, shapes()[0]);
  return 0.5 * (A_ * v.col(0) - b_).squaredNorm();
}

ParamVec QuadraticProblem::gradient(const ParamVec& x) const {
  const auto& v = single_block(x, shapes()[0]);
  return ParamVec{Block::vector(A_.transpose() * (A_ * v.col(0) - b_))};
}

std::optional<double> QuadraticProblem::f_star_hint() const { return f_star_; }

LogisticProblem::LogisticProblem(Eigen::MatrixXd features, Eigen::VectorXd labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size()) {
    throw ConformabilityError("logistic: features and labels disagree");
  }
  const double s = spectral_norm(features_);
  lipschitz_ = s * s / (4.0 * static_cast<double>(features_.rows()));
}

std::vector<BlockShape> LogisticProblem::shapes() const {
  return {{BlockKind::Vector, features_.cols(), 1}};
}

double LogisticProblem::value(const ParamVec& x) const {
  const auto& w = single_block(x, shapes()[0]);
  const Eigen::VectorXd margins = features_ * w.col(0);
  double s = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) s += softplus(-labels_(i) * margins(i));
  return s / static_cast<double>(margins.size());
}

ParamVec LogisticProblem::gradient(const ParamVec& x) const {
  const auto& w = single_block(x, shapes()[0]);
  const Eigen::VectorXd margins = features_ * w.col(0);
  Eigen::VectorXd coef(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    coef(i) = -labels_(i) * sigmoid(-labels_(i) * margins(i));
  }
  return ParamVec{Block::vector(features_.transpose() * coef /
                                static_cast<double>(margins.size()))};
}

MatrixQuadraticProblem::MatrixQuadraticProblem(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                               Eigen::MatrixXd C)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
  if (A_.rows() != C_.rows() || B_.cols() != C_.cols()) {
    throw ConformabilityError("matrix quadratic: A X B and C disagree");
  }
  const double a = spectral_norm(A_);
  const double b = spectral_norm(B_);
  lipschitz_ = a * a * b * b;
}

std::vector<BlockShape> MatrixQuadraticProblem::shapes() const {
  return {{BlockKind::Matrix, A_.cols(), B_.rows()}};
}

double MatrixQuadraticProblem::value(const ParamVec& x) const {
  const auto& X = single_block(x, shapes()[0]);
  return 0.5 * (A_ * X * B_ - C_).squaredNorm();
}

ParamVec MatrixQuadraticProblem::gradient(const ParamVec& x) const {
  const auto& X = single_block(x, shapes()[0]);
  return ParamVec{Block::matrix(A_.transpose() * (A_ * X * B_ - C_) * B_.transpose())};
}

SeparableSum::SeparableSum(std::vector<ProblemPtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw InvalidConfig("separable sum needs at least one part");
}

std::vector<BlockShape> SeparableSum::shapes() const {
  std::vector<BlockShape> out;
  for (const auto& p : parts_) {
    const auto s = p->shapes();
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<ParamVec> SeparableSum::split(const ParamVec& x) const {
  if (x.shapes() != shapes()) throw ConformabilityError("separable sum: block layout");
  std::vector<ParamVec> out;
  std::size_t at = 0;
  for (const auto& p : parts_) {
    const std::size_t n = p->shapes().size();
    out.emplace_back(std::vector<Block>(x.blocks().begin() + at,
                                        x.blocks().begin() + at + n));
    at += n;
  }
  return out;
}

double SeparableSum::value(const ParamVec& x) const {
  const auto pieces = split(x);
  double s = 0.0;
  for (std::size_t i = 0; i < parts_.size(); ++i) s += parts_[i]->value(pieces[i]);
  return s;
}

ParamVec SeparableSum::gradient(const ParamVec& x) const {
  const auto pieces = split(x);
  std::vector<Block> out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const ParamVec g = parts_[i]->gradient(pieces[i]);
    out.insert(out.end(), g.blocks().begin(), g.blocks().end());
  }
  return ParamVec(std::move(out));
}

double SeparableSum::lipschitz() const {
  double L = 0.0;
  for (const auto& p : parts_) L = std::max(L, p->lipschitz());
  return L;
}

std::optional<double> SeparableSum::f_star_hint() const {
  double s = 0.0;
  for (const auto& p : parts_) {
    const auto h = p->f_star_hint();
    if (!h) return std::nullopt;
    s += *h;
  }
  return s;
}

std::shared_ptr<QuadraticProblem> make_quadratic(Eigen::Index n, double cond,
                                                 std::mt19937_64& rng,
                                                 double target_scale,
                                                 Spectrum spectrum, double beta) {
  if (n < 1) throw InvalidConfig("quadratic: dimension must be >= 1");
  if (!(cond >= 1.0)) throw InvalidConfig("quadratic: condition number must be >= 1");
  Eigen::VectorXd s(n);
  const double smin = 1.0 / std::sqrt(cond);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    if (spectrum == Spectrum::Log || beta == 1.0) {
      s(i) = std::pow(smin, w);
    } else {
      const double q = beta - 1.0;
      s(i) = std::pow(1.0 + (std::pow(cond, q) - 1.0) * w, -0.5 / q);
    }
  }
  const Eigen::MatrixXd U = random_orthogonal(n, rng);
  const Eigen::MatrixXd V = random_orthogonal(n, rng);
  Eigen::MatrixXd A = U * s.asDiagonal() * V.transpose();
  std::normal_distribution<double> N(0.0, target_scale);
  Eigen::VectorXd xs(n);
  for (Eigen::Index i = 0; i < n; ++i) xs(i) = N(rng);
  Eigen::VectorXd b = A * xs;
  return std::make_shared<QuadraticProblem>(std::move(A), std::move(b));
}

std::shared_ptr<LogisticProblem> make_logistic(Eigen::Index n_samples,
                                               Eigen::Index n_features,
                                               std::mt19937_64& rng) {
  if (n_samples < 1 || n_features < 1) throw InvalidConfig("logistic: dims must be >= 1");
  Eigen::MatrixXd X = gaussian_matrix(n_samples, n_features, rng) /
                      std::sqrt(static_cast<double>(n_features));
  const Eigen::VectorXd w = gaussian_matrix(n_features, 1, rng).col(0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Eigen::VectorXd y(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    y(i) = X.row(i).dot(w) >= 0.0 ? 1.0 : -1.0;
    if (U(rng) < 0.1) y(i) = -y(i);
  }
  return std::make_shared<LogisticProblem>(std::move(X), std::move(y));
}

std::shared_ptr<MatrixQuadraticProblem> make_matrix_quadratic(Eigen::Index m,
                                                              Eigen::Index n,
                                                              std::mt19937_64& rng,
                                                              double target_scale) {
  if (m < 1 || n < 1) throw InvalidConfig("matrix quadratic: dims must be >= 1");
  Eigen::MatrixXd A = gaussian_matrix(m, m, rng);
  Eigen::MatrixXd B = gaussian_matrix(n, n, rng);
  A /= spectral_norm(A);
  B /= spectral_norm(B);
  const Eigen::MatrixXd Xs = target_scale * gaussian_matrix(m, n, rng);
  Eigen::MatrixXd C = A * Xs * B;
  return std::make_shared<MatrixQuadraticProblem>(std::move(A), std::move(B), std::move(C));
}

NoiseModel NoiseModel::student_t(double df, double sigma, double p) {
  NoiseModel m{NoiseKind::StudentT, sigma, df, p};
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidConfig("noise sigma must be nonnegative and finite");
  }
  if (kind == NoiseKind::StudentT) {
    if (!(p_moment > 1.0 && p_moment <= 2.0)) {
      throw InvalidConfig("noise p must lie in (1, 2]");
    }
    if (!(df > p_moment) || !std::isfinite(df)) {
      throw InvalidConfig("student-t degrees of freedom must exceed p");
    }
  }
}

std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::StudentT: return "student_t";
  }
  return "unknown";
}

double student_t_abs_moment(double df, double p) {
  if (!(p < df)) throw InvalidConfig("student-t moment requires p < df");
  const double pi = 3.14159265358979323846;
  return std::exp(0.5 * p * std::log(df) + std::lgamma(0.5 * (p + 1.0)) +
                  std::lgamma(0.5 * (df - p)) - 0.5 * std::log(pi) -
                  std::lgamma(0.5 * df));
}

double student_t_scale(const NoiseModel& noise, Eigen::Index total_size) {
  // ||z||_2^p <= ||z||_p^p for p <= 2, so n c^p E|T|^p = sigma^p suffices.
  const double m = student_t_abs_moment(noise.df, noise.p_moment);
  return noise.sigma /
         std::pow(static_cast<double>(total_size) * m, 1.0 / noise.p_moment);
}

ParamVec noise_draw(const NoiseModel& noise, const std::vector<BlockShape>& shapes,
                    std::uint64_t token) {
  noise.validate();
  ParamVec zero = ParamVec::zeros(shapes);
  if (noise.kind == NoiseKind::None || noise.sigma == 0.0) return zero;
  std::seed_seq seq{static_cast<std::uint32_t>(token),
                    static_cast<std::uint32_t>(token >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  const Eigen::Index n = zero.total_size();
  Eigen::VectorXd flat(n);
  if (noise.kind == NoiseKind::Gaussian) {
    std::normal_distribution<double> N(0.0, noise.sigma);
    for (Eigen::Index i = 0; i < n; ++i) flat(i) = N(rng);
  } else {
    const double c = student_t_scale(noise, n);
    std::student_t_distribution<double> T(noise.df);
    for (Eigen::Index i = 0; i < n; ++i) flat(i) = c * T(rng);
  }
  return ParamVec::unflatten(shapes, flat);
}

ParamVec sample_gradient(const Problem& problem, const ParamVec& x,
                         const NoiseModel& noise, std::uint64_t token) {
  ParamVec g = problem.gradient(x);
  if (noise.kind == NoiseKind::None || noise.sigma == 0.0) return g;
  return g + noise_draw(noise, x.shapes(), token);
}

}  // namespace sprox
