#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sprox/errors.hpp"
#include "sprox/problems.hpp"

using namespace sprox;
using namespace testing_helpers;

namespace {

double fd_error(const Problem& p, const ParamVec& x) {
  const ParamVec g = p.gradient(x);
  const Eigen::VectorXd flat = x.flatten();
  const auto shapes = x.shapes();
  Eigen::VectorXd fd(flat.size());
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(flat(i)));
    Eigen::VectorXd a = flat, b = flat;
    a(i) += h;
    b(i) -= h;
    fd(i) = (p.value(ParamVec::unflatten(shapes, a)) - p.value(ParamVec::unflatten(shapes, b))) /
            (2.0 * h);
  }
  return (fd - g.flatten()).norm() / std::max(1e-8, g.flatten().norm());
}

ParamVec random_point(const std::vector<BlockShape>& shapes, std::mt19937_64& rng) {
  std::vector<Block> blocks;
  for (const auto& s : shapes) {
    blocks.push_back(Block::from_flat(s, oracle::gaussian(s.size(), 1, rng).col(0)));
  }
  return ParamVec(std::move(blocks));
}

}  // namespace

TEST_CASE("one-dimensional quadratic") {
  QuadraticProblem q(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
  CHECK(q.value(pv({3.0})) == 4.5);
  CHECK(q.gradient(pv({3.0}))[0].values()(0) == 3.0);
  CHECK(q.lipschitz() == doctest::Approx(1.0));
  REQUIRE(q.f_star_hint().has_value());
  CHECK(*q.f_star_hint() == doctest::Approx(0.0));
}

TEST_CASE("generated quadratics have unit smoothness and the requested spectrum") {
  std::mt19937_64 rng(83);
  for (Spectrum s : {Spectrum::Log, Spectrum::Power}) {
    const auto q = make_quadratic(12, 50.0, rng, 1.0, s);
    CHECK(q->lipschitz() == doctest::Approx(1.0).epsilon(1e-10));
    const Eigen::VectorXd ev = oracle::symmetric_eigenvalues(q->A().transpose() * q->A());
    CHECK(ev(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ev(11) == doctest::Approx(1.0 / 50.0).epsilon(1e-10));
    CHECK(*q->f_star_hint() == doctest::Approx(0.0).scale(1.0));
  }
  // Harmonic spacing for beta = 2.
  const auto h = make_quadratic(5, 9.0, rng, 1.0, Spectrum::Power, 2.0);
  const Eigen::VectorXd ev = oracle::symmetric_eigenvalues(h->A().transpose() * h->A());
  for (int i = 0; i < 5; ++i) {
    CHECK(ev(i) == doctest::Approx(1.0 / (1.0 + 8.0 * i / 4.0)).epsilon(1e-10));
  }
}

TEST_CASE("gradients agree with central differences") {
  std::mt19937_64 rng(89);
  const auto logistic = make_logistic(40, 6, rng);
  const auto mq = make_matrix_quadratic(4, 3, rng);
  const auto quad = make_quadratic(5, 10.0, rng);
  for (int t = 0; t < 20; ++t) {
    CHECK(fd_error(*logistic, random_point(logistic->shapes(), rng)) <= 1e-6);
    CHECK(fd_error(*mq, random_point(mq->shapes(), rng)) <= 1e-6);
    CHECK(fd_error(*quad, random_point(quad->shapes(), rng)) <= 1e-6);
  }
}

TEST_CASE("sampled Lipschitz ratios stay below the analytic constant") {
  std::mt19937_64 rng(97);
  const std::vector<ProblemPtr> problems = {
      make_quadratic(6, 30.0, rng), make_logistic(50, 5, rng), make_matrix_quadratic(3, 4, rng),
      std::make_shared<SeparableSum>(
          std::vector<ProblemPtr>{make_quadratic(3, 5.0, rng), make_matrix_quadratic(2, 2, rng)})};
  for (const auto& p : problems) {
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      const ParamVec x = random_point(p->shapes(), rng);
      const ParamVec y = random_point(p->shapes(), rng);
      worst = std::max(worst, norm2(p->gradient(x) - p->gradient(y)) / norm2(x - y));
    }
    INFO(p->name());
    CHECK(worst <= p->lipschitz() * (1.0 + 1e-9));
  }
}

TEST_CASE("noise-free sampling returns the exact gradient") {
  std::mt19937_64 rng(101);
  const auto q = make_quadratic(4, 10.0, rng);
  const ParamVec x = random_point(q->shapes(), rng);
  CHECK(max_abs_diff(sample_gradient(*q, x, NoiseModel::none(), 42), q->gradient(x)) == 0.0);
}

TEST_CASE("one token, one noise realization") {
  std::mt19937_64 rng(103);
  const auto q = make_quadratic(4, 10.0, rng);
  const ParamVec x = random_point(q->shapes(), rng);
  const ParamVec y = random_point(q->shapes(), rng);
  for (const NoiseModel& n : {NoiseModel::gaussian(2.0), NoiseModel::student_t(1.8, 1.0)}) {
    const ParamVec dx = sample_gradient(*q, x, n, 7) - q->gradient(x);
    const ParamVec dy = sample_gradient(*q, y, n, 7) - q->gradient(y);
    CHECK(max_abs_diff(dx, dy) <= 1e-12 * std::max(1.0, norm2(dx)));
    CHECK(max_abs_diff(noise_draw(n, q->shapes(), 7), noise_draw(n, q->shapes(), 7)) == 0.0);
    CHECK(max_abs_diff(noise_draw(n, q->shapes(), 7), noise_draw(n, q->shapes(), 8)) > 0.0);
  }
}

TEST_CASE("gaussian noise is unbiased") {
  const std::vector<BlockShape> shapes = {{BlockKind::Vector, 3, 1}, {BlockKind::Matrix, 2, 2}};
  const NoiseModel n = NoiseModel::gaussian(0.5);
  const int N = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(7);
  for (int t = 0; t < N; ++t) sum += noise_draw(n, shapes, static_cast<std::uint64_t>(t)).flatten();
  const Eigen::VectorXd mean = sum / N;
  CHECK(mean.cwiseAbs().maxCoeff() <= 3.0 * 0.5 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("student t noise meets its moment budget and is heavy-tailed") {
  const std::vector<BlockShape> shapes = {{BlockKind::Vector, 4, 1}};
  const double sigma = 0.7;
  const NoiseModel n = NoiseModel::student_t(1.8, sigma, 1.5);
  const double c = student_t_scale(n, 4);
  const int N = 1000000;
  // Second moments truncated at c * {1, 10, 100, 1000}.
  const double cuts[4] = {1.0, 10.0, 100.0, 1000.0};
  double mp = 0.0, m2 = 0.0, trunc[4] = {0.0, 0.0, 0.0, 0.0};
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  for (int t = 0; t < N; ++t) {
    const Eigen::VectorXd v = noise_draw(n, shapes, static_cast<std::uint64_t>(t)).flatten();
    const double r = v.norm();
    mp += std::pow(r, 1.5);
    m2 += r * r;
    for (int j = 0; j < 4; ++j) {
      for (double e : v) {
        if (std::abs(e) <= c * cuts[j]) trunc[j] += e * e;
      }
    }
    sum += v;
  }
  mp /= N;
  CHECK(std::isfinite(mp));
  CHECK(mp <= std::pow(sigma, 1.5) * 1.1);
  // Finite variance would make the truncated moments level off.
  for (int j = 1; j < 4; ++j) {
    INFO(j);
    CHECK(trunc[j] > 1.2 * trunc[j - 1]);
  }
  CHECK(m2 / N > 1.2 * trunc[2] / N);
  CHECK((sum / N).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(NoiseModel::student_t(1.4, 1.0, 1.5).validate(), InvalidConfig);
  CHECK_THROWS_AS(NoiseModel::gaussian(-1.0).validate(), InvalidConfig);
  CHECK_NOTHROW(NoiseModel::student_t(1.8, 1.0, 1.5).validate());
  CHECK(student_t_abs_moment(3.0, 1.0) == doctest::Approx(2.0 * std::sqrt(3.0) / M_PI).epsilon(1e-10));
}
