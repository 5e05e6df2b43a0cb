#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sprox/errors.hpp"
#include "sprox/optimizer.hpp"
#include "sprox/stationarity.hpp"

using namespace sprox;
using namespace testing_helpers;

namespace {

const std::vector<BlockShape> kVec1 = {{BlockKind::Vector, 1, 1}};

RunConfig one_dim(Mode mode, long K, double x0, NoiseModel noise = NoiseModel::none()) {
  return RunConfig{ReferenceFn::uniform(kVec1, ScalarRef::barrier(1.0)),
                   ConstraintSpec::unconstrained(kVec1),
                   mode,
                   K,
                   11,
                   pv({x0}),
                   noise,
                   false};
}

}  // namespace

TEST_CASE("step examples") {
  const auto shapes = std::vector<BlockShape>{{BlockKind::Vector, 2, 1}};
  const ReferenceFn ref = ReferenceFn::uniform(shapes, ScalarRef::barrier(1.0));
  const ConstraintSpec zero = ConstraintSpec::unconstrained(shapes);

  const StepResult s = step(pv({0, 0}), pv({1, -3}), 1.0, ref, zero);
  CHECK(s.x_next[0].values()(0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s.x_next[0].values()(1) == doctest::Approx(0.75).epsilon(1e-15));

  std::mt19937_64 rng(131);
  for (int t = 0; t < 20; ++t) {
    const ParamVec x{Block::vector(oracle::gaussian(2, 1, rng).col(0))};
    const ParamVec d{Block::vector(3.0 * oracle::gaussian(2, 1, rng).col(0))};
    const StepResult r = step(x, d, 0.3, ref, zero);
    CHECK(max_abs_diff(r.x_next, x - 0.3 * precondition(ref, d)) == 0.0);
  }

  // d = 0 leaves a feasible point of a convex set in place.
  const ConstraintSpec ball = ConstraintSpec::uniform(shapes, BlockConstraint::with_radius(SetKind::L2Ball, 1.0));
  const StepResult f = step(pv({0.3, -0.4}), pv({0, 0}), 0.5, ref, ball);
  CHECK(max_abs_diff(f.x_next, pv({0.3, -0.4})) <= 1e-12);
  CHECK(max_abs_diff(f.y, pv({0.3, -0.4})) == 0.0);
}

TEST_CASE("step bound and feasibility across constraint sets") {
  std::mt19937_64 rng(137);
  const std::vector<BlockShape> shapes = {{BlockKind::Vector, 4, 1}, {BlockKind::Matrix, 3, 2}};
  const std::vector<std::pair<BlockConstraint, BlockConstraint>> sets = {
      {BlockConstraint::with_radius(SetKind::LinfBall, 0.7), BlockConstraint::with_radius(SetKind::SpectralBall, 0.9)},
      {BlockConstraint::with_radius(SetKind::L2Ball, 1.2), BlockConstraint::with_radius(SetKind::FrobeniusBall, 0.5)},
      {BlockConstraint::with_radius(SetKind::SignSet, 0.4), BlockConstraint::with_radius(SetKind::Stiefel, 1.0)},
      {BlockConstraint::with_count(SetKind::HardThreshold, 2), BlockConstraint::with_count(SetKind::RankLimit, 1)},
  };
  for (const ScalarRef& h : {ScalarRef::barrier(0.5), ScalarRef::hyper_kappa(0.3, 4.0)}) {
    const ReferenceFn ref = ReferenceFn::uniform(shapes, h);
    const double D = ref.domain_radius();
    for (const auto& [cv, cm] : sets) {
      const ConstraintSpec spec(shapes, {cv, cm});
      for (int t = 0; t < 25; ++t) {
        const ParamVec x{oracle::sample_feasible_block(cv, shapes[0], rng),
                         oracle::sample_feasible_block(cm, shapes[1], rng)};
        const ParamVec d{Block::vector(5.0 * oracle::gaussian(4, 1, rng).col(0)),
                         Block::matrix(5.0 * oracle::gaussian(3, 2, rng))};
        const double gamma = std::pow(10.0, std::uniform_real_distribution<double>(-2, 0)(rng));
        const StepResult r = step(x, d, gamma, ref, spec);
        CHECK(norm2(r.x_next - x) <= 2.0 * gamma * D + 1e-12);
        CHECK(is_feasible(spec, r.x_next));
      }
    }
  }
  CHECK_THROWS(step(pv({0}), pv({1}), 0.0, ReferenceFn::uniform(kVec1, ScalarRef::barrier(1.0)),
                    ConstraintSpec::unconstrained(kVec1)));
}

TEST_CASE("normalized step") {
  const ReferenceFn hk = ReferenceFn::uniform(kVec1, ScalarRef::hyper_kappa(3e-4, 4.0));
  CHECK(max_abs_diff(polar_express_step(pv({0.2}), pv({0.0}), 1.0, hk, 0.1), pv({0.2})) == 0.0);

  const long double e = 3e-4L, h = 0.5L;
  const long double expected = -h / std::pow(e * e * e * e + h * h * h * h, 0.25L);
  const double got = polar_express_step(pv({0.0}), pv({1.0}), 1.0, hk, 1.0)[0].values()(0);
  CHECK(std::abs(got - static_cast<double>(expected)) <= 4e-16);
  CHECK(1.0 + got == doctest::Approx(1.6e-13).epsilon(0.05));

  // Large directions: the update approaches the unit-direction limit.
  const auto shapes = std::vector<BlockShape>{{BlockKind::Vector, 3, 1}, {BlockKind::Matrix, 2, 2}};
  const ReferenceFn ref = ReferenceFn::uniform(shapes, ScalarRef::hyper_kappa(0.05, 4.0));
  const ParamVec x{Block::vector(vec({0.1, 0.2, -0.3})), Block::matrix(diag({0.5, -0.1}))};
  const ParamVec d{Block::vector(vec({3.0, -1.0, 2.0})), Block::matrix(Eigen::Matrix2d{{1.0, 2.0}, {-0.5, 0.3}})};
  const ParamVec limit = x - 0.4 * precondition(ref, (1.0 / norm2(d)) * d);
  double prev = norm2(polar_express_step(x, d, 0.4, ref, 1e-2) - limit);
  for (double c : {10.0, 1e3, 1e6}) {
    const double dev = norm2(polar_express_step(x, c * d, 0.4, ref, 1e-2) - limit);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev <= 1e-7);
}

TEST_CASE("run with K = 0") {
  QuadraticProblem q(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
  const RunConfig c = one_dim(Deterministic{0.1}, 0, 1.0);
  const Trace t = run(c, q);
  REQUIRE(t.completed);
  REQUIRE(t.records.size() == 1);
  const StepResult s = step(c.x0, q.gradient(c.x0), 0.1, c.ref, c.spec);
  CHECK(max_abs_diff(t.x_final, s.x_next) == 0.0);
  CHECK(t.x_final[0].values()(0) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(t.records[0].F == 0.5);
  CHECK(t.records[0].step_norm == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("deterministic run decreases F on the 1D quadratic") {
  QuadraticProblem q(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
  const Trace t = run(one_dim(Deterministic{0.1}, 19, 1.0), q);
  REQUIRE(t.completed);
  REQUIRE(t.records.size() == 20);
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    CHECK(t.records[k].F < t.records[k - 1].F);
  }
  CHECK(q.value(t.x_final) < t.records.back().F);
}

TEST_CASE("sufficient decrease and fixed points on a certified quadratic") {
  std::mt19937_64 rng(139);
  const auto q = make_quadratic(4, 5.0, rng);
  const auto shapes = q->shapes();
  const ReferenceFn ref = ReferenceFn::uniform(shapes, ScalarRef::barrier(1.0));
  std::mt19937_64 crng(1);
  REQUIRE(check_aniso_descent(*q, ref, q->lipschitz(), 2000, crng).violations == 0);

  const double gamma = ref.mu() / q->lipschitz();
  RunConfig c{ref, ConstraintSpec::uniform(shapes, BlockConstraint::with_radius(SetKind::LinfBall, 2.0)),
              Deterministic{gamma}, 300, 3, ParamVec::zeros(shapes), NoiseModel::none(), true};
  const Trace t = run(c, *q);
  REQUIRE(t.completed);
  CHECK(t.feasibility_violations == 0);
  CHECK(t.step_bound_violations == 0);
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    REQUIRE(t.records[k].reg_gap.has_value());
    CHECK(t.records[k + 1].F <= t.records[k].F - gamma * *t.records[k].reg_gap + 1e-8);
    if (t.records[k].step_norm <= 1e-12) CHECK(t.records[k].gap_bregman <= 1e-8);
  }
  // Converged far enough to reach a fixed point.
  CHECK(t.records.back().step_norm <= 1e-12);
  CHECK(t.records.back().gap_bregman <= 1e-8);
}

TEST_CASE("stochastic runs replay deterministically and stay bounded") {
  std::mt19937_64 rng(149);
  const auto q = make_quadratic(6, 10.0, rng);
  const auto shapes = q->shapes();
  const ReferenceFn ref = ReferenceFn::uniform(shapes, ScalarRef::hyper_kappa(0.2, 4.0));
  const ConstraintSpec box = ConstraintSpec::uniform(shapes, BlockConstraint::with_radius(SetKind::LinfBall, 1.5));
  const std::vector<Mode> modes = {StochasticPolyak{1.0}, StochasticStorm{0.5},
                                   PolarExpressMode{1.0, std::nullopt, std::nullopt}};
  for (const Mode& m : modes) {
    const bool polar = std::holds_alternative<PolarExpressMode>(m);
    RunConfig c{ref, polar ? ConstraintSpec::unconstrained(shapes) : box, m, 200, 5,
                ParamVec::zeros(shapes), NoiseModel::student_t(1.8, 1.0, 1.5), false};
    const Trace a = run(c, *q);
    const Trace b = run(c, *q);
    INFO(mode_name(m));
    REQUIRE(a.completed);
    CHECK(a.records.size() == 201);
    CHECK(a.step_bound_violations == 0);
    CHECK(a.feasibility_violations == 0);
    CHECK(max_abs_diff(a.x_final, b.x_final) == 0.0);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].token == b.records[k].token);
      CHECK(a.records[k].gap_bregman == b.records[k].gap_bregman);
      CHECK(std::isfinite(a.records[k].F));
    }
    c.seed = 6;
    CHECK(max_abs_diff(run(c, *q).x_final, a.x_final) > 0.0);
  }
}

TEST_CASE("storm draws one sample per iteration and evaluates it twice") {
  std::mt19937_64 rng(151);
  const auto q = make_quadratic(3, 4.0, rng);
  RunConfig c{ReferenceFn::uniform(q->shapes(), ScalarRef::barrier(1.0)),
              ConstraintSpec::unconstrained(q->shapes()), StochasticStorm{1.0}, 5, 9,
              ParamVec::zeros(q->shapes()), NoiseModel::gaussian(0.3), false};
  const Trace t = run(c, *q);
  CHECK(t.records[0].oracle_calls == 1);
  for (std::size_t k = 1; k < t.records.size(); ++k) {
    CHECK(t.records[k].oracle_calls == 2);
    CHECK(t.records[k].alpha_k == doctest::Approx(std::pow(k + 1.0, -2.0 / 3.0)).epsilon(1e-14));
  }
}

TEST_CASE("run configuration errors") {
  QuadraticProblem q(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1));
  CHECK_THROWS_AS(run(one_dim(Deterministic{0.0}, 3, 1.0), q), InvalidConfig);
  CHECK_THROWS_AS(run(one_dim(Deterministic{0.1}, -1, 1.0), q), InvalidConfig);
  CHECK_THROWS_AS(run(one_dim(StochasticPolyak{-1.0}, 3, 1.0), q), InvalidConfig);
  RunConfig infeasible = one_dim(Deterministic{0.1}, 3, 2.0);
  infeasible.spec = ConstraintSpec::uniform(kVec1, BlockConstraint::with_radius(SetKind::LinfBall, 1.0));
  CHECK_THROWS_AS(run(infeasible, q), InvalidConfig);
  RunConfig polar = one_dim(PolarExpressMode{1.0, std::nullopt, std::nullopt}, 3, 0.5);
  polar.spec = ConstraintSpec::uniform(kVec1, BlockConstraint::with_radius(SetKind::LinfBall, 1.0));
  CHECK_THROWS_AS(run(polar, q), InvalidConfig);
  CHECK(auto_eps_hat(15, 2.0) == doctest::Approx(0.5));
  CHECK(auto_eps_hat(15, 1.5) == doctest::Approx(std::pow(16.0, -1.0 / 6.0)));
}
