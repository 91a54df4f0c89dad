#include <doctest.h>

#include <random>

#include "dra/common.hpp"
#include "dra/errors.hpp"
#include "dra/prox.hpp"
#include "test_oracles.hpp"

using namespace dra;

namespace {

AgentObjective scalar_half_square() {
  return AgentObjective(
      QuadraticObjective{Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1)});
}

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("prox_step: symmetric problem fixes the origin") {
  const AgentObjective f = scalar_half_square();
  ProxSpec spec{f, nullptr, scalar(0.0), scalar(0.0), 1.0};
  CHECK(prox_step(spec)(0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("prox_step: tilted scalar problem and grid-search cross-check") {
  const AgentObjective f = scalar_half_square();
  ProxSpec spec{f, nullptr, scalar(1.0), scalar(0.0), 1.0};
  const double x = prox_step(spec)(0);
  CHECK(x == doctest::Approx(0.5).epsilon(1e-12));
  const auto phi = [](double t) { return 0.5 * t * t - t + 0.5 * t * t; };
  const double grid = testo::grid_search_min(phi, -2.0, 2.0, 1e-4);
  CHECK(x == doctest::Approx(grid).epsilon(1e-3));
}

TEST_CASE("prox_step: box clips the tilted minimizer") {
  const AgentObjective f = scalar_half_square();
  const BoxSet box{scalar(0.0), scalar(0.2)};
  ProxSpec spec{f, &box, scalar(1.0), scalar(0.0), 1.0};
  const double x = prox_step(spec)(0);
  CHECK(x == doctest::Approx(0.2).epsilon(1e-9));
  const auto phi = [](double t) { return 0.5 * t * t - t + 0.5 * t * t; };
  const double grid = testo::grid_search_min(phi, 0.0, 0.2, 1e-4);
  CHECK(x == doctest::Approx(grid).epsilon(1e-3));
}

TEST_CASE("prox_step: closed form satisfies the stationarity equation") {
  std::mt19937_64 gen(91);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd A(3, 3);
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = standard_normal(gen);
    QuadraticObjective quad{A.transpose() * A, Eigen::VectorXd::NullaryExpr(3, [&](Eigen::Index) {
                              return standard_normal(gen);
                            })};
    const AgentObjective f(quad);
    Eigen::VectorXd s(3), v(3);
    for (int i = 0; i < 3; ++i) {
      s(i) = standard_normal(gen);
      v(i) = standard_normal(gen);
    }
    const double beta = 0.5 + uniform_unit(gen);
    ProxSpec spec{f, nullptr, s, v, beta};
    const Eigen::VectorXd x = prox_step(spec);
    const Eigen::VectorXd grad = quad.Q * x + quad.b - s + (x - v) / beta;
    CHECK(grad.norm() <= 1e-12 * (1.0 + x.norm() + v.norm()));
  }
}

TEST_CASE("prox_step: gradient mapping below tolerance with a box") {
  std::mt19937_64 gen(92);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd A(2, 2);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = standard_normal(gen);
    QuadraticObjective quad{A.transpose() * A, Eigen::VectorXd::NullaryExpr(2, [&](Eigen::Index) {
                              return standard_normal(gen);
                            })};
    const AgentObjective f(quad);
    BoxSet box{scalar(0.0).replicate(2, 1), scalar(1.5).replicate(2, 1)};
    Eigen::VectorXd s(2), v(2);
    for (int i = 0; i < 2; ++i) {
      s(i) = standard_normal(gen);
      v(i) = standard_normal(gen);
    }
    ProxSpec spec{f, &box, s, v, 0.8};
    const Eigen::VectorXd x = prox_step(spec);
    const Eigen::VectorXd grad_phi = quad.Q * x + quad.b - s + (x - v) / 0.8;
    const double mapping = (x - box_project(x - grad_phi, box)).norm();
    CHECK(mapping <= 1e-12 * (1.0 + v.norm()));
  }
}

TEST_CASE("prox_step: nonexpansive in the anchor") {
  std::mt19937_64 gen(93);
  Eigen::MatrixXd A(2, 2);
  for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = standard_normal(gen);
  QuadraticObjective quad{A.transpose() * A, Eigen::VectorXd::Zero(2)};
  const AgentObjective f(quad);
  const BoxSet box{scalar(-1.0).replicate(2, 1), scalar(1.0).replicate(2, 1)};
  Eigen::VectorXd s(2);
  s << 0.3, -0.2;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v1(2), v2(2);
    for (int i = 0; i < 2; ++i) {
      v1(i) = standard_normal(gen);
      v2(i) = standard_normal(gen);
    }
    ProxSpec a{f, &box, s, v1, 1.0};
    ProxSpec b{f, &box, s, v2, 1.0};
    const double lhs = (prox_step(a) - prox_step(b)).norm();
    CHECK(lhs <= (v1 - v2).norm() + 1e-10);
  }
}

TEST_CASE("prox_step: exhausted inner loop reports the achieved residual") {
  Eigen::MatrixXd Q(2, 2);
  Q << 1.0, 0.0, 0.0, 50.0;
  const AgentObjective f(QuadraticObjective{Q, Eigen::VectorXd::Zero(2)});
  const BoxSet box{Eigen::VectorXd::Constant(2, -5.0), Eigen::VectorXd::Constant(2, 5.0)};
  Eigen::VectorXd s(2), v(2);
  s << 1.0, 0.0;
  v << 3.0, 3.0;
  ProxSpec spec{f, &box, s, v, 1.0};
  spec.inner_max_iters = 1;
  spec.inner_tol_scale = 1e-16;
  try {
    prox_step(spec);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.achieved_residual() > 0.0);
  }
}

TEST_CASE("box_project: interior point, clamped corners, sampling oracle") {
  BoxSet box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  Eigen::VectorXd inside(2);
  inside << 0.5, 0.25;
  CHECK((box_project(inside, box) - inside).norm() == 0.0);

  Eigen::VectorXd outside(2);
  outside << -1.0, 3.0;
  const Eigen::VectorXd proj = box_project(outside, box);
  CHECK(proj(0) == 0.0);
  CHECK(proj(1) == 1.0);

  std::mt19937_64 gen(7);
  Eigen::VectorXd x(2);
  x << standard_normal(gen) * 2.0, standard_normal(gen) * 2.0;
  const Eigen::VectorXd clamp = box_project(x, box);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd sample(2);
    sample << uniform_unit(gen), uniform_unit(gen);
    best = std::min(best, (sample - x).norm());
  }
  CHECK((clamp - x).norm() <= best + 1e-6);
}

TEST_CASE("knapsack_project: hand examples") {
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);

  Eigen::VectorXd v(2);
  v << 0.5, 1.5;
  const Eigen::VectorXd out = knapsack_project(v, 1.0, lo, hi);
  CHECK(out(0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(out(1) == doctest::Approx(1.0).epsilon(1e-10));

  Eigen::VectorXd feasible(2);
  feasible << 0.25, 0.5;
  const Eigen::VectorXd kept = knapsack_project(feasible, 0.75, lo, hi);
  CHECK((kept - feasible).norm() <= 1e-10);

  Eigen::VectorXd sym(2);
  sym << 2.0, 2.0;
  const Eigen::VectorXd mid = knapsack_project(sym, 2.0, lo, 2.0 * hi);
  CHECK(mid(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mid(1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("knapsack_project: feasibility and the variational inequality") {
  std::mt19937_64 gen(12);
  const int n = 10;
  Eigen::VectorXd lo(n), hi(n), v(n);
  for (int i = 0; i < n; ++i) {
    lo(i) = -uniform_unit(gen);
    hi(i) = lo(i) + 0.2 + uniform_unit(gen);
    v(i) = 3.0 * standard_normal(gen);
  }
  const double target = 0.5 * (lo.sum() + hi.sum());
  const Eigen::VectorXd proj = knapsack_project(v, target, lo, hi);

  CHECK(std::abs(proj.sum() - target) <= 1e-12 * std::max(1.0, std::abs(target)));
  CHECK((proj.array() >= lo.array()).all());
  CHECK((proj.array() <= hi.array()).all());

  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = lo(i) + uniform_unit(gen) * (hi(i) - lo(i));
    w = knapsack_project(w, target, lo, hi);  // repair the sum; w is feasible
    CHECK((v - proj).dot(w - proj) <= 1e-10);
  }
}

TEST_CASE("knapsack_project: infeasible target is rejected") {
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd hi = Eigen::VectorXd::Ones(3);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(3, 0.5);
  CHECK_THROWS_AS(knapsack_project(v, 4.0, lo, hi), ConfigError);
  CHECK_THROWS_AS(knapsack_project(v, -1.0, lo, hi), ConfigError);
}
