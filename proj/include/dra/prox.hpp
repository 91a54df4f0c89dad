#pragma once

#include <Eigen/Dense>

#include "dra/problem.hpp"

namespace dra {

// One proximal subproblem:
//   minimize over x (in box, if any)  f(x) - <s, x> + (1/(2 beta)) ||x - anchor||^2
struct ProxSpec {
  const AgentObjective& objective;
  const BoxSet* box = nullptr;  // nullptr means unconstrained
  Eigen::VectorXd s;            // linear tilt
  Eigen::VectorXd anchor;
  double beta = 1.0;
  double inner_tol_scale = 1e-12;  // inner_tol = scale * (1 + ||anchor||)
  int inner_max_iters = 10000;
};

// Unique minimizer of the prox objective. Quadratic without a box solves the
// stationarity system directly; otherwise an accelerated projected-gradient
// loop runs until the unit-step gradient mapping falls under inner_tol.
Eigen::VectorXd prox_step(const ProxSpec& spec);

Eigen::VectorXd box_project(const Eigen::Ref<const Eigen::VectorXd>& x, const BoxSet& box);

// Euclidean projection onto { v : sum v = target_sum, lo <= v <= hi },
// by bisection on the scalar multiplier tau in clamp(v - tau, lo, hi).
Eigen::VectorXd knapsack_project(const Eigen::Ref<const Eigen::VectorXd>& v, double target_sum,
                                 const Eigen::Ref<const Eigen::VectorXd>& lo,
                                 const Eigen::Ref<const Eigen::VectorXd>& hi);

}  // namespace dra
