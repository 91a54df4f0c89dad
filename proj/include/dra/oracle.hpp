#pragma once

#include <Eigen/Dense>

#include "dra/network.hpp"
#include "dra/problem.hpp"

namespace dra {

struct KktResiduals {
  double feasibility = 0.0;         // ||sum_i (x_i - r_i)||
  double gradient_consensus = 0.0;  // interior agents' gradient spread
  double complementarity = 0.0;     // wrong-signed boundary multipliers
};

struct OracleSolution {
  Eigen::MatrixXd x_star;
  KktResiduals kkt;
  long iterations_used = 0;
};

// Projection onto { X : sum_i (x_i - r_i) = 0 } intersected with the boxes.
// Decomposes per coordinate into a continuous-knapsack projection (mean shift
// when boxes are absent).
Eigen::MatrixXd project_coupled(const ProblemInstance& instance,
                                const Eigen::Ref<const Eigen::MatrixXd>& Z);

// Centralized ground truth: projected gradient with step 1/L on the coupled
// feasible set, run until the per-step movement falls under oracle_tol.
OracleSolution solve_centralized(const ProblemInstance& instance, double oracle_tol = 1e-10,
                                 long max_iters = 1000000, const Eigen::MatrixXd* x0 = nullptr);

struct KktReport {
  bool pass = false;
  KktResiduals residuals;
};

// First-order certificate at x. Without boxes the gradient-consensus part is
// sqrt(<G, L G>) against the supplied network; with boxes it is the shared
// interior multiplier test with sign checks on active coordinates
// (active = within 1e-9 of a bound).
KktReport kkt_check(const ProblemInstance& instance, const Network& net,
                    const Eigen::Ref<const Eigen::MatrixXd>& x, double tol);

}  // namespace dra
