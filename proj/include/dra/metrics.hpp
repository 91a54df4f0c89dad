#pragma once

#include <utility>

#include "dra/allocators.hpp"
#include "dra/trace.hpp"

namespace dra {

enum class Field {
  GradConsensusSq,
  FeasDualSq,
  MeritDiff,
  DistToStar,
  NormalizedResidual,
  SumViolation,
};

double field_value(const RoundMetrics& row, Field field);

// Full metric row for the current state; x_star may be null (distance fields
// become zero), dist0 is ||X^0 - x*||_F for the normalization.
RoundMetrics compute_round_metrics(const RunState& state, const ProblemInstance& instance,
                                   const Network& net, const AlgorithmConfig& config,
                                   const Eigen::MatrixXd* x_star, double dist0);

struct MonotoneReport {
  bool pass = false;
  double worst_violation = 0.0;
};

// merit_diff(k+1) <= merit_diff(k) * (1 + 1e-9) + 1e-14 across recorded
// rounds >= 1; the round-0 sentinel is skipped.
MonotoneReport check_merit_monotone(const IterationTrace& trace);

struct SublinearReport {
  bool pass = false;
  double tail_stat = 0.0;
};

// Operational o(1/k) surrogate: over the last quartile of recorded rounds,
// k * a_k must trend down (negative least-squares slope) and its minimum must
// fall below half of its value at the quartile start. Needs >= 200 recorded
// rounds.
SublinearReport check_sublinear(const IterationTrace& trace, Field field);

// Fits log(field) against the round index over the given round window.
// Rounds whose value sits within 100 machine epsilons of zero are excluded;
// at least 20 usable points are required.
RateFit fit_geometric_rate(const IterationTrace& trace, Field field,
                           std::pair<long, long> window);
RateFit fit_geometric_rate(const IterationTrace& trace, Field field, std::pair<long, long> window,
                           double delta_bound);

// Analytic contraction-factor lower bounds for uniform betas (B = beta I).
// The free parameter gamma is fixed to mu*c and 1 respectively; any
// admissible choice yields a valid bound.
double delta_bound_p_extra(double c, double beta, double mu, double L, double lambda_min_nz);
double delta_bound_extra(double c, double mu, double L, double lambda_min_nz);

}  // namespace dra
