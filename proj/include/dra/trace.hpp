#pragma once

#include <utility>
#include <vector>

namespace dra {

// One recorded row of the iteration trace. Oracle-dependent fields are zero
// when no reference solution was supplied.
struct RoundMetrics {
  long round = 0;
  double grad_consensus_sq = 0.0;   // <T, L T> for the tracker matrix T
  double feas_dual_sq = 0.0;        // ||X - r + c*Y||_F^2 with Y advanced one exchange
  double merit_diff = 0.0;          // ||z^{k-1} - z^k||_M^2 (0 at round 0)
  double dist_to_star = 0.0;        // ||X - x*||_F
  double normalized_residual = 0.0; // dist_to_star / ||X^0 - x*||_F
  double sum_violation = 0.0;       // ||sum_i (x_i - r_i)||_2
};

struct IterationTrace {
  std::vector<RoundMetrics> rows;
  long rounds_completed = 0;
  bool converged = false;
  long long messages = 0;
  double dist0 = 0.0;  // ||X^0 - x*||_F when an oracle was supplied
};

// Least-squares geometric fit of a trace field: field(k) ~ C * rho^k.
struct RateFit {
  double delta_hat = 0.0;  // 1/rho - 1
  double rho_hat = 0.0;
  std::pair<long, long> window{0, 0};  // rounds actually used
  double r_squared = 0.0;
  int points = 0;
  double delta_bound = 0.0;  // analytic lower bound when requested, else 0
  double bound_ratio = 0.0;  // delta_hat / delta_bound when requested, else 0
};

}  // namespace dra
