#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "dra/network.hpp"
#include "dra/problem.hpp"
#include "dra/trace.hpp"

namespace dra {

enum class Algorithm { MirrorPExtra, MirrorExtra, MirrorPGExtra };

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::MirrorPExtra;
  double c = 0.0;
  Eigen::VectorXd betas;  // one beta per agent; ignored by MirrorExtra
  long max_rounds = 10000;
  double stop_tol = 1e-10;  // on grad_consensus_sq + feas_dual_sq
  int record_every = 1;
  std::uint64_t seed = 0;
  // Step-size safety conditions are enforced by default. Turning this off
  // admits out-of-range parameters so divergence stays observable.
  bool enforce_step_bounds = true;
};

// Checks the spectral conditions the algorithm needs:
//   MirrorPExtra / MirrorPGExtra: diag(betas) - c*L PSD
//   MirrorExtra / MirrorPGExtra:  0 < c < 1/(2 L lambda_max)
//   MirrorExtra additionally requires an instance without boxes.
void validate_config(const AlgorithmConfig& config, const ProblemInstance& instance,
                     const Network& net);

// Step parameters from the paper-backed selection rules:
//   MirrorPExtra:  c = 0.01 / sqrt(mu * L * lambda_min_nz), beta_i = c * lambda_max
//   MirrorExtra:   c = 0.45 / (L * lambda_max)
//   MirrorPGExtra: c = 0.45 / (L * lambda_max), beta_i = c * lambda_max
AlgorithmConfig suggest_parameters(const ProblemInstance& instance, const Network& net,
                                   Algorithm algorithm);

// beta_i = phi_i * c * lambda_max with phi_i ~ U[1, 1.5]
Eigen::VectorXd heterogeneous_betas(int n, double c, double lambda_max, std::uint64_t seed);

// Stacked per-agent state; row i belongs to agent i. After k completed
// rounds: X = x^k, S = the tracker state s^k (for MirrorExtra, grad f(x^k)),
// Y_cur = y^{k-1}, Y_prev = y^{k-2}, T_prev = tracker at the previous round.
struct RunState {
  Eigen::MatrixXd X;
  Eigen::MatrixXd S;
  Eigen::MatrixXd Y_cur;
  Eigen::MatrixXd Y_prev;
  Eigen::MatrixXd T_prev;
  long round = 0;
  long long messages = 0;
};

// x0 defaults to the resources clamped into the boxes.
RunState init_state(const ProblemInstance& instance, const Network& net,
                    const AlgorithmConfig& config, const Eigen::MatrixXd* x0 = nullptr);

// The matrix whose mixing drives the y-update and whose consensus certifies
// optimality: s^k (MirrorPExtra), grad f(x^k) (MirrorExtra),
// grad f(x^k) + s^k (MirrorPGExtra).
Eigen::MatrixXd tracker_matrix(const RunState& state, const ProblemInstance& instance,
                               const AlgorithmConfig& config);

void step(RunState& state, const ProblemInstance& instance, const Network& net,
          const AlgorithmConfig& config);
void step_mirror_p_extra(RunState& state, const ProblemInstance& instance, const Network& net,
                         const AlgorithmConfig& config);
void step_mirror_extra(RunState& state, const ProblemInstance& instance, const Network& net,
                       const AlgorithmConfig& config);
void step_mirror_pg_extra(RunState& state, const ProblemInstance& instance, const Network& net,
                          const AlgorithmConfig& config);

struct ResidualPair {
  double grad_consensus_sq = 0.0;
  double feas_dual_sq = 0.0;
  double combined() const { return grad_consensus_sq + feas_dual_sq; }
};

ResidualPair optimality_residuals(const RunState& state, const ProblemInstance& instance,
                                  const Network& net, const AlgorithmConfig& config);

struct RunHooks {
  const Eigen::MatrixXd* x_star = nullptr;             // enables distance metrics
  std::function<void(const RunState&)> on_round;       // called after every step
  const Eigen::MatrixXd* x0 = nullptr;                 // initial point override
};

// Synchronous round loop with metric recording, stopping rule, and
// divergence detection. Deterministic for fixed inputs.
IterationTrace run(const ProblemInstance& instance, const Network& net,
                   const AlgorithmConfig& config, const RunHooks& hooks = {});

}  // namespace dra
