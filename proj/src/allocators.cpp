#include "dra/allocators.hpp"

#include <cmath>
#include <random>
#include <string>

#include "dra/common.hpp"
#include "dra/errors.hpp"
#include "dra/metrics.hpp"
#include "dra/prox.hpp"

namespace dra {

namespace {

constexpr std::uint64_t kBetaSeedOffset = 7919;

Eigen::MatrixXd beta_minus_cl(const AlgorithmConfig& config, const Network& net) {
  Eigen::MatrixXd M = -config.c * net.L_mat;
  M.diagonal() += config.betas;
  return M;
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::MirrorPExtra:
      return "mirror_p_extra";
    case Algorithm::MirrorExtra:
      return "mirror_extra";
    case Algorithm::MirrorPGExtra:
      return "mirror_pg_extra";
  }
  return "?";
}

}  // namespace

void validate_config(const AlgorithmConfig& config, const ProblemInstance& instance,
                     const Network& net) {
  if (instance.n() != net.n()) throw ConfigError("instance and network disagree on agent count");
  if (!(config.c > 0.0)) throw ConfigError("parameter c must be positive");
  if (config.max_rounds < 0) throw ConfigError("max_rounds must be nonnegative");
  if (config.stop_tol < 0.0) throw ConfigError("stop_tol must be nonnegative");
  if (config.record_every < 1) throw ConfigError("record_every must be positive");

  const bool needs_betas = config.algorithm != Algorithm::MirrorExtra;
  if (needs_betas) {
    if (config.betas.size() != instance.n())
      throw ConfigError("betas must supply one value per agent");
    if ((config.betas.array() <= 0.0).any()) throw ConfigError("betas must be positive");
    if (config.enforce_step_bounds) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(beta_minus_cl(config, net));
      const double scale = std::max(config.betas.maxCoeff(), config.c * net.lambda_max);
      if (es.eigenvalues()(0) < -1e-10 * scale)
        throw ConfigError(std::string(algorithm_name(config.algorithm)) +
                          ": diag(betas) - c*L must be positive semidefinite");
    }
  }
  if (config.algorithm != Algorithm::MirrorPExtra && config.enforce_step_bounds) {
    const double c_max = 1.0 / (2.0 * instance.lipschitz() * net.lambda_max);
    if (!(config.c < c_max))
      throw ConfigError(std::string(algorithm_name(config.algorithm)) +
                        ": c must be below 1/(2 L lambda_max) = " + std::to_string(c_max));
  }
  if (config.algorithm == Algorithm::MirrorExtra && instance.has_boxes())
    throw ConfigError("mirror_extra handles unconstrained instances only");
}

AlgorithmConfig suggest_parameters(const ProblemInstance& instance, const Network& net,
                                   Algorithm algorithm) {
  AlgorithmConfig config;
  config.algorithm = algorithm;
  const double L = instance.lipschitz();
  const double mu = instance.strong_convexity();
  switch (algorithm) {
    case Algorithm::MirrorPExtra: {
      if (!(mu > 0.0))
        throw ConfigError("suggest_parameters: the mirror_p_extra rule needs a strongly convex instance");
      config.c = 0.01 / std::sqrt(mu * L * net.lambda_min_nz);
      config.betas = Eigen::VectorXd::Constant(instance.n(), config.c * net.lambda_max);
      break;
    }
    case Algorithm::MirrorExtra: {
      config.c = 0.45 / (L * net.lambda_max);
      config.betas = Eigen::VectorXd::Constant(instance.n(), config.c * net.lambda_max);
      break;
    }
    case Algorithm::MirrorPGExtra: {
      config.c = 0.45 / (L * net.lambda_max);
      config.betas = Eigen::VectorXd::Constant(instance.n(), config.c * net.lambda_max);
      break;
    }
  }
  validate_config(config, instance, net);
  return config;
}

Eigen::VectorXd heterogeneous_betas(int n, double c, double lambda_max, std::uint64_t seed) {
  std::mt19937_64 gen(seed + kBetaSeedOffset);
  Eigen::VectorXd betas(n);
  for (int i = 0; i < n; ++i) betas(i) = uniform_real(gen, 1.0, 1.5) * c * lambda_max;
  return betas;
}

RunState init_state(const ProblemInstance& instance, const Network& /*net*/,
                    const AlgorithmConfig& config, const Eigen::MatrixXd* x0) {
  const int n = instance.n();
  const int p = instance.p();
  RunState state;
  if (x0) {
    if (x0->rows() != n || x0->cols() != p) throw ConfigError("init_state: x0 has the wrong shape");
    state.X = *x0;
  } else {
    state.X = instance.resources();
  }
  if (instance.has_boxes() && config.algorithm != Algorithm::MirrorExtra) {
    for (int i = 0; i < n; ++i)
      state.X.row(i) = box_project(state.X.row(i).transpose(), instance.box(i)).transpose();
  }
  switch (config.algorithm) {
    case Algorithm::MirrorPExtra:
    case Algorithm::MirrorExtra:
      state.S = instance.gradient_matrix(state.X);
      break;
    case Algorithm::MirrorPGExtra:
      state.S = Eigen::MatrixXd::Zero(n, p);
      break;
  }
  state.Y_cur = Eigen::MatrixXd::Zero(n, p);
  state.Y_prev = Eigen::MatrixXd::Zero(n, p);
  state.T_prev = tracker_matrix(state, instance, config);
  state.round = 0;
  state.messages = 0;
  return state;
}

Eigen::MatrixXd tracker_matrix(const RunState& state, const ProblemInstance& instance,
                               const AlgorithmConfig& config) {
  switch (config.algorithm) {
    case Algorithm::MirrorPExtra:
    case Algorithm::MirrorExtra:
      return state.S;
    case Algorithm::MirrorPGExtra:
      return instance.gradient_matrix(state.X) + state.S;
  }
  throw ConfigError("unknown algorithm");
}

void step_mirror_p_extra(RunState& state, const ProblemInstance& instance, const Network& net,
                         const AlgorithmConfig& config) {
  const Eigen::MatrixXd payload = state.S;
  const Eigen::MatrixXd Y_new = state.Y_cur + mix(net, payload, &state.messages);
  const Eigen::MatrixXd anchor =
      instance.resources() - 2.0 * config.c * Y_new + config.c * state.Y_cur;

  Eigen::MatrixXd X_next(instance.n(), instance.p());
  for (int i = 0; i < instance.n(); ++i) {
    ProxSpec spec{instance.objective(i),
                  instance.has_boxes() ? &instance.box(i) : nullptr,
                  state.S.row(i).transpose(),
                  anchor.row(i).transpose(),
                  config.betas(i)};
    try {
      X_next.row(i) = prox_step(spec).transpose();
    } catch (const SolverError& e) {
      throw SolverError("agent " + std::to_string(i) + ", round " + std::to_string(state.round) +
                            ": " + e.what(),
                        e.achieved_residual());
    }
  }
  const Eigen::MatrixXd S_next =
      state.S - config.betas.cwiseInverse().asDiagonal() * (X_next - anchor);

  state.T_prev = payload;
  state.X = std::move(X_next);
  state.S = S_next;
  state.Y_prev = state.Y_cur;
  state.Y_cur = Y_new;
  ++state.round;
}

void step_mirror_extra(RunState& state, const ProblemInstance& instance, const Network& net,
                       const AlgorithmConfig& config) {
  const Eigen::MatrixXd payload = state.S;  // holds grad f(x^k)
  const Eigen::MatrixXd Y_new = state.Y_cur + mix(net, payload, &state.messages);
  const Eigen::MatrixXd X_next =
      instance.resources() - 2.0 * config.c * Y_new + config.c * state.Y_cur;

  state.T_prev = payload;
  state.X = X_next;
  state.S = instance.gradient_matrix(state.X);
  state.Y_prev = state.Y_cur;
  state.Y_cur = Y_new;
  ++state.round;
}

void step_mirror_pg_extra(RunState& state, const ProblemInstance& instance, const Network& net,
                          const AlgorithmConfig& config) {
  const Eigen::MatrixXd payload = instance.gradient_matrix(state.X) + state.S;
  const Eigen::MatrixXd Y_new = state.Y_cur + mix(net, payload, &state.messages);
  const Eigen::MatrixXd anchor =
      instance.resources() - 2.0 * config.c * Y_new + config.c * state.Y_cur;

  Eigen::MatrixXd X_next = anchor + config.betas.asDiagonal() * state.S;
  if (instance.has_boxes()) {
    for (int i = 0; i < instance.n(); ++i)
      X_next.row(i) = box_project(X_next.row(i).transpose(), instance.box(i)).transpose();
  }
  const Eigen::MatrixXd S_next =
      state.S - config.betas.cwiseInverse().asDiagonal() * (X_next - anchor);

  state.T_prev = payload;
  state.X = std::move(X_next);
  state.S = S_next;
  state.Y_prev = state.Y_cur;
  state.Y_cur = Y_new;
  ++state.round;
}

void step(RunState& state, const ProblemInstance& instance, const Network& net,
          const AlgorithmConfig& config) {
  switch (config.algorithm) {
    case Algorithm::MirrorPExtra:
      step_mirror_p_extra(state, instance, net, config);
      return;
    case Algorithm::MirrorExtra:
      step_mirror_extra(state, instance, net, config);
      return;
    case Algorithm::MirrorPGExtra:
      step_mirror_pg_extra(state, instance, net, config);
      return;
  }
  throw ConfigError("unknown algorithm");
}

ResidualPair optimality_residuals(const RunState& state, const ProblemInstance& instance,
                                  const Network& net, const AlgorithmConfig& config) {
  const Eigen::MatrixXd T = tracker_matrix(state, instance, config);
  ResidualPair out;
  out.grad_consensus_sq = laplacian_quadratic(net, T);
  const Eigen::MatrixXd Y_next = state.Y_cur + net.L_mat * T;
  out.feas_dual_sq =
      (state.X - instance.resources() + config.c * Y_next).squaredNorm();
  return out;
}

IterationTrace run(const ProblemInstance& instance, const Network& net,
                   const AlgorithmConfig& config, const RunHooks& hooks) {
  validate_config(config, instance, net);
  RunState state = init_state(instance, net, config, hooks.x0);

  IterationTrace trace;
  trace.dist0 = hooks.x_star ? (state.X - *hooks.x_star).norm() : 0.0;

  const double divergence_cap = 1e12 * (1.0 + instance.resources().norm());
  auto record = [&](const RunState& st) {
    trace.rows.push_back(
        compute_round_metrics(st, instance, net, config, hooks.x_star, trace.dist0));
  };

  record(state);
  for (long k = 0; k < config.max_rounds; ++k) {
    step(state, instance, net, config);
    if (!state.X.allFinite() || !state.S.allFinite() || state.X.norm() > divergence_cap)
      throw DivergenceError("iterates diverged at round " + std::to_string(state.round),
                            state.round);
    if (hooks.on_round) hooks.on_round(state);

    const ResidualPair res = optimality_residuals(state, instance, net, config);
    const bool converged = res.combined() <= config.stop_tol;
    if (state.round % config.record_every == 0 || converged || state.round == config.max_rounds)
      record(state);
    if (converged) {
      trace.converged = true;
      break;
    }
  }
  trace.rounds_completed = state.round;
  trace.messages = state.messages;
  return trace;
}

}  // namespace dra
