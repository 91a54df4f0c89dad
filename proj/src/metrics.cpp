#include "dra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dra/errors.hpp"

namespace dra {

namespace {

double psd_quadratic(const Eigen::MatrixXd& M, const Eigen::MatrixXd& V) {
  const double q = (V.array() * (M * V).array()).sum();
  return q < 0.0 ? 0.0 : q;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

double field_value(const RoundMetrics& row, Field field) {
  switch (field) {
    case Field::GradConsensusSq:
      return row.grad_consensus_sq;
    case Field::FeasDualSq:
      return row.feas_dual_sq;
    case Field::MeritDiff:
      return row.merit_diff;
    case Field::DistToStar:
      return row.dist_to_star;
    case Field::NormalizedResidual:
      return row.normalized_residual;
    case Field::SumViolation:
      return row.sum_violation;
  }
  throw ConfigError("unknown metric field");
}

RoundMetrics compute_round_metrics(const RunState& state, const ProblemInstance& instance,
                                   const Network& net, const AlgorithmConfig& config,
                                   const Eigen::MatrixXd* x_star, double dist0) {
  RoundMetrics row;
  row.round = state.round;

  const Eigen::MatrixXd T = tracker_matrix(state, instance, config);
  row.grad_consensus_sq = laplacian_quadratic(net, T);
  const Eigen::MatrixXd Y_next = state.Y_cur + net.L_mat * T;
  row.feas_dual_sq = (state.X - instance.resources() + config.c * Y_next).squaredNorm();

  if (state.round == 0) {
    row.merit_diff = 0.0;  // needs two consecutive states
  } else {
    const Eigen::MatrixXd delta = state.T_prev - T;
    switch (config.algorithm) {
      case Algorithm::MirrorPExtra:
      case Algorithm::MirrorPGExtra: {
        Eigen::MatrixXd B_minus_cl = -config.c * net.L_mat;
        B_minus_cl.diagonal() += config.betas;
        row.merit_diff =
            config.c * row.grad_consensus_sq + psd_quadratic(B_minus_cl, delta);
        break;
      }
      case Algorithm::MirrorExtra: {
        const double weight = 2.0 / (instance.lipschitz() * net.lambda_max) - 3.0 * config.c;
        row.merit_diff =
            config.c * row.grad_consensus_sq + weight * laplacian_quadratic(net, delta);
        break;
      }
    }
  }

  if (x_star) {
    row.dist_to_star = (state.X - *x_star).norm();
    row.normalized_residual = dist0 > 0.0 ? row.dist_to_star / dist0 : 0.0;
  }
  row.sum_violation = aggregate_feasibility_residual(instance, state.X);
  return row;
}

MonotoneReport check_merit_monotone(const IterationTrace& trace) {
  MonotoneReport report;
  report.pass = true;
  const RoundMetrics* prev = nullptr;
  for (const auto& row : trace.rows) {
    if (row.round < 1) continue;
    if (prev) {
      const double allowed = prev->merit_diff * (1.0 + 1e-9) + 1e-14;
      const double excess = row.merit_diff - allowed;
      if (excess > 0.0) {
        report.pass = false;
        report.worst_violation = std::max(report.worst_violation, excess);
      }
    }
    prev = &row;
  }
  return report;
}

SublinearReport check_sublinear(const IterationTrace& trace, Field field) {
  std::vector<double> rounds, scaled;
  for (const auto& row : trace.rows) {
    if (row.round < 1) continue;
    rounds.push_back(static_cast<double>(row.round));
    scaled.push_back(static_cast<double>(row.round) * field_value(row, field));
  }
  if (rounds.size() < 200)
    throw ConfigError("check_sublinear: needs at least 200 recorded rounds past round 0");

  const std::size_t start = rounds.size() - rounds.size() / 4;
  std::vector<double> tail_x(rounds.begin() + start, rounds.end());
  std::vector<double> tail_y(scaled.begin() + start, scaled.end());

  SublinearReport report;
  const double head = tail_y.front();
  if (head <= 0.0) {  // already at the floor
    report.pass = true;
    report.tail_stat = 0.0;
    return report;
  }
  const double tail_min = *std::min_element(tail_y.begin(), tail_y.end());
  const LineFit fit = least_squares(tail_x, tail_y);
  report.tail_stat = tail_min / head;
  report.pass = fit.slope < 0.0 && report.tail_stat < 0.5;
  return report;
}

RateFit fit_geometric_rate(const IterationTrace& trace, Field field,
                           std::pair<long, long> window) {
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  std::vector<double> ks, logs;
  long lo = std::numeric_limits<long>::max(), hi = std::numeric_limits<long>::min();
  for (const auto& row : trace.rows) {
    if (row.round < window.first || row.round > window.second) continue;
    const double v = field_value(row, field);
    if (!(v > floor)) continue;
    ks.push_back(static_cast<double>(row.round));
    logs.push_back(std::log(v));
    lo = std::min(lo, row.round);
    hi = std::max(hi, row.round);
  }
  if (ks.size() < 20)
    throw Error("fit_geometric_rate: fewer than 20 points above the noise floor in the window");

  const LineFit fit = least_squares(ks, logs);
  RateFit out;
  out.rho_hat = std::exp(fit.slope);
  out.delta_hat = 1.0 / out.rho_hat - 1.0;
  out.window = {lo, hi};
  out.r_squared = fit.r_squared;
  out.points = static_cast<int>(ks.size());
  return out;
}

RateFit fit_geometric_rate(const IterationTrace& trace, Field field, std::pair<long, long> window,
                           double delta_bound) {
  RateFit out = fit_geometric_rate(trace, field, window);
  out.delta_bound = delta_bound;
  out.bound_ratio = delta_bound > 0.0 ? out.delta_hat / delta_bound : 0.0;
  return out;
}

double delta_bound_p_extra(double c, double beta, double mu, double L, double lambda_min_nz) {
  if (!(c > 0.0) || !(beta > 0.0) || !(mu > 0.0) || !(L > 0.0) || !(lambda_min_nz > 0.0))
    throw ConfigError("delta_bound_p_extra: all parameters must be positive");
  const double gamma = mu * c;
  const double common = c * lambda_min_nz / (beta * (1.0 + 1.0 / gamma));
  const double d1 = std::min(
      {common, c * L * lambda_min_nz / (beta * c * L * L * lambda_min_nz + 1.0 + gamma),
       mu * L * c * lambda_min_nz / ((mu + L) * (1.0 + gamma))});
  const double d2 = std::min(
      {common, c * mu * lambda_min_nz / (beta * c * mu * mu * lambda_min_nz + 1.0 + gamma),
       1.0 / ((mu + L) * beta)});
  return std::max(d1, d2);
}

double delta_bound_extra(double c, double mu, double L, double lambda_min_nz) {
  if (!(c > 0.0) || !(mu > 0.0) || !(L > 0.0) || !(lambda_min_nz > 0.0))
    throw ConfigError("delta_bound_extra: all parameters must be positive");
  const double gamma = 1.0;
  const double cl = c * L;
  return std::min({2.0 * mu * L * c * lambda_min_nz / ((mu + L) * (1.0 + gamma)),
                   cl * cl * lambda_min_nz /
                       (1.0 + gamma + cl * (2.0 - 3.0 * cl) * lambda_min_nz +
                        2.0 * cl * cl * (1.0 + 1.0 / gamma)),
                   (1.0 - 2.0 * cl) * lambda_min_nz / (cl * (1.0 + 1.0 / gamma))});
}

}  // namespace dra
