#include "dra/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dra/errors.hpp"
#include "dra/prox.hpp"

namespace dra {

namespace {

constexpr double kActiveTol = 1e-9;

// Interior agents must share one multiplier per coordinate; lower-active
// gradients may only exceed it, upper-active ones may only undershoot it.
KktResiduals multiplier_residuals(const ProblemInstance& instance, const Eigen::MatrixXd& x) {
  KktResiduals res;
  res.feasibility = aggregate_feasibility_residual(instance, x);
  const Eigen::MatrixXd G = instance.gradient_matrix(x);

  for (int c = 0; c < instance.p(); ++c) {
    std::vector<double> interior, lo_active, hi_active;
    for (int i = 0; i < instance.n(); ++i) {
      const double g = G(i, c);
      if (!instance.has_boxes()) {
        interior.push_back(g);
        continue;
      }
      const auto& box = instance.box(i);
      const bool at_lo = x(i, c) - box.lo(c) <= kActiveTol;
      const bool at_hi = box.hi(c) - x(i, c) <= kActiveTol;
      if (at_lo && at_hi) continue;  // pinned coordinate, no condition
      if (at_lo) {
        lo_active.push_back(g);
      } else if (at_hi) {
        hi_active.push_back(g);
      } else {
        interior.push_back(g);
      }
    }

    double multiplier;
    if (!interior.empty()) {
      std::vector<double> sorted(interior);
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
      multiplier = sorted[sorted.size() / 2];
      for (double g : interior)
        res.gradient_consensus = std::max(res.gradient_consensus, std::abs(g - multiplier));
    } else {
      // any value between the active groups certifies; pick the midpoint
      const double hi_max =
          hi_active.empty() ? -std::numeric_limits<double>::infinity()
                            : *std::max_element(hi_active.begin(), hi_active.end());
      const double lo_min = lo_active.empty() ? std::numeric_limits<double>::infinity()
                                              : *std::min_element(lo_active.begin(), lo_active.end());
      if (std::isfinite(hi_max) && std::isfinite(lo_min)) {
        multiplier = 0.5 * (hi_max + lo_min);
      } else if (std::isfinite(hi_max)) {
        multiplier = hi_max;
      } else if (std::isfinite(lo_min)) {
        multiplier = lo_min;
      } else {
        continue;
      }
    }
    for (double g : lo_active)
      res.complementarity = std::max(res.complementarity, multiplier - g);
    for (double g : hi_active)
      res.complementarity = std::max(res.complementarity, g - multiplier);
  }
  return res;
}

}  // namespace

Eigen::MatrixXd project_coupled(const ProblemInstance& instance,
                                const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  const int n = instance.n();
  const int p = instance.p();
  if (Z.rows() != n || Z.cols() != p) throw ConfigError("project_coupled: Z has the wrong shape");

  Eigen::MatrixXd out(n, p);
  const Eigen::VectorXd targets = instance.resources().colwise().sum().transpose();
  if (!instance.has_boxes()) {
    // affine projection: shift each column by its mean defect
    for (int c = 0; c < p; ++c) {
      const double shift = (Z.col(c).sum() - targets(c)) / n;
      out.col(c) = Z.col(c).array() - shift;
    }
    return out;
  }
  Eigen::VectorXd lo(n), hi(n);
  for (int c = 0; c < p; ++c) {
    for (int i = 0; i < n; ++i) {
      lo(i) = instance.box(i).lo(c);
      hi(i) = instance.box(i).hi(c);
    }
    out.col(c) = knapsack_project(Z.col(c), targets(c), lo, hi);
  }
  return out;
}

OracleSolution solve_centralized(const ProblemInstance& instance, double oracle_tol,
                                 long max_iters, const Eigen::MatrixXd* x0) {
  if (!(oracle_tol > 0.0)) throw ConfigError("solve_centralized: oracle_tol must be positive");
  const double step = 1.0 / instance.lipschitz();

  Eigen::MatrixXd x;
  if (x0) {
    if (x0->rows() != instance.n() || x0->cols() != instance.p())
      throw ConfigError("solve_centralized: x0 has the wrong shape");
    x = project_coupled(instance, *x0);
  } else {
    x = project_coupled(instance, instance.resources());
  }

  double movement = std::numeric_limits<double>::infinity();
  for (long it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd x_next = project_coupled(instance, x - step * instance.gradient_matrix(x));
    movement = (x_next - x).norm();
    x = std::move(x_next);
    if (movement <= oracle_tol) {
      OracleSolution sol;
      sol.x_star = std::move(x);
      sol.kkt = multiplier_residuals(instance, sol.x_star);
      sol.iterations_used = it + 1;
      return sol;
    }
  }
  throw OracleError("solve_centralized: movement " + std::to_string(movement) +
                        " still above tolerance after " + std::to_string(max_iters) +
                        " iterations",
                    movement, max_iters);
}

KktReport kkt_check(const ProblemInstance& instance, const Network& net,
                    const Eigen::Ref<const Eigen::MatrixXd>& x, double tol) {
  if (!x.allFinite()) throw ConfigError("kkt_check: x must be finite");
  KktReport report;
  if (instance.has_boxes()) {
    report.residuals = multiplier_residuals(instance, x);
  } else {
    report.residuals.feasibility = aggregate_feasibility_residual(instance, x);
    report.residuals.gradient_consensus =
        std::sqrt(laplacian_quadratic(net, instance.gradient_matrix(x)));
    report.residuals.complementarity = 0.0;
  }
  report.pass = report.residuals.feasibility <= tol &&
                report.residuals.gradient_consensus <= tol &&
                report.residuals.complementarity <= tol;
  return report;
}

}  // namespace dra
