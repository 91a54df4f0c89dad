#include "dra/prox.hpp"

#include <algorithm>
#include <cmath>

#include "dra/errors.hpp"

namespace dra {

Eigen::VectorXd box_project(const Eigen::Ref<const Eigen::VectorXd>& x, const BoxSet& box) {
  if (x.size() != box.lo.size()) throw ConfigError("box_project: dimension mismatch");
  return x.cwiseMax(box.lo).cwiseMin(box.hi);
}

namespace {

Eigen::VectorXd clamp_maybe(const Eigen::VectorXd& x, const BoxSet* box) {
  return box ? Eigen::VectorXd(x.cwiseMax(box->lo).cwiseMin(box->hi)) : x;
}

}  // namespace

Eigen::VectorXd prox_step(const ProxSpec& spec) {
  if (!(spec.beta > 0.0)) throw ConfigError("prox_step: beta must be positive");
  if (spec.s.size() != spec.anchor.size()) throw ConfigError("prox_step: dimension mismatch");
  const auto& f = spec.objective;
  const double inv_beta = 1.0 / spec.beta;

  const QuadraticObjective* quad = f.quadratic();
  if (quad && !spec.box) {
    // (Q + I/beta) x = s - b + anchor/beta
    Eigen::MatrixXd H = quad->Q;
    H.diagonal().array() += inv_beta;
    const Eigen::VectorXd rhs = spec.s - quad->b + inv_beta * spec.anchor;
    return H.ldlt().solve(rhs);
  }

  // phi(x) = f(x) - <s,x> + (1/(2 beta)) ||x - anchor||^2
  auto grad_phi = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return f.gradient(x) - spec.s + inv_beta * (x - spec.anchor);
  };
  const double l_phi = f.lipschitz() + inv_beta;
  const double mu_phi = f.strong_convexity() + inv_beta;
  const double kappa = l_phi / mu_phi;
  const double momentum = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);
  const double tol = spec.inner_tol_scale * (1.0 + spec.anchor.norm());

  Eigen::VectorXd x = clamp_maybe(spec.anchor, spec.box);
  Eigen::VectorXd z = x;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < spec.inner_max_iters; ++it) {
    residual = (x - clamp_maybe(x - grad_phi(x), spec.box)).norm();
    if (residual <= tol) return x;
    Eigen::VectorXd x_next = clamp_maybe(z - grad_phi(z) / l_phi, spec.box);
    z = x_next + momentum * (x_next - x);
    x = std::move(x_next);
  }
  residual = (x - clamp_maybe(x - grad_phi(x), spec.box)).norm();
  if (residual <= tol) return x;
  throw SolverError("prox_step: inner loop did not reach tolerance " + std::to_string(tol) +
                        " in " + std::to_string(spec.inner_max_iters) + " iterations",
                    residual);
}

Eigen::VectorXd knapsack_project(const Eigen::Ref<const Eigen::VectorXd>& v, double target_sum,
                                 const Eigen::Ref<const Eigen::VectorXd>& lo,
                                 const Eigen::Ref<const Eigen::VectorXd>& hi) {
  const Eigen::Index n = v.size();
  if (lo.size() != n || hi.size() != n) throw ConfigError("knapsack_project: dimension mismatch");
  if ((lo.array() > hi.array()).any()) throw ConfigError("knapsack_project: lo > hi");
  const double feas_slack = 1e-9 * std::max(1.0, std::abs(target_sum));
  if (target_sum < lo.sum() - feas_slack || target_sum > hi.sum() + feas_slack)
    throw ConfigError("knapsack_project: target sum is infeasible for the box");

  auto clamped = [&](double tau) -> Eigen::VectorXd {
    return (v.array() - tau).cwiseMax(lo.array()).cwiseMin(hi.array()).matrix();
  };

  const double tol = 1e-12 * std::max(1.0, std::abs(target_sum));
  // sum(clamped(tau)) is continuous and nonincreasing in tau; this bracket
  // pins it to [sum lo, sum hi]
  double tau_lo = (v - hi).minCoeff();
  double tau_hi = (v - lo).maxCoeff();
  if (tau_lo > tau_hi) std::swap(tau_lo, tau_hi);

  Eigen::VectorXd out = clamped(tau_lo);
  if (std::abs(out.sum() - target_sum) <= tol) return out;
  for (int it = 0; it < 200; ++it) {
    const double tau = 0.5 * (tau_lo + tau_hi);
    out = clamped(tau);
    const double gap = out.sum() - target_sum;
    if (std::abs(gap) <= tol) return out;
    if (gap > 0.0) {
      tau_lo = tau;
    } else {
      tau_hi = tau;
    }
  }
  return out;  // bracket is far below tol-resolution by now
}

}  // namespace dra
