#include "dra/problem.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "dra/common.hpp"
#include "dra/oracle.hpp"

namespace dra {

namespace {

// eigenvalues below this fraction of lambda_max count as zero
constexpr double kSingularCut = 1e-12;

std::pair<double, double> quad_extremal_eigs(const Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  if (es.info() != Eigen::Success) throw Error("objective eigendecomposition failed");
  const double lmax = es.eigenvalues()(Q.rows() - 1);
  double lmin = es.eigenvalues()(0);
  if (lmin < -kSingularCut * std::max(1.0, lmax))
    throw ConfigError("quadratic objective must be positive semidefinite");
  if (lmin < kSingularCut * std::max(1.0, lmax)) lmin = 0.0;
  return {lmax, lmin};
}

}  // namespace

AgentObjective::AgentObjective(QuadraticObjective quad) {
  if (quad.Q.rows() != quad.Q.cols() || quad.Q.rows() != quad.b.size())
    throw ConfigError("quadratic objective has inconsistent dimensions");
  if (!quad.Q.isApprox(quad.Q.transpose(), 1e-12))
    throw ConfigError("quadratic objective matrix must be symmetric");
  const auto [lmax, lmin] = quad_extremal_eigs(quad.Q);
  lipschitz_ = lmax;
  strong_convexity_ = lmin;
  dim_ = static_cast<int>(quad.b.size());
  quad_ = std::move(quad);
}

AgentObjective::AgentObjective(ValueFn value, GradFn gradient, double lipschitz,
                               double strong_convexity)
    : value_(std::move(value)),
      grad_(std::move(gradient)),
      lipschitz_(lipschitz),
      strong_convexity_(strong_convexity) {
  if (!value_ || !grad_) throw ConfigError("general objective needs value and gradient callables");
  if (!(lipschitz > 0.0) || strong_convexity < 0.0 || strong_convexity > lipschitz)
    throw ConfigError("general objective constants must satisfy 0 <= mu <= L, L > 0");
  dim_ = -1;  // unknown until evaluated
}

double AgentObjective::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return quad_ ? quad_->value(x) : value_(x);
}

Eigen::VectorXd AgentObjective::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return quad_ ? quad_->gradient(x) : grad_(x);
}

ProblemInstance::ProblemInstance(std::vector<AgentObjective> objectives,
                                 std::optional<std::vector<BoxSet>> boxes,
                                 Eigen::MatrixXd resources, std::uint64_t seed)
    : objectives_(std::move(objectives)),
      boxes_(std::move(boxes)),
      resources_(std::move(resources)),
      seed_(seed) {
  const int n = static_cast<int>(objectives_.size());
  const int p = static_cast<int>(resources_.cols());
  if (n < 2) throw ConfigError("instance needs at least 2 agents");
  if (resources_.rows() != n) throw ConfigError("resource matrix must have one row per agent");
  lipschitz_ = 0.0;
  strong_convexity_ = std::numeric_limits<double>::infinity();
  for (const auto& obj : objectives_) {
    if (obj.dim() >= 0 && obj.dim() != p)
      throw ConfigError("objective dimension does not match the instance");
    lipschitz_ = std::max(lipschitz_, obj.lipschitz());
    strong_convexity_ = std::min(strong_convexity_, obj.strong_convexity());
  }
  if (boxes_) {
    if (static_cast<int>(boxes_->size()) != n)
      throw ConfigError("box count must match the agent count");
    Eigen::VectorXd lo_sum = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd hi_sum = Eigen::VectorXd::Zero(p);
    for (const auto& box : *boxes_) {
      if (box.lo.size() != p || box.hi.size() != p)
        throw ConfigError("box dimension does not match the instance");
      if ((box.lo.array() > box.hi.array()).any())
        throw ConfigError("box has lo > hi in some coordinate");
      lo_sum += box.lo;
      hi_sum += box.hi;
    }
    const Eigen::VectorXd r_sum = resources_.colwise().sum().transpose();
    const double slack = 1e-12 * (1.0 + r_sum.norm());
    if ((r_sum.array() < lo_sum.array() - slack).any() ||
        (r_sum.array() > hi_sum.array() + slack).any())
      throw ConfigError("aggregate demand lies outside the box sums; instance is infeasible");
  }
}

Eigen::MatrixXd ProblemInstance::gradient_matrix(
    const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.rows() != n() || X.cols() != p())
    throw ConfigError("gradient_matrix: X has the wrong shape");
  Eigen::MatrixXd G(n(), p());
  for (int i = 0; i < n(); ++i) G.row(i) = objectives_[i].gradient(X.row(i).transpose());
  return G;
}

double ProblemInstance::objective_value(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.rows() != n() || X.cols() != p())
    throw ConfigError("objective_value: X has the wrong shape");
  double total = 0.0;
  for (int i = 0; i < n(); ++i) total += objectives_[i].value(X.row(i).transpose());
  return total;
}

namespace {

ProblemInstance draw_instance(int n, int p, std::uint64_t seed, bool with_boxes,
                              std::mt19937_64& gen) {
  std::vector<AgentObjective> objectives;
  objectives.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd A(p, p);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < p; ++c) A(r, c) = standard_normal(gen);
    Eigen::VectorXd b(p);
    for (int r = 0; r < p; ++r) b(r) = standard_normal(gen);
    QuadraticObjective quad;
    quad.Q = A.transpose() * A;
    quad.Q = 0.5 * (quad.Q + quad.Q.transpose().eval());  // remove rounding asymmetry
    quad.b = std::move(b);
    objectives.emplace_back(std::move(quad));
  }

  std::optional<std::vector<BoxSet>> boxes;
  Eigen::MatrixXd resources(n, p);
  if (with_boxes) {
    std::vector<BoxSet> bs;
    bs.reserve(n);
    for (int i = 0; i < n; ++i) {
      BoxSet box;
      box.lo = Eigen::VectorXd::Zero(p);
      box.hi = Eigen::VectorXd(p);
      for (int c = 0; c < p; ++c) box.hi(c) = uniform_real(gen, 1.0, 2.0);
      resources.row(i) = 0.5 * (box.lo + box.hi).transpose();
      bs.push_back(std::move(box));
    }
    boxes = std::move(bs);
  } else {
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < p; ++c) resources(i, c) = standard_normal(gen);
  }
  return ProblemInstance(std::move(objectives), std::move(boxes), std::move(resources), seed);
}

bool touches_box_boundary(const ProblemInstance& instance, const Eigen::MatrixXd& x,
                          double tol = 1e-9) {
  for (int i = 0; i < instance.n(); ++i) {
    const auto& box = instance.box(i);
    for (int c = 0; c < instance.p(); ++c) {
      if (x(i, c) - box.lo(c) <= tol || box.hi(c) - x(i, c) <= tol) return true;
    }
  }
  return false;
}

}  // namespace

ProblemInstance generate_instance(int n, int p, std::uint64_t seed, bool with_boxes,
                                  bool ensure_active_boxes, int max_regen_attempts) {
  if (n < 2 || p < 1) throw ConfigError("generate_instance: need n >= 2 and p >= 1");
  if (ensure_active_boxes && !with_boxes)
    throw ConfigError("generate_instance: active boxes require with_boxes");

  std::mt19937_64 gen(seed);
  ProblemInstance instance = draw_instance(n, p, seed, with_boxes, gen);
  if (!ensure_active_boxes) return instance;

  for (int attempt = 0; attempt < max_regen_attempts; ++attempt) {
    const OracleSolution sol = solve_centralized(instance, 1e-10, 1000000);
    if (touches_box_boundary(instance, sol.x_star)) return instance;
    instance = draw_instance(n, p, seed, with_boxes, gen);
  }
  throw ActiveBoxRetryError("generate_instance: no box-active instance found within the retry budget",
                            std::move(instance));
}

Eigen::VectorXd gradient(const ProblemInstance& instance, int i,
                         const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (i < 0 || i >= instance.n()) throw ConfigError("gradient: agent index out of range");
  if (x.size() != instance.p()) throw ConfigError("gradient: point has the wrong dimension");
  return instance.objective(i).gradient(x);
}

double aggregate_feasibility_residual(const ProblemInstance& instance,
                                      const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.rows() != instance.n() || X.cols() != instance.p())
    throw ConfigError("aggregate_feasibility_residual: X has the wrong shape");
  return ((X - instance.resources()).colwise().sum()).norm();
}

}  // namespace dra
