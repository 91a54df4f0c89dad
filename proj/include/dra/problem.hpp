#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dra/errors.hpp"

namespace dra {

// f(x) = 0.5 x^T Q x + b^T x with Q symmetric PSD.
struct QuadraticObjective {
  Eigen::MatrixXd Q;
  Eigen::VectorXd b;

  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return 0.5 * x.dot(Q * x) + b.dot(x);
  }
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const { return Q * x + b; }
};

struct BoxSet {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// A per-agent objective: either a quadratic (closed forms available) or a
// caller-supplied value/gradient pair. For the general form, convexity and
// the supplied smoothness/strong-convexity constants are caller obligations.
class AgentObjective {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  explicit AgentObjective(QuadraticObjective quad);
  AgentObjective(ValueFn value, GradFn gradient, double lipschitz, double strong_convexity);

  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // nullptr when the objective is not quadratic
  const QuadraticObjective* quadratic() const { return quad_ ? &*quad_ : nullptr; }
  double lipschitz() const { return lipschitz_; }
  double strong_convexity() const { return strong_convexity_; }
  int dim() const { return dim_; }

 private:
  std::optional<QuadraticObjective> quad_;
  ValueFn value_;
  GradFn grad_;
  double lipschitz_ = 0.0;
  double strong_convexity_ = 0.0;
  int dim_ = 0;
};

class ProblemInstance {
 public:
  ProblemInstance(std::vector<AgentObjective> objectives, std::optional<std::vector<BoxSet>> boxes,
                  Eigen::MatrixXd resources, std::uint64_t seed = 0);

  int n() const { return static_cast<int>(objectives_.size()); }
  int p() const { return static_cast<int>(resources_.cols()); }
  const AgentObjective& objective(int i) const { return objectives_.at(i); }
  bool has_boxes() const { return boxes_.has_value(); }
  const std::vector<BoxSet>& boxes() const { return *boxes_; }
  const BoxSet& box(int i) const { return boxes_->at(i); }
  const Eigen::MatrixXd& resources() const { return resources_; }
  std::uint64_t seed() const { return seed_; }

  double lipschitz() const { return lipschitz_; }          // max_i L_i
  double strong_convexity() const { return strong_convexity_; }  // min_i mu_i

  // rows are the per-agent gradients at the rows of X
  Eigen::MatrixXd gradient_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  double objective_value(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

 private:
  std::vector<AgentObjective> objectives_;
  std::optional<std::vector<BoxSet>> boxes_;
  Eigen::MatrixXd resources_;  // n x p
  std::uint64_t seed_ = 0;
  double lipschitz_ = 0.0;
  double strong_convexity_ = 0.0;
};

// Raised when the active-box regeneration budget runs out; carries the last
// instance that was produced.
class ActiveBoxRetryError : public Error {
 public:
  ActiveBoxRetryError(const std::string& what, ProblemInstance last)
      : Error(what), last_(std::move(last)) {}
  const ProblemInstance& last_instance() const { return last_; }

 private:
  ProblemInstance last_;
};

// Random instance: A_i and b_i have standard normal entries, Q_i = A_i^T A_i.
// With boxes: lo = 0, hi ~ U[1,2] per coordinate, r_i at the box midpoint.
// Without boxes: r_i has standard normal entries. ensure_active_boxes keeps
// regenerating (same RNG stream) until the centralized solution touches a box
// face, up to max_regen_attempts draws.
ProblemInstance generate_instance(int n, int p, std::uint64_t seed, bool with_boxes,
                                  bool ensure_active_boxes = false, int max_regen_attempts = 100);

Eigen::VectorXd gradient(const ProblemInstance& instance, int i,
                         const Eigen::Ref<const Eigen::VectorXd>& x);

// || sum_i (x_i - r_i) ||_2
double aggregate_feasibility_residual(const ProblemInstance& instance,
                                      const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace dra
