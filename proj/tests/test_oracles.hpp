#pragma once

// Independent reference computations used only by tests. Everything here is
// deliberately brute-force and shares no code path with the library routines
// it checks.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "dra/network.hpp"
#include "dra/problem.hpp"

namespace testo {

// --- exact rational arithmetic -------------------------------------------

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::runtime_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
  friend Rational operator/(Rational a, Rational b) { return Rational(a.num * b.den, a.den * b.num); }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend bool operator>(Rational a, Rational b) { return b < a; }
};

inline Rational clamp(Rational x, Rational lo, Rational hi) {
  if (x < lo) return lo;
  if (x > hi) return hi;
  return x;
}

// --- dense eigen-factor oracle: ||U V||_F^2 via an explicit factor --------

inline double laplacian_quadratic_by_factor(const Eigen::MatrixXd& L, const Eigen::MatrixXd& V) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const Eigen::VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd U = evals.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return (U * V).squaredNorm();
}

// --- central finite differences -------------------------------------------

template <typename F>
Eigen::VectorXd finite_difference_gradient(const F& f, const Eigen::VectorXd& x,
                                           double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// --- 1-D dense grid search over an interval --------------------------------

template <typename F>
double grid_search_min(const F& f, double lo, double hi, double resolution) {
  double best_x = lo;
  double best_v = f(lo);
  for (double x = lo; x <= hi + 0.5 * resolution; x += resolution) {
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return best_x;
}

// --- direct KKT solve for unconstrained quadratic instances ---------------
// Unknowns: all x_i stacked (n*p) plus the shared multiplier nu (p).
// Equations: Q_i x_i + b_i + nu = 0 for each agent, and sum_i x_i = sum_i r_i.

inline Eigen::MatrixXd kkt_direct_solve(const dra::ProblemInstance& instance) {
  const int n = instance.n();
  const int p = instance.p();
  const int dim = n * p + p;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < n; ++i) {
    const auto* quad = instance.objective(i).quadratic();
    if (!quad) throw std::runtime_error("kkt_direct_solve needs quadratic objectives");
    A.block(i * p, i * p, p, p) = quad->Q;
    A.block(i * p, n * p, p, p) = Eigen::MatrixXd::Identity(p, p);
    rhs.segment(i * p, p) = -quad->b;
  }
  for (int i = 0; i < n; ++i)
    A.block(n * p, i * p, p, p) = Eigen::MatrixXd::Identity(p, p);
  rhs.segment(n * p, p) = instance.resources().colwise().sum().transpose();
  const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) X.row(i) = sol.segment(i * p, p).transpose();
  return X;
}

// --- misc helpers ----------------------------------------------------------

inline bool spanning_tree_connects(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);
  for (int i = 1; i < n; ++i)
    if (find(i) != find(0)) return false;
  return true;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace testo
