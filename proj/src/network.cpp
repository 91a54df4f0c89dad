#include "dra/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "dra/common.hpp"
#include "dra/errors.hpp"

namespace dra {

void Topology::finalize() {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  degrees.assign(n, 0);
  neighbors.assign(n, {});
  for (const auto& [i, j] : edges) {
    if (i < 0 || j >= n || i == j) throw ConfigError("edge endpoints out of range");
    ++degrees[i];
    ++degrees[j];
    neighbors[i].push_back(j);
    neighbors[j].push_back(i);
  }
  for (auto& nb : neighbors) std::sort(nb.begin(), nb.end());
}

bool Topology::is_connected() const {
  if (n <= 0) return false;
  std::vector<char> seen(n, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int count = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : neighbors[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        queue.push_back(w);
      }
    }
  }
  return count == n;
}

namespace {

// Prufer decode: uniform over labeled trees on n >= 2 vertices.
std::vector<std::pair<int, int>> random_tree(int n, std::mt19937_64& gen) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  if (n == 2) {
    edges.emplace_back(0, 1);
    return edges;
  }
  std::vector<int> seq(n - 2);
  for (auto& s : seq) s = static_cast<int>(uniform_index(gen, n));
  std::vector<int> degree(n, 1);
  for (int s : seq) ++degree[s];
  int ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int s : seq) {
    edges.emplace_back(leaf, s);
    if (--degree[s] == 1 && s < ptr) {
      leaf = s;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.emplace_back(leaf, n - 1);
  return edges;
}

}  // namespace

Topology build_graph(int n, double connectivity_ratio, std::uint64_t seed) {
  if (n < 2) throw ConfigError("build_graph: need at least 2 vertices");
  if (!(connectivity_ratio > 0.0) || connectivity_ratio > 1.0)
    throw ConfigError("build_graph: connectivity ratio must lie in (0, 1]");
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  const long long target =
      static_cast<long long>(std::ceil(connectivity_ratio * static_cast<double>(max_edges)));
  if (target < n - 1)
    throw ConfigError("build_graph: requested edge count below n-1, graph cannot be connected");
  if (target > max_edges) throw ConfigError("build_graph: requested edge count exceeds n(n-1)/2");

  std::mt19937_64 gen(seed);
  Topology topo;
  topo.n = n;
  topo.seed = seed;
  topo.edges = random_tree(n, gen);

  const long long extra = target - (n - 1);
  if (extra > 0) {
    std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
    for (const auto& [i, j] : topo.edges) present[i][j] = present[j][i] = 1;
    std::vector<std::pair<int, int>> pool;
    pool.reserve(static_cast<std::size_t>(max_edges - (n - 1)));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!present[i][j]) pool.emplace_back(i, j);
    // partial Fisher-Yates: the first `extra` slots are a uniform sample
    for (long long k = 0; k < extra; ++k) {
      const auto idx = k + static_cast<long long>(uniform_index(gen, pool.size() - k));
      std::swap(pool[k], pool[idx]);
      topo.edges.push_back(pool[k]);
    }
  }

  topo.finalize();
  if (!topo.is_connected()) throw ConfigError("build_graph: produced a disconnected graph");
  return topo;
}

Topology build_path(int n) {
  if (n < 2) throw ConfigError("build_path: need at least 2 vertices");
  Topology topo;
  topo.n = n;
  for (int i = 0; i + 1 < n; ++i) topo.edges.emplace_back(i, i + 1);
  topo.finalize();
  return topo;
}

WeightMatrix metropolis_weights(const Topology& topology, WeightRule rule) {
  if (!topology.is_connected()) throw ConfigError("metropolis_weights: graph must be connected");
  const int n = topology.n;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : topology.edges) {
    const int dmax = std::max(topology.degrees[i], topology.degrees[j]);
    const double w = rule == WeightRule::LazyMetropolis ? 1.0 / (2.0 * dmax) : 1.0 / (1.0 + dmax);
    W(i, j) = w;
    W(j, i) = w;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : topology.neighbors[i]) off += W(i, j);
    W(i, i) = 1.0 - off;
  }
  return WeightMatrix{std::move(W), rule};
}

Network build_L(const Topology& topology, LKind kind, const WeightMatrix* weights) {
  if (!topology.is_connected()) throw ConfigError("build_L: graph must be connected");
  if ((kind == LKind::HalfIMinusW) != (weights != nullptr))
    throw ConfigError("build_L: weights are required exactly when kind is HalfIMinusW");

  const int n = topology.n;
  Network net;
  net.topology = topology;
  net.kind = kind;

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  switch (kind) {
    case LKind::StandardLaplacian:
    case LKind::NormalizedLaplacian: {
      for (int i = 0; i < n; ++i) L(i, i) = topology.degrees[i];
      for (const auto& [i, j] : topology.edges) {
        L(i, j) = -1.0;
        L(j, i) = -1.0;
      }
      break;
    }
    case LKind::HalfIMinusW: {
      if (weights->W.rows() != n || weights->W.cols() != n)
        throw ConfigError("build_L: weight matrix does not match the graph size");
      L = 0.5 * (Eigen::MatrixXd::Identity(n, n) - weights->W);
      break;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success) throw Error("build_L: eigendecomposition failed");
  Eigen::VectorXd evals = es.eigenvalues();
  double lmax = evals(n - 1);

  if (kind == LKind::NormalizedLaplacian) {
    L /= lmax;
    evals /= lmax;
    lmax = 1.0;
  }

  const double zero_cut = 1e-10 * lmax;
  if (evals(0) < -1e-12 * lmax) throw Error("build_L: matrix is not positive semidefinite");
  int zero_count = 0;
  double lmin_nz = 0.0;
  for (int i = 0; i < n; ++i) {
    if (evals(i) <= zero_cut) {
      ++zero_count;
    } else if (lmin_nz == 0.0) {
      lmin_nz = evals(i);
    }
  }
  if (zero_count != 1) throw Error("build_L: null space dimension is not one");

  net.L_mat = std::move(L);
  net.lambda_max = lmax;
  net.lambda_min_nz = lmin_nz;
  return net;
}

double laplacian_quadratic(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& V) {
  if (V.rows() != net.n()) throw ConfigError("laplacian_quadratic: V must have n rows");
  const double q = (V.array() * (net.L_mat * V).array()).sum();
  return q < 0.0 ? 0.0 : q;
}

Eigen::MatrixXd mix(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& P,
                    long long* messages) {
  const auto& topo = net.topology;
  if (P.rows() != topo.n) throw ConfigError("mix: payload must have n rows");
  Eigen::MatrixXd out(topo.n, P.cols());
  for (int i = 0; i < topo.n; ++i) {
    Eigen::RowVectorXd acc = net.L_mat(i, i) * P.row(i);
    for (int j : topo.neighbors[i]) acc += net.L_mat(i, j) * P.row(j);
    out.row(i) = acc;
  }
  if (messages) *messages += 2LL * static_cast<long long>(topo.edges.size());
  return out;
}

}  // namespace dra
