#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace dra {

enum class LKind { StandardLaplacian, NormalizedLaplacian, HalfIMinusW };
enum class WeightRule { MetropolisHastings, LazyMetropolis };

// Edge set of a simple undirected graph, vertices 0..n-1.
struct Topology {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // each pair (i, j) with i < j, sorted
  std::uint64_t seed = 0;

  // derived adjacency, filled by finalize()
  std::vector<int> degrees;
  std::vector<std::vector<int>> neighbors;

  void finalize();            // sorts edges, rebuilds degrees/neighbors
  bool is_connected() const;  // BFS over the adjacency lists
};

// Symmetric doubly stochastic mixing weights compatible with the graph.
struct WeightMatrix {
  Eigen::MatrixXd W;
  WeightRule rule = WeightRule::LazyMetropolis;
};

// The graph together with its mixing matrix and the spectral quantities the
// step-size rules consume. Immutable after construction.
struct Network {
  Topology topology;
  Eigen::MatrixXd L_mat;      // symmetric PSD, null space = span{1}
  double lambda_max = 0.0;    // largest eigenvalue
  double lambda_min_nz = 0.0; // smallest nonzero eigenvalue
  LKind kind = LKind::StandardLaplacian;

  int n() const { return topology.n; }
};

// Connected random graph: a uniform random labeled tree (Prufer decode) plus
// extra edges drawn uniformly without replacement from the non-edges, until
// ceil(connectivity_ratio * n(n-1)/2) edges are present.
Topology build_graph(int n, double connectivity_ratio, std::uint64_t seed);

// Path graph 0-1-2-...-(n-1); used by the scalability sweeps.
Topology build_path(int n);

WeightMatrix metropolis_weights(const Topology& topology, WeightRule rule);

// weights are required iff kind == HalfIMinusW
Network build_L(const Topology& topology, LKind kind, const WeightMatrix* weights = nullptr);

// trace(V^T L V); zero exactly when the rows of V agree
double laplacian_quadratic(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& V);

// One synchronous exchange: out.row(i) = sum over j in N_i and {i} of
// L_ij * P.row(j). Accumulates the per-round message count (one payload per
// neighbor per direction) into *messages when given.
Eigen::MatrixXd mix(const Network& net, const Eigen::Ref<const Eigen::MatrixXd>& P,
                    long long* messages = nullptr);

}  // namespace dra
