#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dra/errors.hpp"
#include "dra/serialization.hpp"

using namespace dra;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "dra_serialization_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("network JSON round-trip preserves structure and spectra") {
  const Topology topo = build_graph(16, 0.25, 77);
  const WeightMatrix wm = metropolis_weights(topo, WeightRule::LazyMetropolis);
  const Network net = build_L(topo, LKind::HalfIMinusW, &wm);

  const nlohmann::json j = network_to_json(net, WeightRule::LazyMetropolis);
  CHECK(j.at("n") == 16);
  CHECK(j.at("kind") == "half_i_minus_w");
  const Network back = network_from_json(j);
  CHECK(back.topology.edges == net.topology.edges);
  CHECK((back.L_mat - net.L_mat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.lambda_max == net.lambda_max);
  CHECK(back.lambda_min_nz == net.lambda_min_nz);
}

TEST_CASE("instance JSON round-trip is bit-exact") {
  const ProblemInstance inst = generate_instance(6, 3, 2024, /*with_boxes=*/true);
  const nlohmann::json j = instance_to_json(inst);
  // through text, as a file would go
  const ProblemInstance back = instance_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.n() == inst.n());
  CHECK(back.p() == inst.p());
  CHECK((back.resources() - inst.resources()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < inst.n(); ++i) {
    CHECK((back.objective(i).quadratic()->Q - inst.objective(i).quadratic()->Q)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((back.objective(i).quadratic()->b - inst.objective(i).quadratic()->b)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((back.box(i).lo - inst.box(i).lo).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.box(i).hi - inst.box(i).hi).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(instance_hash(back) == instance_hash(inst));

  const ProblemInstance other = generate_instance(6, 3, 2025, true);
  CHECK(instance_hash(other) != instance_hash(inst));
}

TEST_CASE("config specs parse auto, heterogeneous, and explicit betas") {
  const ProblemInstance inst = generate_instance(5, 1, 10, false);
  const Network net = build_L(build_graph(5, 0.6, 4), LKind::NormalizedLaplacian);

  const auto j_auto = nlohmann::json::parse(R"({
    "algorithm": "mirror_p_extra", "c": "auto", "betas": "auto",
    "max_rounds": 50, "stop_tol": 1e-9, "record_every": 2, "seed": 7
  })");
  const ConfigSpec spec = config_spec_from_json(j_auto);
  CHECK_FALSE(spec.c.has_value());
  const AlgorithmConfig config = resolve_config(spec, inst, net);
  CHECK(config.c ==
        doctest::Approx(0.01 / std::sqrt(inst.strong_convexity() * inst.lipschitz() *
                                         net.lambda_min_nz)));
  CHECK(config.max_rounds == 50);
  CHECK(config.record_every == 2);

  const auto j_het = nlohmann::json::parse(R"({
    "algorithm": "mirror_pg_extra", "c": 0.001, "betas": "heterogeneous",
    "max_rounds": 10, "stop_tol": 0.0, "seed": 3
  })");
  const AlgorithmConfig het = resolve_config(config_spec_from_json(j_het), inst, net);
  CHECK(het.c == 0.001);
  CHECK(het.betas.size() == 5);
  CHECK(het.betas.minCoeff() >= 0.001 * net.lambda_max - 1e-15);

  const auto j_explicit = nlohmann::json::parse(R"({
    "algorithm": "mirror_extra", "c": 0.001, "betas": [1,1,1,1,1],
    "max_rounds": 10, "stop_tol": 0.0
  })");
  const AlgorithmConfig ex = resolve_config(config_spec_from_json(j_explicit), inst, net);
  CHECK(ex.betas.size() == 5);

  CHECK_THROWS_AS(
      config_spec_from_json(nlohmann::json::parse(
          R"({"algorithm":"nope","c":1,"betas":"auto","max_rounds":1,"stop_tol":0})")),
      ConfigError);
}

TEST_CASE("trace CSV carries the pinned header and 17 significant digits") {
  IterationTrace trace;
  RoundMetrics row;
  row.round = 3;
  row.grad_consensus_sq = 1.0 / 3.0;
  row.feas_dual_sq = 2.0 / 7.0;
  row.merit_diff = 1e-30;
  row.dist_to_star = 0.125;
  row.normalized_residual = 1.0;
  row.sum_violation = 0.0;
  trace.rows.push_back(row);

  const fs::path path = temp_dir() / "trace.csv";
  write_trace_csv(path, trace);

  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header ==
        "round,grad_consensus_sq,feas_dual_sq,merit_diff,dist_to_star,normalized_residual,"
        "sum_violation");
  std::getline(in, line);
  // 3,<grad>,... : parse back the second column and compare exactly
  std::stringstream ss(line);
  std::string tok;
  std::getline(ss, tok, ',');
  CHECK(tok == "3");
  std::getline(ss, tok, ',');
  CHECK(std::stod(tok) == 1.0 / 3.0);
  CHECK(tok.find('e') != std::string::npos);
  CHECK(tok.substr(tok.find('.') + 1, tok.find('e') - tok.find('.') - 1).size() == 16);
}

TEST_CASE("oracle solution JSON round-trips") {
  OracleSolution sol;
  sol.x_star = Eigen::MatrixXd::Random(4, 2);
  sol.kkt = {1e-12, 2e-9, 0.0};
  sol.iterations_used = 1234;
  const OracleSolution back = oracle_solution_from_json(oracle_solution_to_json(sol));
  CHECK((back.x_star - sol.x_star).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.kkt.gradient_consensus == sol.kkt.gradient_consensus);
  CHECK(back.iterations_used == 1234);
}
