#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "dra/allocators.hpp"
#include "dra/network.hpp"
#include "dra/oracle.hpp"
#include "dra/problem.hpp"
#include "dra/trace.hpp"

namespace dra {

std::string to_string(LKind kind);
LKind lkind_from_string(const std::string& s);
std::string to_string(WeightRule rule);
WeightRule weight_rule_from_string(const std::string& s);
std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& s);

// {"n", "edges", "seed", "kind"} with 0-based vertex indices; "rule" rides
// along so HalfIMinusW networks can be rebuilt.
nlohmann::json network_to_json(const Network& net, WeightRule rule);
Network network_from_json(const nlohmann::json& j);

// {n, p, seed, objectives:[{Q, b}], boxes:[{lo, hi}]|null, resources}
nlohmann::json instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const nlohmann::json& j);

// FNV-1a over the canonical JSON dump; used as the oracle-cache key.
std::string instance_hash(const ProblemInstance& instance);

nlohmann::json oracle_solution_to_json(const OracleSolution& sol);
OracleSolution oracle_solution_from_json(const nlohmann::json& j);

// Parsed but unresolved algorithm configuration ("auto" entries pending).
struct ConfigSpec {
  Algorithm algorithm = Algorithm::MirrorPExtra;
  std::optional<double> c;  // nullopt = "auto"
  enum class BetaMode { Auto, Heterogeneous, Explicit } beta_mode = BetaMode::Auto;
  Eigen::VectorXd betas;  // used when Explicit
  long max_rounds = 10000;
  double stop_tol = 1e-10;
  int record_every = 1;
  std::uint64_t seed = 0;
};

nlohmann::json config_spec_to_json(const ConfigSpec& spec);
ConfigSpec config_spec_from_json(const nlohmann::json& j);
AlgorithmConfig resolve_config(const ConfigSpec& spec, const ProblemInstance& instance,
                               const Network& net);

// CSV with header round,grad_consensus_sq,feas_dual_sq,merit_diff,
// dist_to_star,normalized_residual,sum_violation; 17 significant digits.
void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace dra
