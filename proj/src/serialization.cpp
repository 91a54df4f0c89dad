#include "dra/serialization.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "dra/errors.hpp"

namespace dra {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError("ragged matrix rows in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = row.at(c).get<double>();
  }
  return M;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace

std::string to_string(LKind kind) {
  switch (kind) {
    case LKind::StandardLaplacian:
      return "standard_laplacian";
    case LKind::NormalizedLaplacian:
      return "normalized_laplacian";
    case LKind::HalfIMinusW:
      return "half_i_minus_w";
  }
  throw ConfigError("unknown LKind");
}

LKind lkind_from_string(const std::string& s) {
  if (s == "standard_laplacian") return LKind::StandardLaplacian;
  if (s == "normalized_laplacian") return LKind::NormalizedLaplacian;
  if (s == "half_i_minus_w") return LKind::HalfIMinusW;
  throw ConfigError("unknown network kind: " + s);
}

std::string to_string(WeightRule rule) {
  return rule == WeightRule::LazyMetropolis ? "lazy_metropolis" : "metropolis_hastings";
}

WeightRule weight_rule_from_string(const std::string& s) {
  if (s == "lazy_metropolis") return WeightRule::LazyMetropolis;
  if (s == "metropolis_hastings") return WeightRule::MetropolisHastings;
  throw ConfigError("unknown weight rule: " + s);
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::MirrorPExtra:
      return "mirror_p_extra";
    case Algorithm::MirrorExtra:
      return "mirror_extra";
    case Algorithm::MirrorPGExtra:
      return "mirror_pg_extra";
  }
  throw ConfigError("unknown Algorithm");
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "mirror_p_extra") return Algorithm::MirrorPExtra;
  if (s == "mirror_extra") return Algorithm::MirrorExtra;
  if (s == "mirror_pg_extra") return Algorithm::MirrorPGExtra;
  throw ConfigError("unknown algorithm: " + s);
}

nlohmann::json network_to_json(const Network& net, WeightRule rule) {
  nlohmann::json j;
  j["n"] = net.topology.n;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : net.topology.edges) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["seed"] = net.topology.seed;
  j["kind"] = to_string(net.kind);
  j["rule"] = to_string(rule);
  return j;
}

Network network_from_json(const nlohmann::json& j) {
  Topology topo;
  topo.n = j.at("n").get<int>();
  for (const auto& e : j.at("edges"))
    topo.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  topo.seed = j.value("seed", std::uint64_t{0});
  topo.finalize();
  const LKind kind = lkind_from_string(j.at("kind").get<std::string>());
  if (kind == LKind::HalfIMinusW) {
    const WeightRule rule =
        weight_rule_from_string(j.value("rule", std::string("lazy_metropolis")));
    const WeightMatrix weights = metropolis_weights(topo, rule);
    return build_L(topo, kind, &weights);
  }
  return build_L(topo, kind);
}

nlohmann::json instance_to_json(const ProblemInstance& instance) {
  nlohmann::json j;
  j["n"] = instance.n();
  j["p"] = instance.p();
  j["seed"] = instance.seed();
  nlohmann::json objectives = nlohmann::json::array();
  for (int i = 0; i < instance.n(); ++i) {
    const QuadraticObjective* quad = instance.objective(i).quadratic();
    if (!quad) throw ConfigError("instance_to_json: only quadratic objectives serialize");
    objectives.push_back({{"Q", matrix_to_json(quad->Q)}, {"b", vector_to_json(quad->b)}});
  }
  j["objectives"] = std::move(objectives);
  if (instance.has_boxes()) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& box : instance.boxes())
      boxes.push_back({{"lo", vector_to_json(box.lo)}, {"hi", vector_to_json(box.hi)}});
    j["boxes"] = std::move(boxes);
  } else {
    j["boxes"] = nullptr;
  }
  j["resources"] = matrix_to_json(instance.resources());
  return j;
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int p = j.at("p").get<int>();
  std::vector<AgentObjective> objectives;
  objectives.reserve(n);
  for (const auto& obj : j.at("objectives")) {
    QuadraticObjective quad;
    quad.Q = matrix_from_json(obj.at("Q"));
    quad.b = vector_from_json(obj.at("b"));
    objectives.emplace_back(std::move(quad));
  }
  std::optional<std::vector<BoxSet>> boxes;
  if (!j.at("boxes").is_null()) {
    std::vector<BoxSet> bs;
    for (const auto& box : j.at("boxes"))
      bs.push_back(BoxSet{vector_from_json(box.at("lo")), vector_from_json(box.at("hi"))});
    boxes = std::move(bs);
  }
  Eigen::MatrixXd resources = matrix_from_json(j.at("resources"));
  if (static_cast<int>(objectives.size()) != n || resources.rows() != n || resources.cols() != p)
    throw ConfigError("instance_from_json: inconsistent shapes");
  return ProblemInstance(std::move(objectives), std::move(boxes), std::move(resources),
                         j.value("seed", std::uint64_t{0}));
}

std::string instance_hash(const ProblemInstance& instance) {
  const std::string dump = instance_to_json(instance).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

nlohmann::json oracle_solution_to_json(const OracleSolution& sol) {
  nlohmann::json j;
  j["x_star"] = matrix_to_json(sol.x_star);
  j["kkt"] = {{"feasibility", sol.kkt.feasibility},
              {"gradient_consensus", sol.kkt.gradient_consensus},
              {"complementarity", sol.kkt.complementarity}};
  j["iterations_used"] = sol.iterations_used;
  return j;
}

OracleSolution oracle_solution_from_json(const nlohmann::json& j) {
  OracleSolution sol;
  sol.x_star = matrix_from_json(j.at("x_star"));
  sol.kkt.feasibility = j.at("kkt").at("feasibility").get<double>();
  sol.kkt.gradient_consensus = j.at("kkt").at("gradient_consensus").get<double>();
  sol.kkt.complementarity = j.at("kkt").at("complementarity").get<double>();
  sol.iterations_used = j.at("iterations_used").get<long>();
  return sol;
}

nlohmann::json config_spec_to_json(const ConfigSpec& spec) {
  nlohmann::json j;
  j["algorithm"] = to_string(spec.algorithm);
  if (spec.c) {
    j["c"] = *spec.c;
  } else {
    j["c"] = "auto";
  }
  switch (spec.beta_mode) {
    case ConfigSpec::BetaMode::Auto:
      j["betas"] = "auto";
      break;
    case ConfigSpec::BetaMode::Heterogeneous:
      j["betas"] = "heterogeneous";
      break;
    case ConfigSpec::BetaMode::Explicit:
      j["betas"] = vector_to_json(spec.betas);
      break;
  }
  j["max_rounds"] = spec.max_rounds;
  j["stop_tol"] = spec.stop_tol;
  j["record_every"] = spec.record_every;
  j["seed"] = spec.seed;
  return j;
}

ConfigSpec config_spec_from_json(const nlohmann::json& j) {
  ConfigSpec spec;
  spec.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  const auto& c = j.at("c");
  if (c.is_string()) {
    if (c.get<std::string>() != "auto") throw ConfigError("config: c must be a number or \"auto\"");
  } else {
    spec.c = c.get<double>();
  }
  const auto& betas = j.at("betas");
  if (betas.is_string()) {
    const auto mode = betas.get<std::string>();
    if (mode == "auto") {
      spec.beta_mode = ConfigSpec::BetaMode::Auto;
    } else if (mode == "heterogeneous") {
      spec.beta_mode = ConfigSpec::BetaMode::Heterogeneous;
    } else {
      throw ConfigError("config: betas must be an array, \"auto\", or \"heterogeneous\"");
    }
  } else {
    spec.beta_mode = ConfigSpec::BetaMode::Explicit;
    spec.betas = vector_from_json(betas);
  }
  spec.max_rounds = j.at("max_rounds").get<long>();
  spec.stop_tol = j.at("stop_tol").get<double>();
  spec.record_every = j.value("record_every", 1);
  spec.seed = j.value("seed", std::uint64_t{0});
  return spec;
}

AlgorithmConfig resolve_config(const ConfigSpec& spec, const ProblemInstance& instance,
                               const Network& net) {
  AlgorithmConfig config;
  config.algorithm = spec.algorithm;
  config.max_rounds = spec.max_rounds;
  config.stop_tol = spec.stop_tol;
  config.record_every = spec.record_every;
  config.seed = spec.seed;

  if (spec.c) {
    config.c = *spec.c;
  } else {
    config.c = suggest_parameters(instance, net, spec.algorithm).c;
  }
  switch (spec.beta_mode) {
    case ConfigSpec::BetaMode::Auto:
      config.betas = Eigen::VectorXd::Constant(instance.n(), config.c * net.lambda_max);
      break;
    case ConfigSpec::BetaMode::Heterogeneous:
      config.betas = heterogeneous_betas(instance.n(), config.c, net.lambda_max, spec.seed);
      break;
    case ConfigSpec::BetaMode::Explicit:
      config.betas = spec.betas;
      break;
  }
  validate_config(config, instance, net);
  return config;
}

void write_trace_csv(const std::filesystem::path& path, const IterationTrace& trace) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot open trace file for writing: " + path.string());
  std::fputs(
      "round,grad_consensus_sq,feas_dual_sq,merit_diff,dist_to_star,normalized_residual,"
      "sum_violation\n",
      f);
  for (const auto& row : trace.rows) {
    std::fprintf(f, "%ld,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", row.round, row.grad_consensus_sq,
                 row.feas_dual_sq, row.merit_diff, row.dist_to_star, row.normalized_residual,
                 row.sum_violation);
  }
  std::fclose(f);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path.string());
  out << j.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace dra
