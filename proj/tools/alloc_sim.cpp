// alloc-sim: configuration-driven experiment runner for the decentralized
// resource-allocation library. Subcommands:
//   run   <spec.json>  solve the oracle, run each configured algorithm,
//                      emit trace CSVs and a summary JSON
//   sweep <spec.json>  scalability sweep over a list of agent counts
//   oracle <instance.json>  solve one instance centrally and print residuals
//
// Exit codes: 0 success, 2 configuration error, 3 divergence, 4 oracle failure.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "dra/allocators.hpp"
#include "dra/common.hpp"
#include "dra/errors.hpp"
#include "dra/metrics.hpp"
#include "dra/network.hpp"
#include "dra/oracle.hpp"
#include "dra/problem.hpp"
#include "dra/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitOracle = 4;

fs::path resolve_output_dir(const json& spec) {
  if (const char* env = std::getenv("ALLOC_SIM_OUTPUT_DIR")) return fs::path(env);
  return fs::path(spec.value("output_dir", std::string("out")));
}

dra::ProblemInstance load_or_generate_instance(const json& spec) {
  const json& node = spec.at("instance");
  if (node.contains("load"))
    return dra::instance_from_json(dra::read_json_file(node.at("load").get<std::string>()));
  const json& gen = node.at("generate");
  return dra::generate_instance(gen.at("n").get<int>(), gen.at("p").get<int>(),
                                gen.value("seed", std::uint64_t{0}), gen.value("boxes", false),
                                gen.value("ensure_active", false));
}

struct NetworkBundle {
  dra::Network net;
  dra::WeightRule rule = dra::WeightRule::LazyMetropolis;
};

NetworkBundle load_or_generate_network(const json& spec, int n) {
  const json& node = spec.at("network");
  if (node.contains("load")) {
    const json j = dra::read_json_file(node.at("load").get<std::string>());
    NetworkBundle out{dra::network_from_json(j),
                      dra::weight_rule_from_string(
                          j.value("rule", std::string("lazy_metropolis")))};
    if (out.net.n() != n) throw dra::ConfigError("loaded network size does not match instance");
    return out;
  }
  const json& gen = node.at("generate");
  const dra::Topology topo =
      dra::build_graph(n, gen.at("ratio").get<double>(), gen.value("seed", std::uint64_t{0}));
  const dra::LKind kind =
      dra::lkind_from_string(gen.value("kind", std::string("half_i_minus_w")));
  // lazy Metropolis is the default; standard Metropolis-Hastings via "rule"
  const dra::WeightRule rule =
      dra::weight_rule_from_string(gen.value("rule", std::string("lazy_metropolis")));
  if (kind == dra::LKind::HalfIMinusW) {
    const dra::WeightMatrix wm = dra::metropolis_weights(topo, rule);
    return NetworkBundle{dra::build_L(topo, kind, &wm), rule};
  }
  return NetworkBundle{dra::build_L(topo, kind), rule};
}

dra::OracleSolution cached_oracle(const dra::ProblemInstance& instance, const fs::path& out_dir,
                                  double tol, long max_iters) {
  const fs::path cache_dir = out_dir / "cache";
  fs::create_directories(cache_dir);
  char tol_tag[32];
  std::snprintf(tol_tag, sizeof(tol_tag), "%.3e", tol);
  const fs::path key =
      cache_dir / (dra::instance_hash(instance) + "-" + std::string(tol_tag) + ".json");
  if (fs::exists(key)) return dra::oracle_solution_from_json(dra::read_json_file(key));
  const dra::OracleSolution sol = dra::solve_centralized(instance, tol, max_iters);
  dra::write_json_file(key, dra::oracle_solution_to_json(sol));
  return sol;
}

json run_summary(const dra::AlgorithmConfig& config, const dra::IterationTrace& trace,
                 const std::string& trace_file) {
  const dra::RoundMetrics& last = trace.rows.back();
  json j;
  j["algorithm"] = dra::to_string(config.algorithm);
  j["c"] = config.c;
  json betas = json::array();
  for (Eigen::Index i = 0; i < config.betas.size(); ++i) betas.push_back(config.betas(i));
  j["betas"] = std::move(betas);
  j["rounds"] = trace.rounds_completed;
  j["converged"] = trace.converged;
  j["message_count"] = trace.messages;
  j["trace_file"] = trace_file;
  j["final"] = {{"grad_consensus_sq", last.grad_consensus_sq},
                {"feas_dual_sq", last.feas_dual_sq},
                {"dist_to_star", last.dist_to_star},
                {"normalized_residual", last.normalized_residual},
                {"sum_violation", last.sum_violation}};
  j["rate_fit"] = nullptr;
  return j;
}

int command_run(const std::string& spec_path) {
  const json spec = dra::read_json_file(spec_path);
  const fs::path out_dir = resolve_output_dir(spec);
  fs::create_directories(out_dir);

  const dra::ProblemInstance instance = load_or_generate_instance(spec);
  const NetworkBundle nb = load_or_generate_network(spec, instance.n());
  dra::write_json_file(out_dir / "instance.json", dra::instance_to_json(instance));
  dra::write_json_file(out_dir / "network.json", dra::network_to_json(nb.net, nb.rule));

  const json oracle_cfg = spec.value("oracle", json::object());
  const double oracle_tol = oracle_cfg.value("tol", 1e-10);
  const long oracle_iters = oracle_cfg.value("max_iters", 1000000L);
  const dra::OracleSolution oracle = cached_oracle(instance, out_dir, oracle_tol, oracle_iters);
  std::printf("oracle: %ld iterations, feas %.3e, grad-consensus %.3e, compl %.3e\n",
              oracle.iterations_used, oracle.kkt.feasibility, oracle.kkt.gradient_consensus,
              oracle.kkt.complementarity);

  json summaries = json::array();
  int idx = 0;
  for (const json& cfg_json : spec.at("algorithms")) {
    const dra::ConfigSpec cs = dra::config_spec_from_json(cfg_json);
    const dra::AlgorithmConfig config = dra::resolve_config(cs, instance, nb.net);

    dra::RunHooks hooks;
    hooks.x_star = &oracle.x_star;
    const dra::IterationTrace trace = dra::run(instance, nb.net, config, hooks);

    const std::string trace_file =
        dra::to_string(config.algorithm) + "_" + std::to_string(idx) + ".csv";
    dra::write_trace_csv(out_dir / trace_file, trace);
    json summary = run_summary(config, trace, trace_file);

    // attach a geometric fit when the tail supports one
    try {
      const long hi = trace.rows.back().round;
      const long lo = hi / 5;
      const dra::RateFit fit =
          dra::fit_geometric_rate(trace, dra::Field::DistToStar, {lo, hi});
      summary["rate_fit"] = {{"delta_hat", fit.delta_hat},
                             {"rho_hat", fit.rho_hat},
                             {"r_squared", fit.r_squared},
                             {"window", {fit.window.first, fit.window.second}},
                             {"points", fit.points}};
    } catch (const dra::Error&) {
      // too few points above the floor; leave null
    }
    summaries.push_back(summary);
    std::printf("%s: rounds %ld, converged %d, final residuals %.3e / %.3e, messages %lld\n",
                dra::to_string(config.algorithm).c_str(), trace.rounds_completed,
                trace.converged ? 1 : 0, trace.rows.back().grad_consensus_sq,
                trace.rows.back().feas_dual_sq, trace.messages);
    ++idx;
  }

  json out;
  out["instance_hash"] = dra::instance_hash(instance);
  out["oracle"] = {{"tol", oracle_tol},
                   {"iterations_used", oracle.iterations_used},
                   {"kkt", {{"feasibility", oracle.kkt.feasibility},
                            {"gradient_consensus", oracle.kkt.gradient_consensus},
                            {"complementarity", oracle.kkt.complementarity}}}};
  out["runs"] = std::move(summaries);
  dra::write_json_file(out_dir / "summary.json", out);
  return kExitOk;
}

// Per-agent scalar quadratics with the extremal curvatures pinned, so the
// objective condition number stays fixed while n varies.
dra::ProblemInstance fixed_kappa_instance(int n, double kappa_f, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<dra::AgentObjective> obj;
  obj.reserve(n);
  for (int i = 0; i < n; ++i) {
    double q = 1.0 + (kappa_f - 1.0) * dra::uniform_unit(gen);
    if (i == 0) q = 1.0;
    if (i == 1) q = kappa_f;
    Eigen::MatrixXd Q(1, 1);
    Q(0, 0) = q;
    Eigen::VectorXd b(1);
    b(0) = dra::standard_normal(gen);
    obj.emplace_back(dra::QuadraticObjective{Q, b});
  }
  Eigen::MatrixXd r(n, 1);
  for (int i = 0; i < n; ++i) r(i, 0) = dra::standard_normal(gen);
  return dra::ProblemInstance(std::move(obj), std::nullopt, std::move(r), seed);
}

struct SweepCell {
  int n = 0;
  long iterations = -1;  // -1: did not reach the target
  double lambda_min_nz = 0.0;
  double kappa_f = 0.0;
  std::string status;  // "ok", "max_rounds", "diverged"
};

SweepCell sweep_cell(int n, const std::string& family, double kappa_f, std::uint64_t seed,
                     dra::Algorithm algorithm, double target, long max_rounds) {
  SweepCell cell;
  cell.n = n;
  cell.kappa_f = kappa_f;

  const dra::Topology topo =
      family == "path" ? dra::build_path(n) : dra::build_graph(n, 0.3, seed + n);
  const dra::WeightMatrix wm = dra::metropolis_weights(topo, dra::WeightRule::LazyMetropolis);
  const dra::Network net = dra::build_L(topo, dra::LKind::HalfIMinusW, &wm);
  cell.lambda_min_nz = net.lambda_min_nz;

  const dra::ProblemInstance instance = fixed_kappa_instance(n, kappa_f, seed * 31 + n);

  dra::AlgorithmConfig config;
  config.algorithm = algorithm;
  if (algorithm == dra::Algorithm::MirrorPExtra) {
    // c scaled as n / sqrt(mu L) through lambda_min_nz, beta = c
    config.c = 0.01 / std::sqrt(instance.strong_convexity() * instance.lipschitz() *
                                net.lambda_min_nz);
  } else {
    config.c = 0.45 / (instance.lipschitz() * net.lambda_max);
  }
  config.betas = Eigen::VectorXd::Constant(n, config.c);  // lambda_max <= 1 keeps B - cL PSD
  dra::validate_config(config, instance, net);

  const dra::OracleSolution oracle = dra::solve_centralized(instance, 1e-11);
  dra::RunState state = dra::init_state(instance, net, config, nullptr);
  const double dist0 = (state.X - oracle.x_star).norm();
  if (dist0 == 0.0) {
    cell.iterations = 0;
    cell.status = "ok";
    return cell;
  }
  const double cap = 1e12 * (1.0 + instance.resources().norm());
  for (long k = 0; k < max_rounds; ++k) {
    dra::step(state, instance, net, config);
    if (!state.X.allFinite() || state.X.norm() > cap) {
      cell.status = "diverged";
      return cell;
    }
    if ((state.X - oracle.x_star).norm() <= target * dist0) {
      cell.iterations = state.round;
      cell.status = "ok";
      return cell;
    }
  }
  cell.status = "max_rounds";
  return cell;
}

int command_sweep(const std::string& spec_path, std::vector<int> n_list, std::string family) {
  const json spec = dra::read_json_file(spec_path);
  const fs::path out_dir = resolve_output_dir(spec);
  fs::create_directories(out_dir);

  const json sw = spec.value("sweep", json::object());
  const double kappa_f = sw.value("kappa_f", 10.0);
  const std::uint64_t seed = sw.value("seed", std::uint64_t{1});
  const double target = sw.value("target", 1e-6);
  const long max_rounds = sw.value("max_rounds", 2000000L);
  const dra::Algorithm algorithm =
      dra::algorithm_from_string(sw.value("algorithm", std::string("mirror_p_extra")));
  if (n_list.empty()) n_list = {10, 20, 40, 80};
  if (family != "path" && family != "random")
    throw dra::ConfigError("sweep family must be 'path' or 'random'");

  std::vector<SweepCell> cells;
  std::printf("%6s %12s %14s %10s %s\n", "n", "iterations", "lambda_min_nz", "kappa_f", "status");
  for (int n : n_list) {
    SweepCell cell;
    try {
      cell = sweep_cell(n, family, kappa_f, seed, algorithm, target, max_rounds);
    } catch (const dra::DivergenceError&) {
      cell.n = n;
      cell.kappa_f = kappa_f;
      cell.status = "diverged";
    }
    std::printf("%6d %12ld %14.6e %10.2f %s\n", cell.n, cell.iterations, cell.lambda_min_nz,
                cell.kappa_f, cell.status.c_str());
    cells.push_back(cell);
  }

  // log-log fit over the cells that reached the target
  std::vector<double> ln_n, ln_it;
  for (const auto& cell : cells)
    if (cell.iterations > 0) {
      ln_n.push_back(std::log(static_cast<double>(cell.n)));
      ln_it.push_back(std::log(static_cast<double>(cell.iterations)));
    }
  double exponent = 0.0;
  if (ln_n.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < ln_n.size(); ++i) {
      mx += ln_n[i];
      my += ln_it[i];
    }
    mx /= ln_n.size();
    my /= ln_it.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ln_n.size(); ++i) {
      sxx += (ln_n[i] - mx) * (ln_n[i] - mx);
      sxy += (ln_n[i] - mx) * (ln_it[i] - my);
    }
    exponent = sxy / sxx;
  }
  std::printf("fitted log-log exponent: %.3f\n", exponent);

  json out;
  out["family"] = family;
  out["algorithm"] = dra::to_string(algorithm);
  out["target"] = target;
  out["kappa_f"] = kappa_f;
  out["exponent"] = exponent;
  json rows = json::array();
  for (const auto& cell : cells)
    rows.push_back({{"n", cell.n},
                    {"iterations", cell.iterations},
                    {"lambda_min_nz", cell.lambda_min_nz},
                    {"kappa_f", cell.kappa_f},
                    {"status", cell.status}});
  out["cells"] = std::move(rows);
  dra::write_json_file(out_dir / "sweep_summary.json", out);

  std::FILE* f = std::fopen((out_dir / "sweep.csv").string().c_str(), "w");
  if (f) {
    std::fputs("n,iterations,lambda_min_nz,kappa_f,status\n", f);
    for (const auto& cell : cells)
      std::fprintf(f, "%d,%ld,%.16e,%.16e,%s\n", cell.n, cell.iterations, cell.lambda_min_nz,
                   cell.kappa_f, cell.status.c_str());
    std::fclose(f);
  }
  return kExitOk;
}

int command_oracle(const std::string& instance_path) {
  const dra::ProblemInstance instance =
      dra::instance_from_json(dra::read_json_file(instance_path));
  const dra::OracleSolution sol = dra::solve_centralized(instance);
  std::printf(
      "iterations: %ld\nfeasibility: %.6e\ngradient_consensus: %.6e\ncomplementarity: %.6e\n",
      sol.iterations_used, sol.kkt.feasibility, sol.kkt.gradient_consensus,
      sol.kkt.complementarity);
  const fs::path out = fs::path(instance_path).replace_extension(".solution.json");
  dra::write_json_file(out, dra::oracle_solution_to_json(sol));
  std::printf("solution written to %s\n", out.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized resource allocation simulator"};
  app.require_subcommand(1);

  std::string run_spec;
  CLI::App* run_cmd = app.add_subcommand("run", "run the configured algorithms on one instance");
  run_cmd->add_option("spec", run_spec, "experiment spec JSON")->required();

  std::string sweep_spec, family = "path";
  std::string n_csv;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "scalability sweep over agent counts");
  sweep_cmd->add_option("spec", sweep_spec, "experiment spec JSON")->required();
  sweep_cmd->add_option("--n", n_csv, "comma-separated agent counts (default 10,20,40,80)");
  sweep_cmd->add_option("--family", family, "graph family: path | random");

  std::string oracle_instance;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "solve an instance centrally");
  oracle_cmd->add_option("instance", oracle_instance, "instance JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return command_run(run_spec);
    if (sweep_cmd->parsed()) {
      std::vector<int> n_list;
      if (!n_csv.empty()) {
        std::size_t pos = 0;
        while (pos < n_csv.size()) {
          std::size_t next = n_csv.find(',', pos);
          if (next == std::string::npos) next = n_csv.size();
          n_list.push_back(std::stoi(n_csv.substr(pos, next - pos)));
          pos = next + 1;
        }
      }
      return command_sweep(sweep_spec, n_list, family);
    }
    if (oracle_cmd->parsed()) return command_oracle(oracle_instance);
  } catch (const dra::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const dra::OracleError& e) {
    std::fprintf(stderr, "oracle failure: %s\n", e.what());
    return kExitOracle;
  } catch (const dra::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
