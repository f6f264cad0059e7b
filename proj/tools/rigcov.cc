#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rigcov/bearing.h"
#include "rigcov/config.h"
#include "rigcov/coverage.h"
#include "rigcov/error.h"
#include "rigcov/graph.h"
#include "rigcov/io.h"
#include "rigcov/recovery.h"
#include "rigcov/sim.h"

namespace {

using namespace rigcov;

// Exit 1 for bad input, 2 for failures while running.
int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kInvalidStep:
    case ErrorKind::kConfig:
    case ErrorKind::kIo:
    case ErrorKind::kUnsupportedDimension:
    case ErrorKind::kDegenerateEdge:
    case ErrorKind::kDegenerateSites:
      return 1;
    default:
      return 2;
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

int graph_gen(int n, std::uint64_t seed, double split, const std::string& out) {
  const HennebergResult r = henneberg_generate(n, seed, split);
  emit(graph_to_json(r.graph, &r.log), out);
  return 0;
}

int rigidity_check(const std::string& path, double tol) {
  const Framework fw = framework_from_json(read_text_file(path));
  const RigidityRank rr = rigidity_rank(fw, tol);
  nlohmann::json j;
  j["rank"] = rr.rank;
  j["bound"] = rr.bound;
  j["infinitesimally_bearing_rigid"] = rr.rank == rr.bound;
  j["smallest_nontrivial_singular_value"] = std::stod(format_number(rr.smallest_nontrivial));
  if (fw.dim() == 2 && fw.size() >= 2) j["laman"] = laman_check(fw.graph()).is_laman;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int recover_one(const std::string& graph_path, int lose, const std::string& out) {
  const Graph g = graph_from_json(read_text_file(graph_path));
  if (lose < 0 || lose >= g.num_vertices()) {
    throw Error(ErrorKind::kInvalidInput, "vertex " + std::to_string(lose) + " not in the graph");
  }
  const ClosingRanks repair = closing_ranks(g, lose);
  emit(repair_to_json(lose, repair, apply_repair(g, lose, repair.new_edges)), out);
  return 0;
}

int recover_plan(const std::string& graph_path, const std::string& out) {
  const Graph g = graph_from_json(read_text_file(graph_path));
  emit(plan_to_json(build_recovery_plan(g)), out);
  return 0;
}

int coverage(const std::string& config_path, const std::string& positions_path) {
  const SimConfig cfg = load_config(config_path);
  const auto positions = positions_from_json(read_text_file(positions_path));
  std::cout << format_number(coverage_cost(positions, cfg.region, cfg.density, cfg.quadrature)) << "\n";
  return 0;
}

int simulate(const std::string& config_path, const std::string& out_dir,
             std::optional<std::uint64_t> seed, int threads) {
  const SimConfig cfg = load_config(config_path, seed);
  RunOptions opts;
  opts.threads = threads;
  const SimTrace trace = run(cfg, opts);
  export_trace(trace, out_dir);
  std::cerr << "simulated " << trace.steps.size() << " steps, " << trace.partition_updates
            << " partition updates, outputs in " << out_dir << "\n";
  return 0;
}

int validate(const std::string& config_path) {
  const SimConfig cfg = load_config(config_path);
  validate_config(cfg);
  std::cerr << "config ok: " << cfg.robots.size() << " robots, " << cfg.graph.num_edges()
            << " edges, " << cfg.steps << " steps\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigid coverage control toolkit"};
  app.require_subcommand(1);

  auto* graph = app.add_subcommand("graph", "graph utilities");
  graph->require_subcommand(1);
  auto* gen = graph->add_subcommand("gen", "Henneberg-generated Laman graph");
  int gen_n = 6;
  std::uint64_t gen_seed = 1;
  double gen_split = 0.5;
  std::string gen_out;
  gen->add_option("--n", gen_n, "vertex count")->check(CLI::Range(2, 100000));
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--split-prob", gen_split, "edge splitting probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");

  auto* rigidity = app.add_subcommand("rigidity", "bearing rigidity");
  rigidity->require_subcommand(1);
  auto* check = rigidity->add_subcommand("check", "rank of the bearing rigidity matrix");
  std::string fw_path;
  double tol = kDefaultRankTolerance;
  check->add_option("file", fw_path, "framework JSON")->required();
  check->add_option("--tol", tol, "relative SVD tolerance");

  auto* recover = app.add_subcommand("recover", "closing ranks after a vertex loss");
  recover->require_subcommand(0, 1);
  std::string rec_graph, rec_out;
  int rec_lose = -1;
  recover->add_option("--graph", rec_graph, "graph JSON");
  recover->add_option("--lose", rec_lose, "vertex to remove");
  recover->add_option("--out", rec_out, "output file (stdout when omitted)");
  auto* plan = recover->add_subcommand("plan", "precompute repairs for every loss");
  std::string plan_graph, plan_out;
  plan->add_option("--graph", plan_graph, "graph JSON")->required();
  plan->add_option("--out", plan_out, "output file (stdout when omitted)");

  auto* cov = app.add_subcommand("coverage", "coverage cost");
  cov->require_subcommand(1);
  auto* cost = cov->add_subcommand("cost", "locational cost H of given positions");
  std::string cost_config, cost_positions;
  cost->add_option("--config", cost_config, "simulation config JSON")->required();
  cost->add_option("--positions", cost_positions, "positions JSON")->required();

  auto* sim = app.add_subcommand("simulate", "run the coverage loop");
  std::string sim_config, sim_out = "out";
  std::optional<std::uint64_t> sim_seed;
  int sim_threads = -1;
  sim->add_option("--config", sim_config, "simulation config JSON")->required();
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--seed", sim_seed, "override the config seed");
  sim->add_option("--threads", sim_threads, "solver threads (default RIGID_COVERAGE_THREADS)");

  auto* val = app.add_subcommand("validate", "check a simulation config");
  std::string val_config;
  val->add_option("--config", val_config, "simulation config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) return graph_gen(gen_n, gen_seed, gen_split, gen_out);
    if (*check) return rigidity_check(fw_path, tol);
    if (*plan) return recover_plan(plan_graph, plan_out);
    if (*recover) {
      if (rec_graph.empty() || rec_lose < 0) {
        std::cerr << "recover needs --graph and --lose\n" << recover->help();
        return 1;
      }
      return recover_one(rec_graph, rec_lose, rec_out);
    }
    if (*cost) return coverage(cost_config, cost_positions);
    if (*sim) return simulate(sim_config, sim_out, sim_seed, sim_threads);
    if (*val) return validate(val_config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
