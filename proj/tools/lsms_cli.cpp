// lsms_cli: solve single instances, run the scenario grid, dump per-period
// plotting data, or compare the heuristic against the grid-search oracle.
//
// Exit codes: 0 ok, 2 bad input, 3 infeasible, 4 solver failure, 5 internal
// contract violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lsms/lsms.hpp"

namespace fs = std::filesystem;
using namespace lsms;

namespace {

enum Exit : int { ok = 0, bad_input = 2, infeasible = 3, solver_failed = 4, contract = 5 };

struct HeuristicFlags {
  double eps = 1e-6;
  std::size_t max_iter = 100;
  bool strict_flow = false;
  bool keep_incumbent = false;

  void attach(CLI::App* app) {
    app->add_option("--eps", eps, "relative convergence tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "cycle limit")->check(CLI::PositiveNumber);
    app->add_flag("--strict-flow", strict_flow, "enforce chemical line flow per period");
    app->add_flag("--keep-incumbent", keep_incumbent,
                  "keep the previous plan when it ties the production LP optimum");
  }

  HeuristicConfig config() const {
    HeuristicConfig cfg;
    cfg.eps = eps;
    cfg.max_iter = max_iter;
    cfg.flow = strict_flow ? FlowMode::per_period : FlowMode::aggregate;
    cfg.keep_incumbent_on_tie = keep_incumbent;
    return cfg;
  }
};

struct CellFlags {
  std::string horizon = "T10";
  std::string capacity = "high";
  std::string inventory = "high";
  std::size_t replicate = 0;
  std::uint64_t base_seed = gen::kDefaultBaseSeed;

  void attach(CLI::App* app) {
    app->add_option("--horizon", horizon, "T10, T20 or T30");
    app->add_option("--capacity", capacity, "low, med or high");
    app->add_option("--inventory", inventory, "low, med or high");
    app->add_option("--replicate", replicate, "replicate number within the cell");
    app->add_option("--base-seed", base_seed, "base seed of the demand generator");
  }

  gen::GeneratorConfig config() const {
    const auto h = gen::parse_horizon(horizon);
    const auto c = gen::parse_level(capacity);
    const auto i = gen::parse_level(inventory);
    if (!h) throw input_error("unknown horizon " + horizon);
    if (!c) throw input_error("unknown capacity level " + capacity);
    if (!i) throw input_error("unknown inventory level " + inventory);
    gen::GeneratorConfig cfg;
    cfg.horizon = *h;
    cfg.capacity = *c;
    cfg.inventory = *i;
    cfg.replicate = replicate;
    cfg.seed = gen::derive_seed(base_seed, {gen::index_of(*h), replicate});
    return cfg;
  }
};

int cmd_solve(const std::string& instance_path, const CellFlags& cell, const HeuristicFlags& hf,
              const fs::path& out_dir) {
  io::json doc;
  Instance inst;
  if (!instance_path.empty()) {
    inst = io::read_instance(instance_path);
  } else {
    const auto cfg = cell.config();
    inst = gen::build_instance(cfg);
    doc["config"] = io::to_json(cfg);
  }
  const auto hcfg = hf.config();
  auto result = two_phase(inst, hcfg);

  fs::create_directories(out_dir);
  doc["instance"] = io::to_json(inst);
  doc["trace"] = io::to_json(result.trace);
  if (result.solution) {
    doc["solution"] = io::to_json(*result.solution);
    doc["feasibility"] =
        io::to_json(check_feasibility(inst, *result.solution, kDefaultFeasibilityTol, hcfg.flow));
  }
  io::write_json((out_dir / "solution.json").string(), doc);
  {
    std::ofstream trace(out_dir / "trace.csv");
    write_trace_csv(trace, result.trace);
  }

  if (result.trace.termination == Termination::subproblem_infeasible) {
    std::cerr << "infeasible: " << result.trace.diagnostics << '\n';
    return infeasible;
  }
  const auto stats = harness::run_stats(inst, *result.solution);
  std::cout << std::fixed << std::setprecision(2) << "objective " << result.solution->objective
            << "\ncycles " << result.trace.cycle_count() << " ("
            << to_string(result.trace.termination) << ")\ncpu_ms " << result.trace.total_ms
            << std::setprecision(4) << "\ns_bar " << stats.s_bar << "\nu_bar " << stats.u_bar
            << "\nv1_bar " << stats.v1_bar << '\n';
  return ok;
}

int cmd_grid(const harness::GridOptions& opt, const fs::path& out_dir) {
  const auto result = harness::run_grid(opt, out_dir);
  std::size_t failures = 0;
  for (const auto& c : result.cells) failures += c.failures;
  harness::write_summary_csv(std::cout, result.cells, opt.reproducible);
  if (failures) std::cerr << failures << " run(s) failed; see runs.csv\n";
  return ok;
}

// Solves one demand draw at every capacity level and writes a per-period
// series for each, plus the per-level PL1 averages.
int cmd_figures(CellFlags cell, bool pick_most_loaded, std::size_t candidates,
                const HeuristicFlags& hf, const fs::path& out_dir) {
  auto base = cell.config();
  if (pick_most_loaded) {
    cell.replicate = harness::most_loaded_replicate(base.horizon, candidates, cell.base_seed);
    base = cell.config();
  }
  fs::create_directories(out_dir);
  const auto hcfg = hf.config();
  std::ofstream levels(out_dir / "v1_levels.csv");
  levels << "T,capacity_level,m_t,v1_bar\n";
  int status = ok;
  for (auto cap : gen::kLevels) {
    auto cfg = base;
    cfg.capacity = cap;
    const auto inst = gen::build_instance(cfg);
    const auto result = two_phase(inst, hcfg);
    if (result.trace.termination == Termination::subproblem_infeasible) {
      std::cerr << "capacity " << gen::to_string(cap) << ": " << result.trace.diagnostics << '\n';
      status = infeasible;
      continue;
    }
    const std::string name = "figure_" + std::string(gen::to_string(cfg.horizon)) + "_" +
                             std::string(gen::to_string(cap)) + "_" +
                             std::string(gen::to_string(cfg.inventory)) + ".csv";
    harness::emit_figure_data(inst, *result.solution, out_dir / name, hcfg.flow);
    levels << cfg.num_periods() << ',' << gen::to_string(cap) << ',' << gen::capacity_minutes(cap)
           << ',' << std::fixed << std::setprecision(4)
           << harness::run_stats(inst, *result.solution).v1_bar << std::defaultfloat << '\n';
    std::cout << name << '\n';
  }
  std::cout << "replicate " << cell.replicate << '\n';
  return status;
}

int cmd_oracle_compare(std::size_t count, std::size_t periods, std::size_t points,
                       std::uint64_t base_seed, std::size_t workers, const HeuristicFlags& hf,
                       const fs::path& out_dir) {
  if (periods < 1 || periods > 3) throw input_error("oracle comparisons need 1 <= periods <= 3");
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "oracle_compare.csv");
  csv << "instance,T,capacity_level,inventory_level,seed,two_phase,oracle,gap,cycles\n";
  csv << std::setprecision(12);
  const auto hcfg = hf.config();
  OracleOptions oopt;
  oopt.flow = hcfg.flow;
  oopt.points_per_machine = {points, 2, 2};
  oopt.workers = workers;
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto cap = gen::kLevels[k % 3];
    const auto inv = gen::kLevels[(k / 3) % 3];
    const auto cfg = gen::scaled_config(periods, cap, inv, gen::derive_seed(base_seed, {99, k}));
    const auto inst = gen::build_instance(cfg);
    const auto heur = two_phase(inst, hcfg);
    const auto orc = grid_search_solve(inst, points, oopt);
    csv << k << ',' << periods << ',' << gen::to_string(cap) << ',' << gen::to_string(inv) << ','
        << cfg.seed << ',';
    if (!heur.solution || !orc.solution) {
      csv << ",,,\n";
      continue;
    }
    const double gap = (heur.solution->objective - orc.objective) /
                       std::max(1.0, std::abs(orc.objective));
    worst = std::max(worst, gap);
    csv << heur.solution->objective << ',' << orc.objective << ',' << gap << ','
        << heur.trace.cycle_count() << '\n';
  }
  std::cout << "worst relative gap " << worst << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lot sizing with machine speed selection"};
  app.require_subcommand(1);

  HeuristicFlags heur;
  CellFlags cell;
  std::string out_dir = "out";

  auto* solve = app.add_subcommand("solve", "solve one instance with the two-phase heuristic");
  std::string instance_path;
  solve->add_option("--instance", instance_path, "instance JSON file (default: generated cell)");
  cell.attach(solve);
  heur.attach(solve);
  solve->add_option("-o,--out", out_dir, "output directory");

  auto* grid = app.add_subcommand("grid", "run every scenario cell and replicate");
  harness::GridOptions gopt;
  bool per_cell = false;
  grid->add_option("--seeds", gopt.seeds_per_cell, "replicates per cell")->check(CLI::PositiveNumber);
  grid->add_option("--base-seed", gopt.base_seed, "base seed of the demand generator");
  grid->add_flag("--per-cell-seeds", per_cell, "draw demand independently for every cell");
  grid->add_option("--workers", gopt.workers, "concurrent runs");
  grid->add_flag("--reproducible", gopt.reproducible, "omit timestamps and timing columns");
  grid->add_flag("--write-solutions", gopt.write_solutions, "store every solution as JSON");
  heur.attach(grid);
  grid->add_option("-o,--out", out_dir, "output directory");

  auto* figures = app.add_subcommand("figures", "per-period series at every capacity level");
  bool most_loaded = false;
  std::size_t candidates = 10;
  cell.attach(figures);
  figures->add_flag("--most-loaded", most_loaded, "use the replicate with the busiest period");
  figures->add_option("--candidates", candidates, "replicates searched by --most-loaded");
  heur.attach(figures);
  figures->add_option("-o,--out", out_dir, "output directory");

  auto* oracle = app.add_subcommand("oracle-compare", "heuristic versus grid search on toy instances");
  std::size_t count = 20, periods = 2, points = 9, workers = 1;
  std::uint64_t oracle_seed = gen::kDefaultBaseSeed;
  oracle->add_option("--instances", count, "number of toy instances");
  oracle->add_option("--periods", periods, "periods per toy instance (1..3)");
  oracle->add_option("--points", points, "grid points on PL1");
  oracle->add_option("--base-seed", oracle_seed, "base seed of the demand generator");
  oracle->add_option("--workers", workers, "concurrent grid scans");
  heur.attach(oracle);
  oracle->add_option("-o,--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bad_input;
  }

  try {
    if (*solve) return cmd_solve(instance_path, cell, heur, out_dir);
    if (*grid) {
      gopt.sharing = per_cell ? gen::SeedSharing::per_cell : gen::SeedSharing::per_horizon;
      gopt.heuristic = heur.config();
      return cmd_grid(gopt, out_dir);
    }
    if (*figures) return cmd_figures(cell, most_loaded, candidates, heur, out_dir);
    if (*oracle) return cmd_oracle_compare(count, periods, points, oracle_seed, workers, heur, out_dir);
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return bad_input;
  } catch (const solver_failure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return solver_failed;
  } catch (const contract_error& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return contract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bad_input;
  }
  return ok;
}
