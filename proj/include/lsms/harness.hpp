#pragma once

// Scenario-grid runner and report writers: per-run detail rows, per-cell
// summaries in the column order of the published results table, and
// per-period series for plotting.

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lsms/errors.hpp"
#include "lsms/generator.hpp"
#include "lsms/heuristic.hpp"
#include "lsms/io.hpp"
#include "lsms/model.hpp"

namespace lsms::harness {

enum class RunStatus { ok, infeasible, solver_failure, error };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::solver_failure: return "solver_failure";
    case RunStatus::error: return "error";
  }
  return "unknown";
}

/// Averages of one solved instance.
struct RunStats {
  double s_bar = 0.0;   // mean end inventory over all (product, period) cells
  double u_bar = 0.0;   // mean WIP over all (product, period) cells
  double v1_bar = 0.0;  // mean PL1 processing time over periods
};

inline RunStats run_stats(const Instance& inst, const Solution& sol) {
  RunStats st;
  const double cells = static_cast<double>(inst.num_products * inst.num_periods);
  for (double s : sol.end_inventory.flat()) st.s_bar += s;
  for (double u : sol.wip_inventory.flat()) st.u_bar += u;
  st.s_bar /= cells;
  st.u_bar /= cells;
  for (std::size_t t = 0; t < inst.num_periods; ++t) st.v1_bar += sol.proc_time(machine::pl1, t);
  st.v1_bar /= static_cast<double>(inst.num_periods);
  return st;
}

struct RunRecord {
  gen::GeneratorConfig config;
  Instance instance;
  RunStatus status = RunStatus::ok;
  std::string message;
  std::optional<Solution> solution;
  HeuristicTrace trace;
  RunStats stats;
  double cpu_ms = 0.0;  // wall clock of the heuristic call only
};

/// Builds the instance for `cfg` and runs the heuristic; failures are
/// recorded on the returned row rather than thrown.
inline RunRecord solve_config(const gen::GeneratorConfig& cfg, const HeuristicConfig& hcfg) {
  RunRecord rec;
  rec.config = cfg;
  try {
    rec.instance = gen::build_instance(cfg);
    auto result = two_phase(rec.instance, hcfg);
    rec.trace = std::move(result.trace);
    rec.cpu_ms = rec.trace.total_ms;
    if (rec.trace.termination == Termination::subproblem_infeasible || !result.solution) {
      rec.status = RunStatus::infeasible;
      rec.message = rec.trace.diagnostics;
      return rec;
    }
    rec.solution = std::move(result.solution);
    rec.stats = run_stats(rec.instance, *rec.solution);
  } catch (const solver_failure& e) {
    rec.status = RunStatus::solver_failure;
    rec.message = e.what();
  } catch (const std::exception& e) {
    rec.status = RunStatus::error;
    rec.message = e.what();
  }
  return rec;
}

struct CellSummary {
  gen::Horizon horizon = gen::Horizon::t10;
  std::size_t periods = 0;
  gen::Level capacity = gen::Level::low;
  double capacity_minutes = 0.0;
  gen::Level inventory = gen::Level::low;
  double z_bar = 0.0;
  double cpu_ms = 0.0;
  double iterations = 0.0;
  double s_bar = 0.0;
  double u_bar = 0.0;
  double v1_bar = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
};

/// Means per (horizon, capacity, inventory) cell over the successful runs,
/// in grid order.
inline std::vector<CellSummary> summarize(const std::vector<RunRecord>& runs) {
  std::vector<CellSummary> cells;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> slot;
  for (const auto& r : runs) {
    const auto key = std::make_tuple(gen::index_of(r.config.horizon), gen::index_of(r.config.capacity),
                                     gen::index_of(r.config.inventory));
    auto [it, inserted] = slot.try_emplace(key, cells.size());
    if (inserted) {
      CellSummary c;
      c.horizon = r.config.horizon;
      c.periods = r.config.num_periods();
      c.capacity = r.config.capacity;
      c.capacity_minutes = gen::capacity_minutes(r.config.capacity);
      c.inventory = r.config.inventory;
      cells.push_back(c);
    }
    auto& c = cells[it->second];
    if (r.status != RunStatus::ok) {
      ++c.failures;
      continue;
    }
    ++c.runs;
    c.z_bar += r.solution->objective;
    c.cpu_ms += r.cpu_ms;
    c.iterations += static_cast<double>(r.trace.cycle_count());
    c.s_bar += r.stats.s_bar;
    c.u_bar += r.stats.u_bar;
    c.v1_bar += r.stats.v1_bar;
  }
  for (auto& c : cells) {
    if (c.runs == 0) continue;
    const double n = static_cast<double>(c.runs);
    c.z_bar /= n;
    c.cpu_ms /= n;
    c.iterations /= n;
    c.s_bar /= n;
    c.u_bar /= n;
    c.v1_bar /= n;
  }
  return cells;
}

struct GridOptions {
  std::size_t seeds_per_cell = 10;
  std::uint64_t base_seed = gen::kDefaultBaseSeed;
  gen::SeedSharing sharing = gen::SeedSharing::per_horizon;
  HeuristicConfig heuristic;
  std::size_t workers = 1;
  bool reproducible = false;    // omit the timestamp line and timing columns
  bool write_solutions = false; // one JSON file per run under solutions/
};

struct GridResult {
  std::vector<RunRecord> runs;
  std::vector<CellSummary> cells;
};

/// Runs every (cell, replicate) of the grid. Results are stored by grid
/// position, so the output order does not depend on the worker count.
inline GridResult execute_grid(const GridOptions& opt) {
  const auto configs = gen::enumerate_grid(opt.seeds_per_cell, opt.base_seed, opt.sharing);
  GridResult result;
  result.runs.resize(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++)
      result.runs[k] = solve_config(configs[k], opt.heuristic);
  };
  const std::size_t workers = std::max<std::size_t>(1, opt.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  result.cells = summarize(result.runs);
  return result;
}

namespace detail {

inline std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

}  // namespace detail

inline constexpr const char* kAveragingNote =
    "s_bar and u_bar average over every (product, period) cell and replicate; "
    "v1_bar averages PL1 processing time over periods and replicates";

inline void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells,
                              bool reproducible) {
  if (!reproducible) os << "# generated " << detail::timestamp() << "\n";
  os << "# " << kAveragingNote << "\n";
  os << "T,m_t,inventory_level,z_bar,cpu_ms,iterations,s_bar,u_bar,v1_bar,runs,failures\n";
  for (const auto& c : cells) {
    os << c.periods << ',' << c.capacity_minutes << ',' << gen::to_string(c.inventory) << ','
       << std::fixed << std::setprecision(2) << c.z_bar << ',';
    if (reproducible)
      os << "NA";
    else
      os << c.cpu_ms;
    os << ',' << std::setprecision(2) << c.iterations << ',' << std::setprecision(4) << c.s_bar
       << ',' << c.u_bar << ',' << std::setprecision(2) << c.v1_bar << std::defaultfloat
       << std::setprecision(10) << ',' << c.runs << ',' << c.failures << '\n';
  }
}

inline void write_runs_csv(std::ostream& os, const std::vector<RunRecord>& runs, bool reproducible) {
  if (!reproducible) os << "# generated " << detail::timestamp() << "\n";
  os << "run,horizon,T,capacity_level,m_t,inventory_level,replicate,seed,total_demand,status,"
        "objective,cpu_ms,cycles,termination,s_bar,u_bar,v1_bar,message\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& r = runs[k];
    os << k << ',' << gen::to_string(r.config.horizon) << ',' << r.config.num_periods() << ','
       << gen::to_string(r.config.capacity) << ',' << gen::capacity_minutes(r.config.capacity) << ','
       << gen::to_string(r.config.inventory) << ',' << r.config.replicate << ',' << r.config.seed
       << ',' << (r.instance.num_periods ? r.instance.total_demand() : 0.0) << ','
       << to_string(r.status) << ',';
    if (r.solution) os << r.solution->objective;
    os << ',';
    if (reproducible)
      os << "NA";
    else
      os << r.cpu_ms;
    os << ',' << r.trace.cycle_count() << ',' << to_string(r.trace.termination) << ',';
    if (r.solution) os << r.stats.s_bar << ',' << r.stats.u_bar << ',' << r.stats.v1_bar;
    else os << ",,";
    std::string msg = r.message;
    for (auto& ch : msg)
      if (ch == ',' || ch == '\n') ch = ';';
    os << ',' << msg << '\n';
  }
  os.precision(old);
}

/// Mean PL1 processing time per (horizon, capacity level), averaged over
/// inventory levels and replicates.
inline void write_v1_levels_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "T,capacity_level,m_t,v1_bar\n";
  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> acc;
  for (const auto& c : cells) {
    if (c.runs == 0) continue;
    auto& [sum, n] = acc[{c.periods, gen::index_of(c.capacity)}];
    sum += c.v1_bar * static_cast<double>(c.runs);
    n += c.runs;
  }
  for (const auto& [key, val] : acc) {
    const auto level = gen::kLevels[key.second];
    os << key.first << ',' << gen::to_string(level) << ',' << gen::capacity_minutes(level) << ','
       << std::fixed << std::setprecision(4) << val.first / static_cast<double>(val.second)
       << std::defaultfloat << '\n';
  }
}

/// Runs the grid and writes summary.csv, runs.csv, v1_levels.csv and
/// grid.csv into `out_dir`.
inline GridResult run_grid(const GridOptions& opt, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto result = execute_grid(opt);
  {
    auto out = detail::open_out(out_dir / "grid.csv");
    gen::write_grid_csv(out, gen::enumerate_grid(opt.seeds_per_cell, opt.base_seed, opt.sharing));
  }
  {
    auto out = detail::open_out(out_dir / "summary.csv");
    write_summary_csv(out, result.cells, opt.reproducible);
  }
  {
    auto out = detail::open_out(out_dir / "runs.csv");
    write_runs_csv(out, result.runs, opt.reproducible);
  }
  {
    auto out = detail::open_out(out_dir / "v1_levels.csv");
    write_v1_levels_csv(out, result.cells);
  }
  if (opt.write_solutions) {
    std::filesystem::create_directories(out_dir / "solutions");
    for (std::size_t k = 0; k < result.runs.size(); ++k) {
      const auto& r = result.runs[k];
      if (!r.solution) continue;
      io::json doc{{"config", io::to_json(r.config)},
                   {"instance", io::to_json(r.instance)},
                   {"solution", io::to_json(*r.solution)}};
      std::ostringstream name;
      name << "run_" << std::setw(4) << std::setfill('0') << k << ".json";
      io::write_json((out_dir / "solutions" / name.str()).string(), doc);
    }
  }
  return result;
}

struct FigurePoint {
  std::size_t period = 0;      // 1-based
  double demand = 0.0;         // sum over products
  double v1 = 0.0;             // PL1 processing time
  double finished = 0.0;       // sum over products of y[i][last machine][t]
  double end_inventory = 0.0;  // sum over products
  double wip_inventory = 0.0;  // sum over products
  double pl1_production = 0.0; // sum over products of y[i][PL1][t]
};

using FigureSeries = std::vector<FigurePoint>;

/// Per-period series of a feasible solution; contract_error otherwise.
inline FigureSeries figure_series(const Instance& inst, const Solution& sol,
                                  FlowMode flow = FlowMode::aggregate) {
  if (!check_feasibility(inst, sol, kDefaultFeasibilityTol, flow).feasible())
    throw contract_error("figure data needs a feasible solution");
  FigureSeries series(inst.num_periods);
  for (std::size_t t = 0; t < inst.num_periods; ++t) {
    auto& p = series[t];
    p.period = t + 1;
    p.v1 = sol.proc_time(machine::pl1, t);
    for (std::size_t i = 0; i < inst.num_products; ++i) {
      p.demand += inst.demand(i, t);
      p.finished += sol.production(i, inst.last_machine(i), t);
      p.end_inventory += sol.end_inventory(i, t);
      p.wip_inventory += sol.wip_inventory(i, t);
      p.pl1_production += sol.production(i, machine::pl1, t);
    }
  }
  return series;
}

inline void write_figure_csv(std::ostream& os, const FigureSeries& series) {
  os << "t,demand,v1,finished_production,end_inventory,wip_inventory,pl1_production\n";
  const auto old = os.precision(17);
  for (const auto& p : series)
    os << p.period << ',' << p.demand << ',' << p.v1 << ',' << p.finished << ',' << p.end_inventory
       << ',' << p.wip_inventory << ',' << p.pl1_production << '\n';
  os.precision(old);
}

inline FigureSeries emit_figure_data(const Instance& inst, const Solution& sol,
                                     const std::filesystem::path& path,
                                     FlowMode flow = FlowMode::aggregate) {
  auto series = figure_series(inst, sol, flow);
  auto out = detail::open_out(path);
  write_figure_csv(out, series);
  return series;
}

/// Among `candidates` demand draws of a horizon, the replicate whose busiest
/// period carries the most total demand (first one on ties).
inline std::size_t most_loaded_replicate(gen::Horizon horizon, std::size_t candidates,
                                         std::uint64_t base_seed = gen::kDefaultBaseSeed) {
  std::size_t best = 0;
  double best_peak = -1.0;
  for (std::size_t r = 0; r < candidates; ++r) {
    gen::GeneratorConfig cfg;
    cfg.horizon = horizon;
    cfg.replicate = r;
    cfg.seed = gen::derive_seed(base_seed, {gen::index_of(horizon), r});
    const auto d = gen::generate_demand(cfg);
    double peak = 0.0;
    for (std::size_t t = 0; t < d.cols(); ++t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < d.rows(); ++i) sum += d(i, t);
      peak = std::max(peak, sum);
    }
    if (peak > best_peak) {
      best_peak = peak;
      best = r;
    }
  }
  return best;
}

}  // namespace lsms::harness
