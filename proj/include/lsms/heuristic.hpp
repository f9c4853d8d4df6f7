#pragma once

// Two-phase alternating heuristic: solve the production LP with processing
// times frozen, then the speed LP with production frozen, and repeat until a
// full cycle leaves every variable and both objectives unchanged.

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lsms/errors.hpp"
#include "lsms/lp.hpp"
#include "lsms/model.hpp"
#include "lsms/subproblems.hpp"

namespace lsms {

struct HeuristicConfig {
  double eps = 1e-6;          // relative change tolerance for convergence
  std::size_t max_iter = 100; // cycle cap
  std::optional<Matrix> v_init;  // defaults to v_min on every machine and period
  FlowMode flow = FlowMode::aggregate;
  // When the previous cycle's plan is still optimal for the new production
  // LP, keep it instead of whatever alternative optimum the simplex lands on.
  bool keep_incumbent_on_tie = false;
  lp::SolverOptions solver;
};

enum class Termination { converged, iteration_limit, subproblem_infeasible };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::iteration_limit: return "iteration_limit";
    case Termination::subproblem_infeasible: return "subproblem_infeasible";
  }
  return "unknown";
}

struct CycleRecord {
  double sp1_objective = 0.0;
  double sp2_objective = 0.0;
  double max_rel_change = 0.0;  // against the previous cycle; +inf on cycle 1
  double wall_ms = 0.0;
  bool kept_incumbent = false;
};

struct HeuristicTrace {
  std::vector<CycleRecord> cycles;
  Termination termination = Termination::converged;
  double total_ms = 0.0;
  bool returned_best_seen = false;  // set when stopping at the iteration limit
  std::string diagnostics;

  std::size_t cycle_count() const noexcept { return cycles.size(); }
};

struct HeuristicResult {
  std::optional<Solution> solution;  // empty when the first production LP is infeasible
  HeuristicTrace trace;
};

inline Matrix min_proc_times(const Instance& inst) {
  Matrix v(inst.num_machines, inst.num_periods);
  for (std::size_t m = 0; m < inst.num_machines; ++m)
    for (std::size_t t = 0; t < inst.num_periods; ++t) v(m, t) = inst.proc_time_bounds[m].min;
  return v;
}

/// Largest relative difference |a - b| / max(1, |a|, |b|) over all four
/// variable blocks.
inline double max_relative_change(const Solution& a, const Solution& b) {
  double worst = 0.0;
  auto scan = [&](std::span<const double> x, std::span<const double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double scale = std::max({1.0, std::abs(x[k]), std::abs(y[k])});
      worst = std::max(worst, std::abs(x[k] - y[k]) / scale);
    }
  };
  scan(a.production.flat(), b.production.flat());
  scan(a.proc_time.flat(), b.proc_time.flat());
  scan(a.end_inventory.flat(), b.end_inventory.flat());
  scan(a.wip_inventory.flat(), b.wip_inventory.flat());
  return worst;
}

namespace detail {

inline void validate(const Instance& inst, const HeuristicConfig& cfg) {
  lsms::validate(inst);
  if (!(cfg.eps > 0.0)) throw input_error("eps must be positive");
  if (cfg.max_iter < 1) throw input_error("max_iter must be at least 1");
  if (cfg.v_init) {
    if (!cfg.v_init->same_shape(inst.num_machines, inst.num_periods))
      throw input_error("v_init must be machines x periods");
    for (std::size_t m = 0; m < inst.num_machines; ++m)
      for (std::size_t t = 0; t < inst.num_periods; ++t) {
        const double v = (*cfg.v_init)(m, t);
        if (v < inst.proc_time_bounds[m].min || v > inst.proc_time_bounds[m].max)
          throw input_error("v_init outside the processing time bounds");
      }
  }
}

// The incumbent plan (with its inventories and the new times) when it is
// feasible for the new production LP and no worse than that LP's optimum.
inline std::optional<Solution> incumbent_if_tied(const Instance& inst, const Solution& incumbent,
                                                 const Matrix& v_hat, const Solution& fresh,
                                                 const HeuristicConfig& cfg) {
  Solution candidate = incumbent;
  candidate.proc_time = v_hat;
  candidate.objective = evaluate_objective(inst, candidate);
  if (candidate.objective > fresh.objective + cfg.eps * (1.0 + std::abs(fresh.objective)))
    return std::nullopt;
  if (!check_feasibility(inst, candidate, kDefaultFeasibilityTol, cfg.flow).feasible())
    return std::nullopt;
  return candidate;
}

}  // namespace detail

inline HeuristicResult two_phase(const Instance& inst, const HeuristicConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point start) {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  detail::validate(inst, cfg);
  const SubproblemOptions sub_opt{cfg.flow};
  const auto run_start = clock::now();

  HeuristicResult result;
  auto& trace = result.trace;
  Matrix v_hat = cfg.v_init ? *cfg.v_init : min_proc_times(inst);
  std::optional<Solution> previous;
  std::optional<Solution> best;

  for (std::size_t cycle = 1; cycle <= cfg.max_iter; ++cycle) {
    const auto cycle_start = clock::now();
    CycleRecord rec;

    const auto sp1 = build_sp1(inst, v_hat, sub_opt);
    const auto out1 = lp::solve(sp1.program, cfg.solver);
    if (out1.status != lp::Status::optimal) {
      trace.termination = Termination::subproblem_infeasible;
      trace.diagnostics = cycle == 1
                              ? "production subproblem " + std::string(lp::to_string(out1.status)) +
                                    " at the initial processing times: demand cannot be met "
                                    "within capacity and inventory limits"
                              : "production subproblem " + std::string(lp::to_string(out1.status)) +
                                    " in cycle " + std::to_string(cycle);
      result.solution = best;
      trace.total_ms = ms_since(run_start);
      return result;
    }
    Solution plan = extract_solution(inst, out1, sp1.map, v_hat);
    if (cfg.keep_incumbent_on_tie && previous) {
      if (auto kept = detail::incumbent_if_tied(inst, *previous, v_hat, plan, cfg)) {
        plan = std::move(*kept);
        rec.kept_incumbent = true;
      }
    }
    rec.sp1_objective = plan.objective;

    const auto sp2 = build_sp2(inst, plan.production, sub_opt);
    const auto out2 = lp::solve(sp2.program, cfg.solver);
    if (out2.status != lp::Status::optimal) {
      trace.termination = Termination::subproblem_infeasible;
      trace.diagnostics = "speed subproblem " + std::string(lp::to_string(out2.status)) +
                          " in cycle " + std::to_string(cycle);
      result.solution = best;
      trace.total_ms = ms_since(run_start);
      return result;
    }
    Solution current = extract_solution(inst, out2, sp2.map, plan.production);
    rec.sp2_objective = current.objective;
    v_hat = current.proc_time;

    rec.max_rel_change = previous ? max_relative_change(current, *previous)
                                  : std::numeric_limits<double>::infinity();
    rec.wall_ms = ms_since(cycle_start);
    trace.cycles.push_back(rec);

    if (!best || current.objective < best->objective) best = current;

    const bool objectives_agree = std::abs(rec.sp1_objective - rec.sp2_objective) <=
                                  cfg.eps * (1.0 + std::abs(rec.sp2_objective));
    if (previous && rec.max_rel_change <= cfg.eps && objectives_agree) {
      trace.termination = Termination::converged;
      result.solution = std::move(current);
      trace.total_ms = ms_since(run_start);
      return result;
    }
    previous = std::move(current);
  }

  trace.termination = Termination::iteration_limit;
  trace.returned_best_seen = true;
  result.solution = best;
  trace.total_ms = ms_since(run_start);
  return result;
}

/// One CSV row per cycle.
inline void write_trace_csv(std::ostream& os, const HeuristicTrace& trace) {
  os << "cycle,sp1_objective,sp2_objective,max_rel_change,wall_ms,kept_incumbent\n";
  const auto old = os.precision(17);
  for (std::size_t k = 0; k < trace.cycles.size(); ++k) {
    const auto& c = trace.cycles[k];
    os << (k + 1) << ',' << c.sp1_objective << ',' << c.sp2_objective << ',' << c.max_rel_change
       << ',' << c.wall_ms << ',' << (c.kept_incumbent ? 1 : 0) << '\n';
  }
  os << "# termination=" << to_string(trace.termination) << " cycles=" << trace.cycle_count()
     << '\n';
  os.precision(old);
}

}  // namespace lsms
