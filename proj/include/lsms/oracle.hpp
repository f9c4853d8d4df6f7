#pragma once

// Brute-force reference for toy instances. For fixed processing times the
// model is a linear program, so enumerating processing times on a grid and
// solving the production LP at every grid point gives the best plan
// reachable on that grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "lsms/errors.hpp"
#include "lsms/lp.hpp"
#include "lsms/model.hpp"
#include "lsms/subproblems.hpp"

namespace lsms {

inline constexpr double kOracleBudget = 1e6;

struct OracleOptions {
  FlowMode flow = FlowMode::aggregate;
  // Per-machine grid sizes overriding the common count; entries of 0 fall
  // back to the common count.
  std::vector<std::size_t> points_per_machine;
  std::size_t workers = 1;
  lp::SolverOptions solver;
};

struct OracleResult {
  std::optional<Solution> solution;  // empty if SP1 is infeasible at every point
  double objective = std::numeric_limits<double>::infinity();
  std::size_t grid_points = 0;
  std::size_t feasible_points = 0;
  std::size_t best_index = 0;  // position in lexicographic grid order
};

namespace detail {

struct FreeCell {
  std::size_t machine;
  std::size_t period;
  std::size_t points;
};

inline double grid_value(const ProcTimeBounds& b, std::size_t k, std::size_t points) {
  if (k + 1 == points) return b.max;
  return b.min + (b.max - b.min) * static_cast<double>(k) / static_cast<double>(points - 1);
}

}  // namespace detail

/// Enumerates every processing-time cell with min < max on a uniform grid
/// that includes both endpoints and returns the best production-LP plan.
/// Ties keep the lexicographically smallest grid index. Throws input_error
/// before doing any work if the grid would exceed 10^6 points.
inline OracleResult grid_search_solve(const Instance& inst, std::size_t points_per_machine_period,
                                      const OracleOptions& options = {}) {
  validate(inst);
  const auto M = inst.num_machines, T = inst.num_periods;
  if (!options.points_per_machine.empty() && options.points_per_machine.size() != M)
    throw input_error("points_per_machine needs one entry per machine");

  std::vector<detail::FreeCell> cells;
  Matrix base(M, T);
  double combos = 1.0;
  for (std::size_t m = 0; m < M; ++m) {
    const auto& b = inst.proc_time_bounds[m];
    std::size_t points = points_per_machine_period;
    if (!options.points_per_machine.empty() && options.points_per_machine[m] != 0)
      points = options.points_per_machine[m];
    for (std::size_t t = 0; t < T; ++t) {
      base(m, t) = b.min;
      if (b.min < b.max) {
        if (points < 2) throw input_error("a free cell needs at least 2 grid points");
        cells.push_back({m, t, points});
        combos *= static_cast<double>(points);
      }
    }
  }
  if (combos > kOracleBudget) throw input_error("oracle grid exceeds the 10^6 point budget");
  const auto total = static_cast<std::size_t>(combos);

  auto proc_times_at = [&](std::size_t index) {
    Matrix v = base;
    // Last free cell varies fastest.
    for (std::size_t c = cells.size(); c-- > 0;) {
      const auto& cell = cells[c];
      const auto k = index % cell.points;
      index /= cell.points;
      v(cell.machine, cell.period) =
          detail::grid_value(inst.proc_time_bounds[cell.machine], k, cell.points);
    }
    return v;
  };

  struct Partial {
    std::optional<Solution> best;
    std::size_t best_index = 0;
    std::size_t feasible = 0;
  };
  const SubproblemOptions sub_opt{options.flow};
  auto scan = [&](std::size_t begin, std::size_t end, Partial& part) {
    for (std::size_t index = begin; index < end; ++index) {
      const Matrix v = proc_times_at(index);
      const auto sp = build_sp1(inst, v, sub_opt);
      const auto out = lp::solve(sp.program, options.solver);
      if (out.status != lp::Status::optimal) continue;
      ++part.feasible;
      auto sol = extract_solution(inst, out, sp.map, v);
      if (!part.best || sol.objective < part.best->objective) {
        part.best = std::move(sol);
        part.best_index = index;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(total, 1));
  std::vector<Partial> parts(workers);
  if (workers == 1) {
    scan(0, total, parts[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const auto begin = std::min(total, w * chunk);
      const auto end = std::min(total, begin + chunk);
      pool.emplace_back([&, begin, end, w] { scan(begin, end, parts[w]); });
    }
    for (auto& th : pool) th.join();
  }

  // Chunks are in index order, so a strict comparison keeps the earliest tie.
  OracleResult result;
  result.grid_points = total;
  for (auto& part : parts) {
    result.feasible_points += part.feasible;
    if (part.best && (!result.solution || part.best->objective < result.objective)) {
      result.objective = part.best->objective;
      result.best_index = part.best_index;
      result.solution = std::move(part.best);
    }
  }
  return result;
}

}  // namespace lsms
