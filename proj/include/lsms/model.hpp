#pragma once

// Lot sizing and machine speed (LSMS) problem data, solution representation,
// cost evaluation and the constraint checker.
//
// Indices are 0-based throughout the C++ API: product 0 is the non-chemical
// cylinder, 1 the non-chemical plaque, 2 the chemical cylinder and 3 the
// chemical plaque; machine 0 is PL1, 1 is PL2 and 2 is the cutting machine.

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lsms/array.hpp"
#include "lsms/errors.hpp"

namespace lsms {

namespace product {
inline constexpr std::size_t nonchem_cylinder = 0;
inline constexpr std::size_t nonchem_plaque = 1;
inline constexpr std::size_t chem_cylinder = 2;
inline constexpr std::size_t chem_plaque = 3;
}  // namespace product

namespace machine {
inline constexpr std::size_t pl1 = 0;
inline constexpr std::size_t pl2 = 1;
inline constexpr std::size_t cutter = 2;
}  // namespace machine

/// The flow-shop structure below (chemical flow, the two WIP links, the
/// no-WIP products) is written for this product/machine layout.
inline constexpr std::size_t kNumProducts = 4;
inline constexpr std::size_t kNumMachines = 3;

/// How the PL1 -> PL2 flow equality for chemical products is enforced.
enum class FlowMode {
  aggregate,   // sum over the horizon on PL1 equals sum on PL2
  per_period,  // equal in every period
};

struct ProcTimeBounds {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const ProcTimeBounds&, const ProcTimeBounds&) = default;
};

struct Instance {
  std::size_t num_products = 0;
  std::size_t num_machines = 0;
  std::size_t num_periods = 0;

  Array2<int> route;                            // [product][machine], 0/1
  std::vector<std::vector<std::size_t>> sequence;  // machines visited, in order

  std::vector<double> vao_cost;        // per machine, per unit processed
  std::vector<double> transport_cost;  // per product, per unit moved to stock
  std::vector<double> end_hold_cost;   // per product, per unit and period
  std::vector<double> wip_hold_cost;   // per product, per unit and period
  std::vector<double> energy_rate;     // per machine, per minute of unit time
  std::vector<ProcTimeBounds> proc_time_bounds;  // per machine, minutes/unit

  Matrix demand;                  // [product][period], units
  std::vector<double> capacity;   // per period, minutes
  double end_inv_cap = 0.0;       // aggregate over products
  double wip_inv_cap = 0.0;       // aggregate over products
  double unit_length = 0.0;       // meters per unit, reporting only

  /// Last machine of the product's route; finished goods leave from here.
  std::size_t last_machine(std::size_t i) const { return sequence.at(i).back(); }

  double total_demand(std::size_t i) const {
    double sum = 0.0;
    for (double d : demand.row(i)) sum += d;
    return sum;
  }

  double total_demand() const {
    double sum = 0.0;
    for (double d : demand.flat()) sum += d;
    return sum;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Solution {
  Tensor3 production;   // y[product][machine][period]
  Matrix proc_time;     // v[machine][period]
  Matrix end_inventory; // s[product][period]
  Matrix wip_inventory; // u[product][period]
  double objective = 0.0;

  static Solution zeros(const Instance& inst) {
    Solution sol;
    sol.production = Tensor3(inst.num_products, inst.num_machines, inst.num_periods);
    sol.proc_time = Matrix(inst.num_machines, inst.num_periods);
    sol.end_inventory = Matrix(inst.num_products, inst.num_periods);
    sol.wip_inventory = Matrix(inst.num_products, inst.num_periods);
    return sol;
  }

  friend bool operator==(const Solution&, const Solution&) = default;
};

enum class ConstraintId {
  capacity,
  demand_bound,
  chem_flow,
  end_balance,
  wip_balance_2,
  wip_balance_4,
  v_bounds,
  end_cap,
  wip_cap,
  no_wip_13,
  nonnegativity,
};

inline std::string_view to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::capacity: return "capacity";
    case ConstraintId::demand_bound: return "demand_bound";
    case ConstraintId::chem_flow: return "chem_flow";
    case ConstraintId::end_balance: return "end_balance";
    case ConstraintId::wip_balance_2: return "wip_balance_2";
    case ConstraintId::wip_balance_4: return "wip_balance_4";
    case ConstraintId::v_bounds: return "v_bounds";
    case ConstraintId::end_cap: return "end_cap";
    case ConstraintId::wip_cap: return "wip_cap";
    case ConstraintId::no_wip_13: return "no_wip_13";
    case ConstraintId::nonnegativity: return "nonnegativity";
  }
  return "unknown";
}

struct Violation {
  ConstraintId id;
  std::vector<std::size_t> index;  // e.g. {m, t} for capacity, {i, t} for balances
  double magnitude = 0.0;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const noexcept { return violations.empty(); }

  std::size_t count(ConstraintId id) const {
    std::size_t n = 0;
    for (const auto& v : violations) n += (v.id == id);
    return n;
  }
};

inline constexpr double kDefaultFeasibilityTol = 1e-6;

namespace detail {

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw input_error(what);
}

}  // namespace detail

/// Throws input_error when the instance breaks a structural invariant.
inline void validate(const Instance& inst) {
  using detail::require;
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  require(I == kNumProducts && M == kNumMachines,
          "instance must have 4 products and 3 machines");
  require(T >= 1, "instance needs at least one period");
  require(inst.route.same_shape(I, M), "route must be products x machines");
  require(inst.sequence.size() == I, "sequence needs one entry per product");
  require(inst.vao_cost.size() == M && inst.energy_rate.size() == M &&
              inst.proc_time_bounds.size() == M,
          "machine cost vectors must have one entry per machine");
  require(inst.transport_cost.size() == I && inst.end_hold_cost.size() == I &&
              inst.wip_hold_cost.size() == I,
          "product cost vectors must have one entry per product");
  require(inst.demand.same_shape(I, T), "demand must be products x periods");
  require(inst.capacity.size() == T, "capacity needs one entry per period");

  for (std::size_t i = 0; i < I; ++i) {
    const auto& seq = inst.sequence[i];
    require(!seq.empty() && seq.front() == machine::pl1,
            "every product sequence starts on machine 1");
    std::vector<int> seen(M, 0);
    for (auto m : seq) {
      require(m < M, "sequence refers to an unknown machine");
      require(seen[m] == 0, "sequence visits a machine twice");
      seen[m] = 1;
    }
    for (std::size_t m = 0; m < M; ++m) {
      const int a = inst.route(i, m);
      require(a == 0 || a == 1, "route entries must be 0 or 1");
      require(a == seen[m], "sequence must list exactly the routed machines");
    }
  }
  for (const auto& b : inst.proc_time_bounds)
    require(std::isfinite(b.min) && std::isfinite(b.max) && 0.0 < b.min && b.min <= b.max,
            "processing time bounds need 0 < min <= max");
  for (double d : inst.demand.flat())
    require(std::isfinite(d) && d >= 0.0, "demand must be nonnegative");
  for (double c : inst.capacity)
    require(std::isfinite(c) && c > 0.0, "capacity must be positive");
  require(inst.end_inv_cap >= 0.0 && inst.wip_inv_cap >= 0.0,
          "inventory caps must be nonnegative");
  require(detail::all_finite(inst.vao_cost) && detail::all_finite(inst.transport_cost) &&
              detail::all_finite(inst.end_hold_cost) && detail::all_finite(inst.wip_hold_cost) &&
              detail::all_finite(inst.energy_rate),
          "cost coefficients must be finite");
}

/// Throws input_error unless every solution block is shaped for the instance.
inline void require_dimensions(const Instance& inst, const Solution& sol) {
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  if (!sol.production.same_shape(I, M, T) || !sol.proc_time.same_shape(M, T) ||
      !sol.end_inventory.same_shape(I, T) || !sol.wip_inventory.same_shape(I, T))
    throw input_error("solution arrays are not dimensioned to the instance");
}

/// Total cost: value-added production cost plus holding and transport cost of
/// both inventories, minus the speed term sum r[m] * v[m][t].
inline double evaluate_objective(const Instance& inst, const Solution& sol) {
  require_dimensions(inst, sol);
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  double production = 0.0, inventory = 0.0, speed = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < I; ++i) {
      for (std::size_t m = 0; m < M; ++m) production += inst.vao_cost[m] * sol.production(i, m, t);
      inventory += sol.end_inventory(i, t) * (inst.end_hold_cost[i] + inst.transport_cost[i]);
      inventory += sol.wip_inventory(i, t) * (inst.wip_hold_cost[i] + inst.transport_cost[i]);
    }
    for (std::size_t m = 0; m < M; ++m) speed += inst.energy_rate[m] * sol.proc_time(m, t);
  }
  return production + inventory - speed;
}

/// Checks every model constraint at every index. Violations are returned, not
/// thrown; an empty report means the solution is feasible within `tol`.
inline FeasibilityReport check_feasibility(const Instance& inst, const Solution& sol,
                                           double tol = kDefaultFeasibilityTol,
                                           FlowMode flow = FlowMode::aggregate) {
  require_dimensions(inst, sol);
  if (!(tol > 0.0)) throw input_error("feasibility tolerance must be positive");

  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  FeasibilityReport report;
  auto at_most = [&](ConstraintId id, std::vector<std::size_t> idx, double lhs, double rhs) {
    if (!(lhs - rhs <= tol)) report.violations.push_back({id, std::move(idx), lhs - rhs});
  };
  auto equal = [&](ConstraintId id, std::vector<std::size_t> idx, double lhs, double rhs) {
    if (!(std::abs(lhs - rhs) <= tol))
      report.violations.push_back({id, std::move(idx), std::abs(lhs - rhs)});
  };

  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t t = 0; t < T; ++t)
        at_most(ConstraintId::nonnegativity, {i, m, t}, 0.0, sol.production(i, m, t));
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t t = 0; t < T; ++t) {
      at_most(ConstraintId::nonnegativity, {i, t}, 0.0, sol.end_inventory(i, t));
      at_most(ConstraintId::nonnegativity, {i, t}, 0.0, sol.wip_inventory(i, t));
    }

  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) {
      double load = 0.0;
      for (std::size_t i = 0; i < I; ++i) load += sol.production(i, m, t) * sol.proc_time(m, t);
      at_most(ConstraintId::capacity, {m, t}, load, inst.capacity[t]);
    }

  for (std::size_t i = 0; i < I; ++i) {
    const double total = inst.total_demand(i);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t t = 0; t < T; ++t)
        at_most(ConstraintId::demand_bound, {i, m, t}, sol.production(i, m, t),
                total * inst.route(i, m));
  }

  for (std::size_t i : {product::chem_cylinder, product::chem_plaque}) {
    if (flow == FlowMode::aggregate) {
      double on_pl1 = 0.0, on_pl2 = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        on_pl1 += sol.production(i, machine::pl1, t);
        on_pl2 += sol.production(i, machine::pl2, t);
      }
      equal(ConstraintId::chem_flow, {i}, on_pl1, on_pl2);
    } else {
      for (std::size_t t = 0; t < T; ++t)
        equal(ConstraintId::chem_flow, {i, t}, sol.production(i, machine::pl1, t),
              sol.production(i, machine::pl2, t));
    }
  }

  for (std::size_t i = 0; i < I; ++i) {
    const auto last = inst.last_machine(i);
    for (std::size_t t = 0; t < T; ++t) {
      const double prev = t == 0 ? 0.0 : sol.end_inventory(i, t - 1);
      equal(ConstraintId::end_balance, {i, t}, prev + sol.production(i, last, t),
            inst.demand(i, t) + sol.end_inventory(i, t));
    }
  }

  auto wip_balance = [&](ConstraintId id, std::size_t i, std::size_t from, std::size_t to) {
    for (std::size_t t = 0; t < T; ++t) {
      const double prev = t == 0 ? 0.0 : sol.wip_inventory(i, t - 1);
      equal(id, {i, t}, prev + sol.production(i, from, t),
            sol.production(i, to, t) + sol.wip_inventory(i, t));
    }
  };
  wip_balance(ConstraintId::wip_balance_2, product::nonchem_plaque, machine::pl1, machine::cutter);
  wip_balance(ConstraintId::wip_balance_4, product::chem_plaque, machine::pl2, machine::cutter);

  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) {
      const double v = sol.proc_time(m, t);
      at_most(ConstraintId::v_bounds, {m, t}, inst.proc_time_bounds[m].min, v);
      at_most(ConstraintId::v_bounds, {m, t}, v, inst.proc_time_bounds[m].max);
    }

  for (std::size_t t = 0; t < T; ++t) {
    double s = 0.0, u = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
      s += sol.end_inventory(i, t);
      u += sol.wip_inventory(i, t);
    }
    at_most(ConstraintId::end_cap, {t}, s, inst.end_inv_cap);
    at_most(ConstraintId::wip_cap, {t}, u, inst.wip_inv_cap);
  }

  for (std::size_t i : {product::nonchem_cylinder, product::chem_cylinder})
    for (std::size_t t = 0; t < T; ++t)
      equal(ConstraintId::no_wip_13, {i, t}, sol.wip_inventory(i, t), 0.0);

  return report;
}

}  // namespace lsms
