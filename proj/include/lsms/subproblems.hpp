#pragma once

// The two linear subproblems obtained by freezing one factor of the bilinear
// capacity constraint: the production LP (processing times fixed) and the
// speed LP (production fixed). Both carry the frozen block's cost as a
// constant objective offset so their optimal values are directly comparable
// with each other and with evaluate_objective.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "lsms/errors.hpp"
#include "lsms/lp.hpp"
#include "lsms/model.hpp"

namespace lsms {

enum class Subproblem { production, speed };

/// Column layout of a subproblem LP. Blocks are contiguous; an absent block
/// has offset npos.
struct VarIndexMap {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Subproblem kind = Subproblem::production;
  std::size_t num_products = 0, num_machines = 0, num_periods = 0;
  std::size_t y_offset = npos;
  std::size_t v_offset = npos;
  std::size_t s_offset = npos;
  std::size_t u_offset = npos;
  std::size_t num_columns = 0;

  std::size_t y(std::size_t i, std::size_t m, std::size_t t) const {
    return y_offset + (i * num_machines + m) * num_periods + t;
  }
  std::size_t v(std::size_t m, std::size_t t) const { return v_offset + m * num_periods + t; }
  std::size_t s(std::size_t i, std::size_t t) const { return s_offset + i * num_periods + t; }
  std::size_t u(std::size_t i, std::size_t t) const { return u_offset + i * num_periods + t; }
};

struct SubproblemLp {
  lp::LinearProgram program;
  VarIndexMap map;
};

struct SubproblemOptions {
  FlowMode flow = FlowMode::aggregate;
};

namespace detail {

inline constexpr double kFixedBlockTol = 1e-6;

// End-item balance, WIP balances, both inventory caps and the no-WIP rule are
// shared by both subproblems. `production_term(i, m, t)` adds the y term of a
// balance row: as a coefficient in the production LP, or moved to the
// right-hand side in the speed LP.
template <class ProductionTerm>
void add_inventory_rows(const Instance& inst, const VarIndexMap& map, lp::LinearProgram& prob,
                        ProductionTerm&& production_term) {
  const auto I = inst.num_products, T = inst.num_periods;
  for (std::size_t i = 0; i < I; ++i) {
    const auto last = inst.last_machine(i);
    for (std::size_t t = 0; t < T; ++t) {
      // s[i][t-1] + y[i][m*][t] - s[i][t] = d[i][t]
      auto& row = prob.add_constraint(lp::Relation::equal, inst.demand(i, t),
                                      "end_balance[" + std::to_string(i) + "," +
                                          std::to_string(t) + "]");
      if (t > 0) row.coeffs[map.s(i, t - 1)] = 1.0;
      row.coeffs[map.s(i, t)] = -1.0;
      production_term(row, i, last, t, 1.0);
    }
  }
  auto wip_rows = [&](std::size_t i, std::size_t from, std::size_t to, const char* tag) {
    for (std::size_t t = 0; t < T; ++t) {
      // u[i][t-1] + y[i][from][t] - y[i][to][t] - u[i][t] = 0
      auto& row = prob.add_constraint(lp::Relation::equal, 0.0,
                                      std::string(tag) + "[" + std::to_string(t) + "]");
      if (t > 0) row.coeffs[map.u(i, t - 1)] = 1.0;
      row.coeffs[map.u(i, t)] = -1.0;
      production_term(row, i, from, t, 1.0);
      production_term(row, i, to, t, -1.0);
    }
  };
  wip_rows(product::nonchem_plaque, machine::pl1, machine::cutter, "wip_balance_2");
  wip_rows(product::chem_plaque, machine::pl2, machine::cutter, "wip_balance_4");

  for (std::size_t t = 0; t < T; ++t) {
    auto& end_cap = prob.add_constraint(lp::Relation::less_equal, inst.end_inv_cap,
                                        "end_cap[" + std::to_string(t) + "]");
    for (std::size_t i = 0; i < I; ++i) end_cap.coeffs[map.s(i, t)] = 1.0;
    auto& wip_cap = prob.add_constraint(lp::Relation::less_equal, inst.wip_inv_cap,
                                        "wip_cap[" + std::to_string(t) + "]");
    for (std::size_t i = 0; i < I; ++i) wip_cap.coeffs[map.u(i, t)] = 1.0;
  }
}

inline void add_inventory_columns(const Instance& inst, const VarIndexMap& map,
                                  lp::LinearProgram& prob) {
  for (std::size_t i = 0; i < inst.num_products; ++i)
    for (std::size_t t = 0; t < inst.num_periods; ++t) {
      prob.objective[map.s(i, t)] = inst.end_hold_cost[i] + inst.transport_cost[i];
      prob.objective[map.u(i, t)] = inst.wip_hold_cost[i] + inst.transport_cost[i];
      prob.var_names[map.s(i, t)] = "s_" + std::to_string(i) + "_" + std::to_string(t);
      prob.var_names[map.u(i, t)] = "u_" + std::to_string(i) + "_" + std::to_string(t);
    }
  for (std::size_t i : {product::nonchem_cylinder, product::chem_cylinder})
    for (std::size_t t = 0; t < inst.num_periods; ++t) prob.bounds[map.u(i, t)] = {0.0, 0.0};
}

}  // namespace detail

/// Production subproblem: variables y, s, u with processing times fixed at
/// `v_hat`; the speed term -sum r[m] v_hat[m][t] is the objective offset.
inline SubproblemLp build_sp1(const Instance& inst, const Matrix& v_hat,
                              const SubproblemOptions& options = {}) {
  validate(inst);
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  if (!v_hat.same_shape(M, T)) throw input_error("v_hat must be machines x periods");
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) {
      const double v = v_hat(m, t);
      const auto& b = inst.proc_time_bounds[m];
      if (!(v >= b.min - detail::kFixedBlockTol && v <= b.max + detail::kFixedBlockTol))
        throw input_error("v_hat outside the processing time bounds");
    }

  VarIndexMap map;
  map.kind = Subproblem::production;
  map.num_products = I;
  map.num_machines = M;
  map.num_periods = T;
  map.y_offset = 0;
  map.s_offset = I * M * T;
  map.u_offset = map.s_offset + I * T;
  map.num_columns = map.u_offset + I * T;

  lp::LinearProgram prob(map.num_columns);
  prob.var_names.resize(map.num_columns);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) prob.objective_offset -= inst.energy_rate[m] * v_hat(m, t);

  for (std::size_t i = 0; i < I; ++i) {
    const double total = inst.total_demand(i);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t t = 0; t < T; ++t) {
        const auto col = map.y(i, m, t);
        prob.objective[col] = inst.vao_cost[m];
        prob.bounds[col] = {0.0, total * inst.route(i, m)};
        prob.var_names[col] =
            "y_" + std::to_string(i) + "_" + std::to_string(m) + "_" + std::to_string(t);
      }
  }
  detail::add_inventory_columns(inst, map, prob);

  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) {
      auto& row = prob.add_constraint(lp::Relation::less_equal, inst.capacity[t],
                                      "capacity[" + std::to_string(m) + "," + std::to_string(t) + "]");
      for (std::size_t i = 0; i < I; ++i) row.coeffs[map.y(i, m, t)] = v_hat(m, t);
    }

  for (std::size_t i : {product::chem_cylinder, product::chem_plaque}) {
    if (options.flow == FlowMode::aggregate) {
      auto& row = prob.add_constraint(lp::Relation::equal, 0.0, "chem_flow[" + std::to_string(i) + "]");
      for (std::size_t t = 0; t < T; ++t) {
        row.coeffs[map.y(i, machine::pl1, t)] = 1.0;
        row.coeffs[map.y(i, machine::pl2, t)] = -1.0;
      }
    } else {
      for (std::size_t t = 0; t < T; ++t) {
        auto& row = prob.add_constraint(
            lp::Relation::equal, 0.0, "chem_flow[" + std::to_string(i) + "," + std::to_string(t) + "]");
        row.coeffs[map.y(i, machine::pl1, t)] = 1.0;
        row.coeffs[map.y(i, machine::pl2, t)] = -1.0;
      }
    }
  }

  detail::add_inventory_rows(inst, map, prob,
                             [&](lp::Constraint& row, std::size_t i, std::size_t m, std::size_t t,
                                 double sign) { row.coeffs[map.y(i, m, t)] += sign; });
  return {std::move(prob), map};
}

/// Speed subproblem: variables v, s, u with production fixed at `y_hat`; the
/// production cost sum c[m] y_hat is the objective offset.
inline SubproblemLp build_sp2(const Instance& inst, const Tensor3& y_hat,
                              const SubproblemOptions& = {}) {
  validate(inst);
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  if (!y_hat.same_shape(I, M, T)) throw input_error("y_hat must be products x machines x periods");
  for (std::size_t i = 0; i < I; ++i) {
    const double total = inst.total_demand(i);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t t = 0; t < T; ++t) {
        const double y = y_hat(i, m, t);
        if (!(y >= -detail::kFixedBlockTol))
          throw input_error("y_hat must be nonnegative");
        if (!(y <= total * inst.route(i, m) + detail::kFixedBlockTol))
          throw input_error("y_hat exceeds the routed total demand bound");
      }
  }

  VarIndexMap map;
  map.kind = Subproblem::speed;
  map.num_products = I;
  map.num_machines = M;
  map.num_periods = T;
  map.v_offset = 0;
  map.s_offset = M * T;
  map.u_offset = map.s_offset + I * T;
  map.num_columns = map.u_offset + I * T;

  lp::LinearProgram prob(map.num_columns);
  prob.var_names.resize(map.num_columns);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t t = 0; t < T; ++t) prob.objective_offset += inst.vao_cost[m] * y_hat(i, m, t);

  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) {
      const auto col = map.v(m, t);
      prob.objective[col] = -inst.energy_rate[m];
      prob.bounds[col] = {inst.proc_time_bounds[m].min, inst.proc_time_bounds[m].max};
      prob.var_names[col] = "v_" + std::to_string(m) + "_" + std::to_string(t);
    }
  detail::add_inventory_columns(inst, map, prob);

  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t t = 0; t < T; ++t) {
      double load = 0.0;
      for (std::size_t i = 0; i < I; ++i) load += y_hat(i, m, t);
      auto& row = prob.add_constraint(lp::Relation::less_equal, inst.capacity[t],
                                      "capacity[" + std::to_string(m) + "," + std::to_string(t) + "]");
      row.coeffs[map.v(m, t)] = load;
    }

  detail::add_inventory_rows(inst, map, prob,
                             [&](lp::Constraint& row, std::size_t i, std::size_t m, std::size_t t,
                                 double sign) { row.rhs -= sign * y_hat(i, m, t); });
  return {std::move(prob), map};
}

inline constexpr double kObjectiveAgreementTol = 1e-7;

namespace detail {

inline void check_objective_agreement(double lp_objective, double recomputed) {
  const double scale = std::max(1.0, std::abs(lp_objective));
  if (std::abs(lp_objective - recomputed) > kObjectiveAgreementTol * scale)
    throw contract_error("subproblem objective disagrees with evaluate_objective");
}

inline void fill_inventories(const VarIndexMap& map, const std::vector<double>& x, Solution& sol) {
  for (std::size_t i = 0; i < map.num_products; ++i)
    for (std::size_t t = 0; t < map.num_periods; ++t) {
      sol.end_inventory(i, t) = x[map.s(i, t)];
      sol.wip_inventory(i, t) = x[map.u(i, t)];
    }
}

inline void require_optimal(const lp::Outcome& outcome, const VarIndexMap& map,
                            Subproblem expected) {
  if (outcome.status != lp::Status::optimal)
    throw contract_error("extract_solution needs an optimal outcome");
  if (map.kind != expected) throw contract_error("fixed block does not match the subproblem");
  if (outcome.x.size() != map.num_columns)
    throw contract_error("outcome vector does not match the column map");
}

}  // namespace detail

/// Solution from a production-subproblem outcome plus the fixed times.
inline Solution extract_solution(const Instance& inst, const lp::Outcome& outcome,
                                 const VarIndexMap& map, const Matrix& v_hat) {
  detail::require_optimal(outcome, map, Subproblem::production);
  auto sol = Solution::zeros(inst);
  for (std::size_t i = 0; i < map.num_products; ++i)
    for (std::size_t m = 0; m < map.num_machines; ++m)
      for (std::size_t t = 0; t < map.num_periods; ++t)
        sol.production(i, m, t) = outcome.x[map.y(i, m, t)];
  sol.proc_time = v_hat;
  detail::fill_inventories(map, outcome.x, sol);
  sol.objective = evaluate_objective(inst, sol);
  detail::check_objective_agreement(outcome.objective, sol.objective);
  return sol;
}

/// Solution from a speed-subproblem outcome plus the fixed production. A
/// machine with zero energy rate has no preferred time; it is set to the
/// largest value its capacity row and upper bound allow.
inline Solution extract_solution(const Instance& inst, const lp::Outcome& outcome,
                                 const VarIndexMap& map, const Tensor3& y_hat) {
  detail::require_optimal(outcome, map, Subproblem::speed);
  auto sol = Solution::zeros(inst);
  sol.production = y_hat;
  for (std::size_t m = 0; m < map.num_machines; ++m)
    for (std::size_t t = 0; t < map.num_periods; ++t) {
      double v = outcome.x[map.v(m, t)];
      if (inst.energy_rate[m] == 0.0) {
        double load = 0.0;
        for (std::size_t i = 0; i < map.num_products; ++i) load += y_hat(i, m, t);
        const auto& b = inst.proc_time_bounds[m];
        const double top = load > 0.0 ? std::min(b.max, inst.capacity[t] / load) : b.max;
        v = std::max(v, std::clamp(top, b.min, b.max));
      }
      sol.proc_time(m, t) = v;
    }
  detail::fill_inventories(map, outcome.x, sol);
  sol.objective = evaluate_objective(inst, sol);
  detail::check_objective_agreement(outcome.objective, sol.objective);
  return sol;
}

}  // namespace lsms
