#include <gtest/gtest.h>

#include "lsms/generator.hpp"
#include "lsms/heuristic.hpp"
#include "lsms/lp.hpp"
#include "lsms/subproblems.hpp"
#include "support/instances.hpp"

using namespace lsms;
using lsms::testing::plant_instance;
using lsms::testing::single_unit_instance;
using lsms::testing::zero_demand_instance;

namespace {

Instance generated(std::uint64_t seed, gen::Horizon h = gen::Horizon::t10,
                   gen::Level cap = gen::Level::high, gen::Level inv = gen::Level::high) {
  gen::GeneratorConfig cfg;
  cfg.horizon = h;
  cfg.capacity = cap;
  cfg.inventory = inv;
  cfg.seed = seed;
  return gen::build_instance(cfg);
}

}  // namespace

TEST(BuildSp1, ColumnAndCapacityRowCounts) {
  const auto inst = generated(1);
  const auto sp = build_sp1(inst, min_proc_times(inst));
  EXPECT_EQ(sp.program.num_vars, 4u * 3 * 10 + 2 * 4 * 10);
  EXPECT_EQ(sp.program.num_vars, 200u);
  EXPECT_EQ(sp.program.count_rows_named("capacity["), 30u);
  EXPECT_EQ(sp.map.y_offset, 0u);
  EXPECT_EQ(sp.map.s_offset, 120u);
  EXPECT_EQ(sp.map.u_offset, 160u);
}

TEST(BuildSp1, ColumnMapIsABijection) {
  const auto inst = generated(2);
  const auto sp = build_sp1(inst, min_proc_times(inst));
  std::vector<int> hits(sp.program.num_vars, 0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t t = 0; t < 10; ++t) {
      for (std::size_t m = 0; m < 3; ++m) ++hits.at(sp.map.y(i, m, t));
      ++hits.at(sp.map.s(i, t));
      ++hits.at(sp.map.u(i, t));
    }
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(BuildSp1, ZeroDemandGivesTheSpeedOffset) {
  const auto inst = zero_demand_instance(4);
  const auto v = min_proc_times(inst);
  const auto sp = build_sp1(inst, v);
  const auto out = lp::solve(sp.program);
  ASSERT_EQ(out.status, lp::Status::optimal);
  double offset = 0.0;
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t t = 0; t < 4; ++t) offset -= inst.energy_rate[m] * v(m, t);
  EXPECT_NEAR(out.objective, offset, 1e-9);
  for (double x : out.x) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(BuildSp1, SingleUnitHandSolved) {
  const auto inst = single_unit_instance();
  const auto v = min_proc_times(inst);
  const auto sp = build_sp1(inst, v);
  const auto out = lp::solve(sp.program);
  ASSERT_EQ(out.status, lp::Status::optimal);
  EXPECT_NEAR(out.x[sp.map.y(product::nonchem_cylinder, machine::pl1, 0)], 1.0, 1e-9);
  EXPECT_NEAR(out.objective, 2273.402, 1e-9);
  const auto sol = extract_solution(inst, out, sp.map, v);
  EXPECT_EQ(sol.proc_time, v);
  EXPECT_NEAR(sol.objective, 2273.402, 1e-9);
}

TEST(BuildSp1, RejectsOutOfBoundTimes) {
  const auto inst = zero_demand_instance(2);
  auto v = min_proc_times(inst);
  v(machine::pl1, 1) = 49.0;
  EXPECT_THROW(build_sp1(inst, v), input_error);
  EXPECT_THROW(build_sp1(inst, Matrix(3, 3, 50.0)), input_error);
}

TEST(BuildSp1, InfeasibleDemandIsReportedNotThrown) {
  Matrix d(kNumProducts, 1, 0.0);
  d(product::nonchem_cylinder, 0) = 100.0;  // 100 * 50 min far exceeds 630
  const auto inst = plant_instance(d);
  const auto sp = build_sp1(inst, min_proc_times(inst));
  EXPECT_EQ(lp::solve(sp.program).status, lp::Status::infeasible);
}

TEST(BuildSp2, ColumnCount) {
  const auto inst = generated(3);
  const auto sp = build_sp2(inst, Tensor3(4, 3, 10));
  EXPECT_EQ(sp.program.num_vars, 3u * 10 + 2 * 4 * 10);
  EXPECT_EQ(sp.program.num_vars, 110u);
}

TEST(BuildSp2, ZeroProductionPushesTimesToUpperBounds) {
  const auto inst = zero_demand_instance(3);
  const Tensor3 y(4, 3, 3);
  const auto sp = build_sp2(inst, y);
  const auto out = lp::solve(sp.program);
  ASSERT_EQ(out.status, lp::Status::optimal);
  const auto sol = extract_solution(inst, out, sp.map, y);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t t = 0; t < 3; ++t)
      EXPECT_NEAR(sol.proc_time(m, t), inst.proc_time_bounds[m].max, 1e-9);
  EXPECT_EQ(sol.production, y);
}

TEST(BuildSp2, FullPl1LoadForcesMinimumTime) {
  Matrix d(kNumProducts, 1, 0.0);
  d(product::nonchem_cylinder, 0) = 12.6;  // 630 / 50
  const auto inst = plant_instance(d);
  Tensor3 y(4, 3, 1);
  y(product::nonchem_cylinder, machine::pl1, 0) = 12.6;
  const auto sp = build_sp2(inst, y);
  const auto out = lp::solve(sp.program);
  ASSERT_EQ(out.status, lp::Status::optimal);
  const auto sol = extract_solution(inst, out, sp.map, y);
  EXPECT_NEAR(sol.proc_time(machine::pl1, 0), 50.0, 1e-9);
  EXPECT_TRUE(check_feasibility(inst, sol).feasible());
}

TEST(BuildSp2, RejectsProductionBeyondRoutedDemand) {
  const auto inst = single_unit_instance();
  Tensor3 y(4, 3, 1);
  y(product::nonchem_cylinder, machine::pl1, 0) = 2.0;
  EXPECT_THROW(build_sp2(inst, y), input_error);
  y(product::nonchem_cylinder, machine::pl1, 0) = 0.0;
  y(product::nonchem_cylinder, machine::pl2, 0) = 1.0;
  EXPECT_THROW(build_sp2(inst, y), input_error);
  y(product::nonchem_cylinder, machine::pl2, 0) = -1.0;
  EXPECT_THROW(build_sp2(inst, y), input_error);
}

TEST(ExtractSolution, RoundTripIsFeasibleAndObjectivesMatch) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (auto cap : gen::kLevels) {
      const auto inst = generated(seed, gen::Horizon::t10, cap, gen::Level::low);
      const auto v = min_proc_times(inst);
      const auto sp1 = build_sp1(inst, v);
      const auto out1 = lp::solve(sp1.program);
      ASSERT_EQ(out1.status, lp::Status::optimal);
      const auto plan = extract_solution(inst, out1, sp1.map, v);
      EXPECT_TRUE(check_feasibility(inst, plan).feasible());
      EXPECT_NEAR(plan.objective, evaluate_objective(inst, plan), 1e-7 * std::abs(plan.objective));

      const auto sp2 = build_sp2(inst, plan.production);
      const auto out2 = lp::solve(sp2.program);
      ASSERT_EQ(out2.status, lp::Status::optimal);
      const auto next = extract_solution(inst, out2, sp2.map, plan.production);
      EXPECT_TRUE(check_feasibility(inst, next).feasible());
      EXPECT_EQ(next.production, plan.production);
      EXPECT_LE(next.objective, plan.objective + 1e-7 * std::abs(plan.objective));
    }
  }
}

TEST(ExtractSolution, SpeedLpInventoriesFollowTheBalanceRecursion) {
  const auto inst = generated(9, gen::Horizon::t20, gen::Level::med, gen::Level::med);
  const auto v = min_proc_times(inst);
  const auto sp1 = build_sp1(inst, v);
  const auto plan = extract_solution(inst, lp::solve(sp1.program), sp1.map, v);
  const auto sp2 = build_sp2(inst, plan.production);
  const auto sol = extract_solution(inst, lp::solve(sp2.program), sp2.map, plan.production);

  const auto& y = plan.production;
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (std::size_t t = 0; t < inst.num_periods; ++t) {
      s += y(i, inst.last_machine(i), t) - inst.demand(i, t);
      EXPECT_NEAR(sol.end_inventory(i, t), s, 1e-7);
    }
  }
  double u1 = 0.0, u3 = 0.0;
  for (std::size_t t = 0; t < inst.num_periods; ++t) {
    u1 += y(product::nonchem_plaque, machine::pl1, t) - y(product::nonchem_plaque, machine::cutter, t);
    u3 += y(product::chem_plaque, machine::pl2, t) - y(product::chem_plaque, machine::cutter, t);
    EXPECT_NEAR(sol.wip_inventory(product::nonchem_plaque, t), u1, 1e-7);
    EXPECT_NEAR(sol.wip_inventory(product::chem_plaque, t), u3, 1e-7);
    EXPECT_EQ(sol.wip_inventory(product::nonchem_cylinder, t), 0.0);
    EXPECT_EQ(sol.wip_inventory(product::chem_cylinder, t), 0.0);
  }
}

TEST(ExtractSolution, ZeroRateMachineTakesLargestAllowedTime) {
  const auto inst = generated(4);
  const auto v = min_proc_times(inst);
  const auto sp1 = build_sp1(inst, v);
  const auto plan = extract_solution(inst, lp::solve(sp1.program), sp1.map, v);
  const auto sp2 = build_sp2(inst, plan.production);
  const auto sol = extract_solution(inst, lp::solve(sp2.program), sp2.map, plan.production);
  for (std::size_t t = 0; t < inst.num_periods; ++t)
    EXPECT_EQ(sol.proc_time(machine::cutter, t), 80.0);
}

TEST(ExtractSolution, ContractViolationsThrow) {
  const auto inst = single_unit_instance();
  const auto v = min_proc_times(inst);
  const auto sp1 = build_sp1(inst, v);
  auto out = lp::solve(sp1.program);

  auto infeasible = out;
  infeasible.status = lp::Status::infeasible;
  EXPECT_THROW(extract_solution(inst, infeasible, sp1.map, v), contract_error);

  EXPECT_THROW(extract_solution(inst, out, sp1.map, Tensor3(4, 3, 1)), contract_error);

  auto wrong_objective = out;
  wrong_objective.objective += 1.0;
  EXPECT_THROW(extract_solution(inst, wrong_objective, sp1.map, v), contract_error);
}

TEST(Subproblems, PerPeriodFlowAddsRowsPerPeriod) {
  const auto inst = generated(5);
  const auto agg = build_sp1(inst, min_proc_times(inst), {FlowMode::aggregate});
  const auto strict = build_sp1(inst, min_proc_times(inst), {FlowMode::per_period});
  EXPECT_EQ(agg.program.count_rows_named("chem_flow"), 2u);
  EXPECT_EQ(strict.program.count_rows_named("chem_flow"), 2u * inst.num_periods);
}
