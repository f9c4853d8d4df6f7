#pragma once

// JSON reading and writing for instances, solutions and generator configs.
// The instance layout is documented in schema/instance.schema.json. Machine
// numbers inside "sequence" are 1-based as in the plant's routing tables;
// everything else is positional.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lsms/errors.hpp"
#include "lsms/generator.hpp"
#include "lsms/heuristic.hpp"
#include "lsms/model.hpp"

namespace lsms::io {

using nlohmann::json;

namespace detail {

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (double v : m.row(r)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols,
                               const char* what) {
  if (!j.is_array() || j.size() != rows)
    throw input_error(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      throw input_error(std::string(what) + ": expected " + std::to_string(cols) + " columns");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw input_error(std::string(what) + ": entries must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

inline std::vector<double> vector_from_json(const json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n)
    throw input_error(std::string(what) + ": expected " + std::to_string(n) + " entries");
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!j[k].is_number()) throw input_error(std::string(what) + ": entries must be numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

inline const json& field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw input_error(std::string("missing field \"") + name + "\"");
  return *it;
}

inline std::size_t count_field(const json& j, const char* name) {
  const auto& f = field(j, name);
  if (!f.is_number_unsigned()) throw input_error(std::string(name) + " must be a nonnegative integer");
  return f.get<std::size_t>();
}

inline double number_field(const json& j, const char* name) {
  const auto& f = field(j, name);
  if (!f.is_number()) throw input_error(std::string(name) + " must be a number");
  return f.get<double>();
}

inline json tensor_to_json(const Tensor3& x) {
  json out = json::array();
  for (std::size_t a = 0; a < x.dim0(); ++a) {
    json plane = json::array();
    for (std::size_t b = 0; b < x.dim1(); ++b) {
      json row = json::array();
      for (std::size_t c = 0; c < x.dim2(); ++c) row.push_back(x(a, b, c));
      plane.push_back(std::move(row));
    }
    out.push_back(std::move(plane));
  }
  return out;
}

}  // namespace detail

inline json to_json(const Instance& inst) {
  json j;
  j["num_products"] = inst.num_products;
  j["num_machines"] = inst.num_machines;
  j["num_periods"] = inst.num_periods;
  json route = json::array();
  for (std::size_t i = 0; i < inst.route.rows(); ++i) {
    json row = json::array();
    for (int a : inst.route.row(i)) row.push_back(a);
    route.push_back(std::move(row));
  }
  j["route"] = std::move(route);
  json seq = json::array();
  for (const auto& s : inst.sequence) {
    json row = json::array();
    for (auto m : s) row.push_back(m + 1);
    seq.push_back(std::move(row));
  }
  j["sequence"] = std::move(seq);
  j["vao_cost"] = inst.vao_cost;
  j["transport_cost"] = inst.transport_cost;
  j["end_hold_cost"] = inst.end_hold_cost;
  j["wip_hold_cost"] = inst.wip_hold_cost;
  j["energy_rate"] = inst.energy_rate;
  json bounds = json::array();
  for (const auto& b : inst.proc_time_bounds) bounds.push_back({b.min, b.max});
  j["proc_time_bounds"] = std::move(bounds);
  j["demand"] = detail::matrix_to_json(inst.demand);
  j["capacity"] = inst.capacity;
  j["end_inv_cap"] = inst.end_inv_cap;
  j["wip_inv_cap"] = inst.wip_inv_cap;
  j["unit_length"] = inst.unit_length;
  return j;
}

/// Parses and validates an instance; any problem surfaces as input_error.
inline Instance instance_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw input_error("instance must be a JSON object");
  Instance inst;
  inst.num_products = count_field(j, "num_products");
  inst.num_machines = count_field(j, "num_machines");
  inst.num_periods = count_field(j, "num_periods");
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;

  const auto& route = field(j, "route");
  const Matrix r = matrix_from_json(route, I, M, "route");
  inst.route = Array2<int>(I, M);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t m = 0; m < M; ++m) {
      if (r(i, m) != 0.0 && r(i, m) != 1.0) throw input_error("route entries must be 0 or 1");
      inst.route(i, m) = static_cast<int>(r(i, m));
    }

  const auto& seq = field(j, "sequence");
  if (!seq.is_array() || seq.size() != I) throw input_error("sequence needs one list per product");
  for (const auto& s : seq) {
    if (!s.is_array()) throw input_error("sequence entries must be lists");
    std::vector<std::size_t> machines;
    for (const auto& m : s) {
      if (!m.is_number_unsigned() || m.get<std::size_t>() < 1 || m.get<std::size_t>() > M)
        throw input_error("sequence machines are numbered 1..num_machines");
      machines.push_back(m.get<std::size_t>() - 1);
    }
    inst.sequence.push_back(std::move(machines));
  }

  inst.vao_cost = vector_from_json(field(j, "vao_cost"), M, "vao_cost");
  inst.transport_cost = vector_from_json(field(j, "transport_cost"), I, "transport_cost");
  inst.end_hold_cost = vector_from_json(field(j, "end_hold_cost"), I, "end_hold_cost");
  inst.wip_hold_cost = vector_from_json(field(j, "wip_hold_cost"), I, "wip_hold_cost");
  inst.energy_rate = vector_from_json(field(j, "energy_rate"), M, "energy_rate");
  const Matrix bounds = matrix_from_json(field(j, "proc_time_bounds"), M, 2, "proc_time_bounds");
  for (std::size_t m = 0; m < M; ++m) inst.proc_time_bounds.push_back({bounds(m, 0), bounds(m, 1)});
  inst.demand = matrix_from_json(field(j, "demand"), I, T, "demand");
  inst.capacity = vector_from_json(field(j, "capacity"), T, "capacity");
  inst.end_inv_cap = number_field(j, "end_inv_cap");
  inst.wip_inv_cap = number_field(j, "wip_inv_cap");
  inst.unit_length = number_field(j, "unit_length");
  validate(inst);
  return inst;
}

inline json to_json(const Solution& sol) {
  json j;
  j["production"] = detail::tensor_to_json(sol.production);
  j["proc_time"] = detail::matrix_to_json(sol.proc_time);
  j["end_inventory"] = detail::matrix_to_json(sol.end_inventory);
  j["wip_inventory"] = detail::matrix_to_json(sol.wip_inventory);
  j["objective"] = sol.objective;
  return j;
}

inline Solution solution_from_json(const Instance& inst, const json& j) {
  using namespace detail;
  const auto I = inst.num_products, M = inst.num_machines, T = inst.num_periods;
  auto sol = Solution::zeros(inst);
  const auto& y = field(j, "production");
  if (!y.is_array() || y.size() != I) throw input_error("production: expected one plane per product");
  for (std::size_t i = 0; i < I; ++i) {
    const Matrix plane = matrix_from_json(y[i], M, T, "production");
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t t = 0; t < T; ++t) sol.production(i, m, t) = plane(m, t);
  }
  sol.proc_time = matrix_from_json(field(j, "proc_time"), M, T, "proc_time");
  sol.end_inventory = matrix_from_json(field(j, "end_inventory"), I, T, "end_inventory");
  sol.wip_inventory = matrix_from_json(field(j, "wip_inventory"), I, T, "wip_inventory");
  sol.objective = number_field(j, "objective");
  return sol;
}

inline json to_json(const FeasibilityReport& report) {
  json j;
  j["feasible"] = report.feasible();
  json list = json::array();
  for (const auto& v : report.violations)
    list.push_back({{"constraint", std::string(to_string(v.id))},
                    {"index", v.index},
                    {"magnitude", v.magnitude}});
  j["violations"] = std::move(list);
  return j;
}

inline json to_json(const HeuristicTrace& trace) {
  json j;
  json cycles = json::array();
  for (const auto& c : trace.cycles)
    cycles.push_back({{"sp1_objective", c.sp1_objective},
                      {"sp2_objective", c.sp2_objective},
                      {"max_rel_change", std::isfinite(c.max_rel_change) ? json(c.max_rel_change)
                                                                         : json(nullptr)},
                      {"wall_ms", c.wall_ms},
                      {"kept_incumbent", c.kept_incumbent}});
  j["cycles"] = std::move(cycles);
  j["cycle_count"] = trace.cycle_count();
  j["termination"] = std::string(to_string(trace.termination));
  j["total_ms"] = trace.total_ms;
  j["returned_best_seen"] = trace.returned_best_seen;
  if (!trace.diagnostics.empty()) j["diagnostics"] = trace.diagnostics;
  return j;
}

inline json to_json(const gen::GeneratorConfig& cfg) {
  return {{"horizon", std::string(gen::to_string(cfg.horizon))},
          {"num_periods", cfg.num_periods()},
          {"capacity_level", std::string(gen::to_string(cfg.capacity))},
          {"inventory_level", std::string(gen::to_string(cfg.inventory))},
          {"replicate", cfg.replicate},
          {"seed", cfg.seed},
          {"product_shares", cfg.product_shares},
          {"demand_bounds", {cfg.bounds().lo, cfg.bounds().hi}}};
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw input_error(std::string("malformed JSON: ") + e.what());
  }
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open instance file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return instance_from_json(parse_text(buffer.str()));
  } catch (const json::exception& e) {
    throw input_error(std::string("bad instance: ") + e.what());
  }
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace lsms::io
