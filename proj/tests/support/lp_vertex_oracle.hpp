#pragma once

// Brute-force LP reference for tiny problems: enumerates every basic point
// of the constraint polyhedron (all n-subsets of the constraint and bound
// hyperplanes), and decides unboundedness by minimizing the cost over the
// normalized recession cone, which is itself a polytope.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lsms/lp.hpp"

namespace lsms::testing {

struct Halfspace {
  std::vector<double> a;  // a . x <= b
  double b = 0.0;
  bool equality = false;
};

enum class OracleStatus { optimal, infeasible, unbounded };

struct OracleResult {
  OracleStatus status = OracleStatus::infeasible;
  double objective = 0.0;
};

namespace oracle_detail {

inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> A,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    if (std::abs(A[p][c]) < 1e-9) return std::nullopt;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

inline bool satisfies(const std::vector<Halfspace>& hs, const std::vector<double>& x) {
  for (const auto& h : hs) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += h.a[j] * x[j];
    const double tol = 1e-7 * (1.0 + std::abs(h.b));
    if (lhs > h.b + tol) return false;
    if (h.equality && lhs < h.b - tol) return false;
  }
  return true;
}

/// Minimum of c . x over the basic feasible points; nullopt if there are none.
inline std::optional<double> min_over_vertices(const std::vector<Halfspace>& hs,
                                               const std::vector<double>& c) {
  const std::size_t n = c.size();
  const std::size_t k = hs.size();
  if (n == 0) {
    if (!satisfies(hs, {})) return std::nullopt;
    return 0.0;
  }
  if (k < n) return std::nullopt;
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::vector<std::vector<double>> A(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      A[i] = hs[pick[i]].a;
      b[i] = hs[pick[i]].b;
    }
    if (auto x = solve_square(A, b); x && satisfies(hs, *x)) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += c[j] * (*x)[j];
      if (!best || v < *best) best = v;
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == k - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace oracle_detail

inline OracleResult vertex_enumeration_solve(const lp::LinearProgram& prob) {
  const std::size_t n = prob.num_vars;
  std::vector<Halfspace> feasible, cone;
  for (const auto& row : prob.constraints) {
    std::vector<double> neg(row.coeffs);
    for (auto& v : neg) v = -v;
    switch (row.relation) {
      case lp::Relation::less_equal:
        feasible.push_back({row.coeffs, row.rhs, false});
        cone.push_back({row.coeffs, 0.0, false});
        break;
      case lp::Relation::greater_equal:
        feasible.push_back({neg, -row.rhs, false});
        cone.push_back({neg, 0.0, false});
        break;
      case lp::Relation::equal:
        feasible.push_back({row.coeffs, row.rhs, true});
        cone.push_back({row.coeffs, 0.0, true});
        break;
    }
  }
  std::vector<double> ones(n, 1.0);
  cone.push_back({ones, 1.0, false});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = -1.0;
    feasible.push_back({e, -prob.bounds[j].lower, false});
    cone.push_back({e, 0.0, false});
    if (prob.bounds[j].upper != lp::kInfinity) {
      e[j] = 1.0;
      feasible.push_back({e, prob.bounds[j].upper, false});
      cone.push_back({e, 0.0, false});
    }
  }

  // Every variable has a finite lower bound, so the polyhedron is pointed
  // and has a vertex whenever it is nonempty.
  const auto best = oracle_detail::min_over_vertices(feasible, prob.objective);
  if (!best) return {OracleStatus::infeasible, 0.0};
  const auto ray = oracle_detail::min_over_vertices(cone, prob.objective);
  if (ray && *ray < -1e-9) return {OracleStatus::unbounded, 0.0};
  return {OracleStatus::optimal, *best + prob.objective_offset};
}

}  // namespace lsms::testing
