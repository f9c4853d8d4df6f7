#pragma once

// Dense bounded-variable primal simplex for small linear programs.
//
// Variables carry finite lower bounds and optional upper bounds. Upper bounds
// are handled implicitly (nonbasic columns sit at either bound), fixed
// columns and empty rows are removed up front, and feasibility is found with
// a phase-1 over artificial columns. Pricing is Dantzig's rule, falling back
// to Bland's smallest-index rule after a run of degenerate pivots so the
// method terminates on degenerate problems. The final basis is refactored
// with an LU decomposition to clean up drift accumulated in the tableau.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lsms/errors.hpp"

namespace lsms::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
  std::string name;
};

struct VarBounds {
  double lower = 0.0;
  double upper = kInfinity;
};

/// minimize objective . x + objective_offset over bounds and constraints.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<Constraint> constraints;
  std::vector<VarBounds> bounds;
  std::vector<std::string> var_names;  // optional, used by the listing dump

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n) : num_vars(n), objective(n, 0.0), bounds(n) {}

  /// Appends a row with all-zero coefficients and returns it for filling in.
  Constraint& add_constraint(Relation rel, double rhs, std::string name = {}) {
    constraints.push_back({std::vector<double>(num_vars, 0.0), rel, rhs, std::move(name)});
    return constraints.back();
  }

  std::size_t count_rows_named(std::string_view prefix) const {
    std::size_t n = 0;
    for (const auto& c : constraints) n += c.name.starts_with(prefix);
    return n;
  }
};

enum class Status { optimal, infeasible, unbounded };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "unknown";
}

struct Outcome {
  Status status = Status::infeasible;
  std::vector<double> x;  // populated when optimal
  double objective = 0.0; // includes objective_offset
  // Row multipliers when optimal: for every feasible x,
  // objective . x >= duals . (A x - b) + objective . x, i.e. duals are <= 0 on
  // <= rows, >= 0 on >= rows and free on equality rows.
  std::vector<double> duals;
  std::size_t iterations = 0;
};

struct SolverOptions {
  std::size_t max_iterations = 0;  // 0 picks a limit from the problem size
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t degenerate_run_before_bland = 50;
};

/// Throws input_error when coefficient vectors or bounds are malformed.
inline void validate(const LinearProgram& lp) {
  const auto n = lp.num_vars;
  if (lp.objective.size() != n) throw input_error("objective length differs from num_vars");
  if (lp.bounds.size() != n) throw input_error("bounds length differs from num_vars");
  if (!lp.var_names.empty() && lp.var_names.size() != n)
    throw input_error("var_names length differs from num_vars");
  if (!std::isfinite(lp.objective_offset)) throw input_error("objective offset must be finite");
  for (std::size_t j = 0; j < n; ++j) {
    const auto& b = lp.bounds[j];
    if (!std::isfinite(lp.objective[j])) throw input_error("objective coefficient not finite");
    if (!std::isfinite(b.lower)) throw input_error("variable lower bounds must be finite");
    if (std::isnan(b.upper) || b.upper == -kInfinity || b.lower > b.upper)
      throw input_error("variable bounds need lower <= upper");
  }
  for (const auto& c : lp.constraints) {
    if (c.coeffs.size() != n) throw input_error("constraint length differs from num_vars");
    if (!std::isfinite(c.rhs)) throw input_error("constraint rhs must be finite");
    for (double a : c.coeffs)
      if (!std::isfinite(a)) throw input_error("constraint coefficient not finite");
  }
}

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SolverOptions& opt) : lp_(lp), opt_(opt) {}

  Outcome run() {
    Outcome out;
    if (!presolve()) {
      out.status = Status::infeasible;
      return out;
    }
    build_tableau();
    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * (rows_ + cols_) + 1000;

    if (num_art_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = art_begin_; j < cols_; ++j) phase1[j] = 1.0;
      price_from(phase1);
      iterate(/*phase_one=*/true);
      double infeasibility = 0.0;
      for (std::size_t r = 0; r < rows_; ++r)
        if (basis_[r] >= art_begin_) infeasibility += std::max(0.0, beta_[r]);
      if (infeasibility > phase1_tol_) {
        out.status = Status::infeasible;
        out.iterations = iterations_;
        return out;
      }
      for (std::size_t j = art_begin_; j < cols_; ++j) {
        upper_[j] = 0.0;
        at_upper_[j] = 0;
      }
    }

    price_from(cost_);
    if (!iterate(/*phase_one=*/false)) {
      out.status = Status::unbounded;
      out.iterations = iterations_;
      return out;
    }

    refine();
    out.status = Status::optimal;
    out.iterations = iterations_;
    out.x = primal();
    out.objective = lp_.objective_offset;
    for (std::size_t j = 0; j < lp_.num_vars; ++j) out.objective += lp_.objective[j] * out.x[j];
    out.duals = duals();
    return out;
  }

 private:
  // Removes fixed columns and empty rows; false if an empty row is violated.
  bool presolve() {
    const auto n = lp_.num_vars;
    col_of_var_.assign(n, npos);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = lp_.bounds[j];
      if (b.upper - b.lower > 0.0) {
        col_of_var_[j] = kept_vars_.size();
        kept_vars_.push_back(j);
      }
    }
    double rhs_scale = 0.0;
    for (std::size_t r = 0; r < lp_.constraints.size(); ++r) {
      const auto& c = lp_.constraints[r];
      double shifted = c.rhs;
      bool empty = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (c.coeffs[j] == 0.0) continue;
        shifted -= c.coeffs[j] * lp_.bounds[j].lower;
        if (col_of_var_[j] != npos) empty = false;
      }
      rhs_scale = std::max(rhs_scale, std::abs(shifted));
      if (empty) {
        const double tol = opt_.feasibility_tol * (1.0 + std::abs(c.rhs));
        const bool ok = c.relation == Relation::less_equal      ? 0.0 <= shifted + tol
                        : c.relation == Relation::greater_equal ? 0.0 >= shifted - tol
                                                                : std::abs(shifted) <= tol;
        if (!ok) return false;
        continue;
      }
      kept_rows_.push_back(r);
      shifted_rhs_.push_back(shifted);
    }
    phase1_tol_ = 1e-8 * (1.0 + rhs_scale);
    return true;
  }

  void build_tableau() {
    rows_ = kept_rows_.size();
    const std::size_t n_struct = kept_vars_.size();
    std::size_t n_slack = 0;
    for (auto r : kept_rows_) n_slack += lp_.constraints[r].relation != Relation::equal;

    // A row needs an artificial column unless its slack enters the initial
    // basis with coefficient +1 after making the right-hand side nonnegative.
    row_sign_.resize(rows_);
    std::vector<double> slack_coef(rows_, 0.0);
    num_art_ = 0;
    for (std::size_t k = 0; k < rows_; ++k) {
      const auto& c = lp_.constraints[kept_rows_[k]];
      row_sign_[k] = shifted_rhs_[k] < 0.0 ? -1.0 : 1.0;
      if (c.relation == Relation::less_equal) slack_coef[k] = row_sign_[k];
      if (c.relation == Relation::greater_equal) slack_coef[k] = -row_sign_[k];
      if (slack_coef[k] != 1.0) ++num_art_;
    }
    slack_begin_ = n_struct;
    art_begin_ = n_struct + n_slack;
    cols_ = art_begin_ + num_art_;

    a_.assign(rows_ * cols_, 0.0);
    beta_.assign(rows_, 0.0);
    upper_.assign(cols_, kInfinity);
    cost_.assign(cols_, 0.0);
    at_upper_.assign(cols_, 0);
    is_basic_.assign(cols_, 0);
    basis_.assign(rows_, 0);
    identity_col_.assign(rows_, 0);

    for (std::size_t k = 0; k < n_struct; ++k) {
      const auto j = kept_vars_[k];
      upper_[k] = lp_.bounds[j].upper - lp_.bounds[j].lower;
      cost_[k] = lp_.objective[j];
    }
    std::size_t next_slack = slack_begin_, next_art = art_begin_;
    for (std::size_t k = 0; k < rows_; ++k) {
      const auto& c = lp_.constraints[kept_rows_[k]];
      double* row = &a_[k * cols_];
      for (std::size_t j = 0; j < lp_.num_vars; ++j)
        if (col_of_var_[j] != npos) row[col_of_var_[j]] = row_sign_[k] * c.coeffs[j];
      beta_[k] = row_sign_[k] * shifted_rhs_[k];
      if (c.relation != Relation::equal) row[next_slack] = slack_coef[k];
      if (slack_coef[k] == 1.0) {
        basis_[k] = next_slack;
      } else {
        row[next_art] = 1.0;
        basis_[k] = next_art++;
      }
      if (c.relation != Relation::equal) ++next_slack;
      identity_col_[k] = basis_[k];
      is_basic_[basis_[k]] = 1;
    }
    a0_ = a_;
    b0_ = beta_;
  }

  void price_from(const std::vector<double>& costs) {
    phase_cost_ = costs;
    d_ = costs;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = costs[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &a_[r * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
  }

  // Returns false when an improving ray is found (unbounded).
  bool iterate(bool phase_one) {
    std::size_t degenerate_run = 0;
    for (;;) {
      if (iterations_ >= max_iter_)
        throw solver_failure("simplex iteration limit exceeded");
      const bool bland = degenerate_run >= opt_.degenerate_run_before_bland;

      std::size_t enter = npos;
      double best = 0.0;
      const std::size_t limit = phase_one ? cols_ : art_begin_;
      for (std::size_t j = 0; j < limit; ++j) {
        if (is_basic_[j] || upper_[j] == 0.0) continue;
        const double score = at_upper_[j] ? d_[j] : -d_[j];
        if (score <= opt_.optimality_tol) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (score > best) {
          best = score;
          enter = j;
        }
      }
      if (enter == npos) return true;

      const double dir = at_upper_[enter] ? -1.0 : 1.0;
      // Ratio test: basic values move by -dir * theta * alpha.
      double theta = kInfinity;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double alpha = dir * a_[r * cols_ + enter];
        const double lim = step_limit(r, alpha);
        theta = std::min(theta, lim);
      }
      std::size_t leave = npos;
      if (theta < kInfinity) {
        const double slack = 1e-12 * (1.0 + theta);
        double best_alpha = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
          const double alpha = dir * a_[r * cols_ + enter];
          if (step_limit(r, alpha) > theta + slack) continue;
          if (bland) {
            if (leave == npos || basis_[r] < basis_[leave]) leave = r;
          } else if (std::abs(alpha) > best_alpha) {
            best_alpha = std::abs(alpha);
            leave = r;
          }
        }
      }
      const double flip = upper_[enter];
      if (flip == kInfinity && theta == kInfinity) return false;

      ++iterations_;
      if (flip <= theta) {
        for (std::size_t r = 0; r < rows_; ++r) beta_[r] -= dir * flip * a_[r * cols_ + enter];
        at_upper_[enter] ^= 1;
        degenerate_run = 0;
        continue;
      }

      theta = std::max(theta, 0.0);
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
      for (std::size_t r = 0; r < rows_; ++r) beta_[r] -= dir * theta * a_[r * cols_ + enter];
      const double entering_value = (at_upper_[enter] ? upper_[enter] : 0.0) + dir * theta;
      const auto out = basis_[leave];
      at_upper_[out] = dir * a_[leave * cols_ + enter] < 0.0 ? 1 : 0;
      if (upper_[out] == 0.0) at_upper_[out] = 0;
      pivot(leave, enter);
      is_basic_[out] = 0;
      is_basic_[enter] = 1;
      at_upper_[enter] = 0;
      basis_[leave] = enter;
      beta_[leave] = entering_value;
    }
  }

  double step_limit(std::size_t r, double alpha) const {
    if (alpha > opt_.pivot_tol) return std::max(beta_[r], 0.0) / alpha;
    if (alpha < -opt_.pivot_tol) {
      const double ub = upper_[basis_[r]];
      if (ub == kInfinity) return kInfinity;
      return std::max(ub - beta_[r], 0.0) / -alpha;
    }
    return kInfinity;
  }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = &a_[pr * cols_];
    const double inv = 1.0 / prow[pc];
    nz_.clear();
    for (std::size_t j = 0; j < cols_; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] *= inv;
      nz_.push_back(j);
    }
    prow[pc] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[pc];
      if (f == 0.0) return;
      for (auto j : nz_) {
        double v = row[j] - f * prow[j];
        row[j] = std::abs(v) < 1e-14 ? 0.0 : v;
      }
      row[pc] = 0.0;
    };
    for (std::size_t r = 0; r < rows_; ++r)
      if (r != pr) eliminate(&a_[r * cols_]);
    eliminate(d_.data());
  }

  // Recomputes basic values (and the multipliers later) from the original
  // rows with a fresh factorization of the final basis.
  void refine() {
    if (rows_ == 0) return;
    Eigen::MatrixXd B(rows_, rows_);
    Eigen::VectorXd rhs(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      double v = b0_[r];
      for (std::size_t j = 0; j < cols_; ++j)
        if (!is_basic_[j] && at_upper_[j]) v -= a0_[r * cols_ + j] * upper_[j];
      rhs(r) = v;
      for (std::size_t k = 0; k < rows_; ++k) B(r, k) = a0_[r * cols_ + basis_[k]];
    }
    lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(B);
    const Eigen::VectorXd xb = lu_.solve(rhs);
    if (!xb.allFinite()) return;
    auto violation = [&](auto value_of) {
      double worst = 0.0;
      for (std::size_t k = 0; k < rows_; ++k) {
        const double v = value_of(k);
        worst = std::max(worst, -v);
        worst = std::max(worst, v - upper_[basis_[k]]);
      }
      return worst;
    };
    const double before = violation([&](std::size_t k) { return beta_[k]; });
    const double after = violation([&](std::size_t k) { return xb(k); });
    if (after <= std::max(before, 1e-9)) {
      for (std::size_t k = 0; k < rows_; ++k) beta_[k] = xb(k);
      refined_ = true;
    }
  }

  std::vector<double> primal() const {
    std::vector<double> col_value(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j)
      if (!is_basic_[j] && at_upper_[j]) col_value[j] = upper_[j];
    for (std::size_t r = 0; r < rows_; ++r)
      col_value[basis_[r]] = std::clamp(beta_[r], 0.0, upper_[basis_[r]]);
    std::vector<double> x(lp_.num_vars);
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      x[j] = lp_.bounds[j].lower;
      if (col_of_var_[j] != npos) x[j] += col_value[col_of_var_[j]];
    }
    return x;
  }

  std::vector<double> duals() const {
    std::vector<double> y(lp_.constraints.size(), 0.0);
    if (rows_ == 0) return y;
    Eigen::VectorXd yn(rows_);
    if (refined_) {
      Eigen::VectorXd cb(rows_);
      for (std::size_t k = 0; k < rows_; ++k) cb(k) = cost_[basis_[k]];
      yn = lu_.transpose().solve(cb);
    } else {
      for (std::size_t k = 0; k < rows_; ++k) yn(k) = cost_[identity_col_[k]] - d_[identity_col_[k]];
    }
    for (std::size_t k = 0; k < rows_; ++k) y[kept_rows_[k]] = row_sign_[k] * yn(k);
    return y;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const LinearProgram& lp_;
  SolverOptions opt_;

  std::vector<std::size_t> col_of_var_;
  std::vector<std::size_t> kept_vars_;
  std::vector<std::size_t> kept_rows_;
  std::vector<double> shifted_rhs_;
  std::vector<double> row_sign_;
  double phase1_tol_ = 0.0;

  std::size_t rows_ = 0, cols_ = 0;
  std::size_t slack_begin_ = 0, art_begin_ = 0, num_art_ = 0;
  std::vector<double> a_, a0_, b0_, beta_, upper_, cost_, phase_cost_, d_;
  std::vector<char> at_upper_, is_basic_;
  std::vector<std::size_t> basis_, identity_col_, nz_;
  std::size_t iterations_ = 0, max_iter_ = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool refined_ = false;
};

}  // namespace detail

/// Solves the LP. Infeasible and unbounded problems are reported through the
/// outcome status; malformed input throws input_error and running out of
/// iterations throws solver_failure.
inline Outcome solve(const LinearProgram& lp, const SolverOptions& options = {}) {
  validate(lp);
  return detail::BoundedSimplex(lp, options).run();
}

/// Writes the LP as a free-format MPS listing with columns in index order.
inline void write_mps(std::ostream& os, const LinearProgram& lp, std::string_view name = "LP") {
  validate(lp);
  auto col = [&](std::size_t j) {
    return lp.var_names.empty() ? "x" + std::to_string(j) : lp.var_names[j];
  };
  auto row = [&](std::size_t r) {
    return lp.constraints[r].name.empty() ? "r" + std::to_string(r) : lp.constraints[r].name;
  };
  std::ostringstream out;
  out << std::setprecision(17);
  out << "NAME " << name << "\n";
  out << "* objective offset " << lp.objective_offset << "\n";
  out << "ROWS\n N OBJ\n";
  for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
    const char tag = lp.constraints[r].relation == Relation::less_equal      ? 'L'
                     : lp.constraints[r].relation == Relation::greater_equal ? 'G'
                                                                             : 'E';
    out << " " << tag << " " << row(r) << "\n";
  }
  out << "COLUMNS\n";
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (lp.objective[j] != 0.0) out << " " << col(j) << " OBJ " << lp.objective[j] << "\n";
    for (std::size_t r = 0; r < lp.constraints.size(); ++r)
      if (lp.constraints[r].coeffs[j] != 0.0)
        out << " " << col(j) << " " << row(r) << " " << lp.constraints[r].coeffs[j] << "\n";
  }
  out << "RHS\n";
  for (std::size_t r = 0; r < lp.constraints.size(); ++r)
    if (lp.constraints[r].rhs != 0.0) out << " RHS " << row(r) << " " << lp.constraints[r].rhs << "\n";
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const auto& b = lp.bounds[j];
    if (b.lower == b.upper) {
      out << " FX BND " << col(j) << " " << b.lower << "\n";
      continue;
    }
    if (b.lower != 0.0) out << " LO BND " << col(j) << " " << b.lower << "\n";
    if (b.upper != kInfinity) out << " UP BND " << col(j) << " " << b.upper << "\n";
  }
  out << "ENDATA\n";
  os << out.str();
}

}  // namespace lsms::lp
