#pragma once

#include <stdexcept>
#include <string>

namespace lsms {

/// Malformed or out-of-range input (dimension mismatch, bounds violated, bad file).
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The LP solver gave up (iteration limit, numerical breakdown). Distinct from
/// an infeasible or unbounded outcome, which are reported as data.
class solver_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition between modules.
class contract_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lsms
