#pragma once

#include <stdexcept>
#include <string>

namespace pgh {

/// Raised when a caller violates an operation's preconditions
/// (dimension mismatch, out-of-range parameter, wrong norm family).
class contract_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces non-finite values, an SVD fails,
/// or a line search cannot find an acceptable step.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw contract_error(what);
}

}  // namespace detail
}  // namespace pgh
