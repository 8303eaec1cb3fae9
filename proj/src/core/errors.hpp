#pragma once

#include <stdexcept>
#include <string>

namespace topdown {

/// Precondition violated by the caller (bad coordinate, repeated query, p
/// outside [0,1], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed external input (function spec, tree file, dataset, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request refused because the guarantees it would check do not apply
/// (non-monotone target, tree of size 1, arity above a search cap).
class RefusedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topdown
