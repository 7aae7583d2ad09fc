#pragma once

#include <stdexcept>
#include <string>

namespace coflow {

// Raised for malformed input data: invalid instances, bad documents,
// unparsable traces. Callers that own a process boundary map it to a
// data-error exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an algorithm detects a broken internal invariant, e.g. a
// residual dual slack that went negative.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace coflow
