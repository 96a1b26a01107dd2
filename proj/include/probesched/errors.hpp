#pragma once

#include <stdexcept>
#include <string>

namespace probesched {

// Exit codes used by the CLI; each error class maps to one.
class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

/// Invalid instance, parameters or file contents.
class ValidationError : public ProbeError {
 public:
  using ProbeError::ProbeError;
  int exit_code() const override { return 1; }
};

/// An iterative solver hit its iteration budget.
class ConvergenceError : public ProbeError {
 public:
  using ProbeError::ProbeError;
  int exit_code() const override { return 2; }
};

class IoError : public ProbeError {
 public:
  using ProbeError::ProbeError;
  int exit_code() const override { return 3; }
};

}  // namespace probesched
