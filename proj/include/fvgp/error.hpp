#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fvgp {

/// Bad input: malformed files, invalid parameters, inadmissible meshes.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-finite state, solver breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the state stops being finite during time stepping.
class NonFiniteState : public NumericalError {
 public:
  explicit NonFiniteState(std::size_t step)
      : NumericalError("non-finite value in state after step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace fvgp
