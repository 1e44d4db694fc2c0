#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpe {

// invalid problem setup or config file contents
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerical failure: non-convergence, iteration caps, ...
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// rank deficiency detected during factorization; carries the failing pivot index
struct SingularError : NumericalError {
  std::size_t pivot_index;
  SingularError(const std::string& msg, std::size_t idx)
      : NumericalError(msg), pivot_index(idx) {}
};

}  // namespace gpe
