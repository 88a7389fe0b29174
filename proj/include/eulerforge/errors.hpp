#pragma once
#include <stdexcept>
#include <string>

namespace ef {

// Caller broke a precondition (rank mismatch, bad grid, ...).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Numerical failure or an input outside the admissible regime.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

}  // namespace ef
