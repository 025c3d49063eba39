#pragma once

#include <stdexcept>
#include <string>

namespace isinglab {

// Input exceeds a configured enumeration / state-space cap.
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed (quadrature did not converge, degenerate
// importance weights, ...). Distinct from bad input.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isinglab
