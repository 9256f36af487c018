#pragma once

#include <stdexcept>
#include <string>

namespace parec {

/// Least-squares solver hit a non-finite value.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Forward field exceeded the blow-up guard.
struct BlowupError : std::runtime_error {
  explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace parec
