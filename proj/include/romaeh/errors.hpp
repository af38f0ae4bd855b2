#ifndef ROMAEH_ERRORS_HPP
#define ROMAEH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace romaeh {

// Base error for everything raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration, geometry or input file (CLI exit code 2).
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Nonlinear or linear solver failed to converge (CLI exit code 3).
struct SolverError : Error {
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

// A coefficient identity check exceeded its tolerance (CLI exit code 4).
struct IdentityError : Error {
  explicit IdentityError(const std::string& msg) : Error(msg) {}
};

}  // namespace romaeh

#endif
