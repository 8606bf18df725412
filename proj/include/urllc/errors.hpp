#pragma once

#include <stdexcept>
#include <string>

namespace urllc {

// Error taxonomy used across the toolkit. Everything derives from
// std::runtime_error so callers can catch coarsely; the CLI maps
// ConfigError to exit code 2 and the rest to exit code 3.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LogicError : std::runtime_error {
  explicit LogicError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace urllc
