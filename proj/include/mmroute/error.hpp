#pragma once

#include <stdexcept>
#include <string>

namespace mmroute {

// Exit codes reported by the command-line tool.
enum class ExitCode : int { ok = 0, validation = 2, config = 3, runtime = 4 };

// Bad input data: malformed rows, out-of-range cells, shape mismatches.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration, including forbidden oracle use.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failures that happen while computing (divergence, I/O after validation).
class RuntimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmroute
