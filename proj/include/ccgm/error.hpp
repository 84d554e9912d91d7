#pragma once

#include <stdexcept>
#include <string>

namespace ccgm {

// Error categories double as the CLI exit-code contract (0 ok, 2 usage,
// 3 I/O, 4 numeric failure).
enum class ErrorKind { Usage = 2, Io = 3, Numeric = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Contract violations on arguments (shape mismatch, unknown names, bad ranges).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Divergence, non-finite values, failed fits.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace ccgm
