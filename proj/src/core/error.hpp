#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kardashev {

enum class ErrorKind {
  kArgument,
  kDomain,
  kSchema,
  kValidation,
  kIntegrity,
  kCompleteness,
  kEstimation,
  kCapability,
  kModelIntegrity,
  kIo,
};

const char* to_string(ErrorKind kind);

// Base of every error thrown by the library. The kind drives the C status
// code and, through it, the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& m) : Error(ErrorKind::kArgument, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorKind::kDomain, m) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& m) : Error(ErrorKind::kSchema, m) {}
};

class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& m) : Error(ErrorKind::kCapability, m) {}
};

class ModelIntegrityError : public Error {
 public:
  explicit ModelIntegrityError(const std::string& m)
      : Error(ErrorKind::kModelIntegrity, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

class CompletenessError : public Error {
 public:
  explicit CompletenessError(const std::string& m)
      : Error(ErrorKind::kCompleteness, m) {}
};

// Data-file problems carry their location so messages can name file, line
// and column.
class DataError : public Error {
 public:
  DataError(ErrorKind kind, std::string file, long line, std::string column,
            const std::string& what)
      : Error(kind, format(file, line, column, what)),
        file_(std::move(file)),
        line_(line),
        column_(std::move(column)) {}

  const std::string& file() const noexcept { return file_; }
  long line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& file, long line,
                            const std::string& column, const std::string& what) {
    std::string out = file;
    if (line > 0) out += ":" + std::to_string(line);
    if (!column.empty()) out += ": column '" + column + "'";
    return out + ": " + what;
  }

  std::string file_;
  long line_;
  std::string column_;
};

// Thrown when the optimizer runs out of iterations. The best parameter vector
// seen is kept so callers can inspect or reuse it.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& m, std::vector<double> best_params,
                  double best_value)
      : Error(ErrorKind::kEstimation, m),
        best_params_(std::move(best_params)),
        best_value_(best_value) {}

  const std::vector<double>& best_params() const noexcept { return best_params_; }
  double best_value() const noexcept { return best_value_; }

 private:
  std::vector<double> best_params_;
  double best_value_;
};

}  // namespace kardashev
