#pragma once

#include <stdexcept>
#include <string>

namespace iccsim {

// Error classes map onto the CLI exit codes: config errors exit 2,
// numerical failures exit 3, oracle mismatches exit 4.  The `error_class`
// tag is printed on stderr in machine-readable form.

class Error : public std::runtime_error {
 public:
  Error(std::string error_class, const std::string& msg)
      : std::runtime_error(msg), class_(std::move(error_class)) {}
  const std::string& error_class() const { return class_; }

 private:
  std::string class_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& error_class, const std::string& msg)
      : Error(error_class, msg) {}
};

class OracleError : public Error {
 public:
  OracleError(const std::string& error_class, const std::string& msg)
      : Error(error_class, msg) {}
};

}  // namespace iccsim
