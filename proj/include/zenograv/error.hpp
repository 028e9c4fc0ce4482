#pragma once

#include <stdexcept>
#include <string>

namespace zenograv {

// Errors carry a category so the CLI can map them onto exit codes.
enum class ErrorCategory { kValidation, kNumerical, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& what)
      : Error(ErrorCategory::kValidation, "invalid parameter: " + what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(ErrorCategory::kIo, "i/o error: " + what) {}
};

}  // namespace zenograv
