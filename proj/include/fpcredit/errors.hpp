#pragma once

#include <stdexcept>
#include <string>

namespace fpcredit {

// Invalid argument values: negative times, barriers at or above the firm value, bad probabilities.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Inconsistent run configuration (grid coarser than the schedule, unsupported start, ...).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Degenerate inputs for which the requested quantity does not exist (zero annuity, ...).
class DegenerateInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
  public:
    CalibrationError(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
    const std::string& diagnostics() const { return diagnostics_; }

  private:
    std::string diagnostics_;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          line_(line),
          column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace fpcredit
