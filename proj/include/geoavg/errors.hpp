#pragma once

#include <stdexcept>
#include <string>

namespace geoavg {

/// Caller broke a documented precondition (bad argument shape, step <= 0, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Point outside the open domain of the chart it claims to live in.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& chart, const std::string& what)
      : std::runtime_error("chart '" + chart + "': " + what), chart_(chart) {}
  const std::string& chart() const noexcept { return chart_; }

 private:
  std::string chart_;
};

/// No transition exists between the charts involved.
class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular metric, non-finite values and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shooting failed on every start.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// System-definition or run configuration could not be parsed/validated.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& field, const std::string& what)
      : std::runtime_error(format(line, field, what)), line_(line), field_(field) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(int line, const std::string& field, const std::string& what) {
    std::string msg;
    if (line > 0) msg += "line " + std::to_string(line) + ": ";
    if (!field.empty()) msg += "'" + field + "': ";
    return msg + what;
  }
  int line_;
  std::string field_;
};

}  // namespace geoavg
