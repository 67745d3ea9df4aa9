#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynabs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the system-definition and expression parsers. Line and column are
// 1-based; line is 0 when the text did not come from a file.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Non-finite value produced while evaluating a component of f or g.
class EvalError : public Error {
 public:
  EvalError(const std::string& what, std::size_t component)
      : Error(what), component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

// A trajectory enclosure left the box on which the declared constants hold.
class DomainEscape : public Error {
 public:
  DomainEscape(const std::string& what, double time, std::vector<double> seed)
      : Error(what), time_(time), seed_(std::move(seed)) {}
  double time() const { return time_; }
  const std::vector<double>& seed() const { return seed_; }

 private:
  double time_;
  std::vector<double> seed_;
};

// The enclosure could not be made thinner than epsilon before the step size
// underflowed.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::vector<double> seed)
      : Error(what), seed_(std::move(seed)) {}
  const std::vector<double>& seed() const { return seed_; }

 private:
  std::vector<double> seed_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace dynabs
