#pragma once
#include <stdexcept>
#include <string>

namespace qbind {

//! Thrown when an input lies outside the mathematical domain of an operation
//! (non-positive mass scale, photon momentum where none is allowed, a charge
//! grid clipped by its own boundary, ...).
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string &what) : std::runtime_error(what) {}
};

//! Thrown when adaptive refinement exhausts its budget without the last two
//! estimates agreeing to tolerance. Carries both estimates so callers can
//! report how far apart they were.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string &what, double previous, double last)
      : std::runtime_error(what), m_previous(previous), m_last(last) {}
  double previous_estimate() const { return m_previous; }
  double last_estimate() const { return m_last; }

private:
  double m_previous;
  double m_last;
};

//! Thrown when a structural invariant fails at runtime (an occupation table
//! whose normalization depends on the photon momentum, a profile that breaks
//! the pointwise occupation bound, ...).
class InvariantError : public std::runtime_error {
public:
  explicit InvariantError(const std::string &what) : std::runtime_error(what) {}
};

//! Thrown for malformed configuration: unknown keys, unparsable values,
//! out-of-range command-line settings.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

//! Process exit codes used by the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_invariant = 2,
  exit_convergence = 3,
  exit_config = 4
};

} // namespace qbind
