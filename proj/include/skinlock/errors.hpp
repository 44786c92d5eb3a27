#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace skinlock {

/// Failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  parameter,
  index,
  degeneracy,
  decomposition,
  envelope_overflow,
  stability,
  solve,
  dark_source,
  step_size,
  normalization,
  infeasibility,
  validation,
  scale,
  convergence,
  regime,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Raised by the explicit jump decompositions when a residual onsite loss
/// weight would be negative. `deficit` is the most negative weight, negated.
class InfeasibilityError : public Error {
public:
  InfeasibilityError(const std::string& message, double deficit, std::string site)
      : Error(ErrorKind::infeasibility, message), deficit_(deficit), site_(std::move(site)) {}

  double deficit() const noexcept { return deficit_; }
  const std::string& site() const noexcept { return site_; }

private:
  double deficit_;
  std::string site_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace skinlock
