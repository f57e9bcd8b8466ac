#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hup {

enum class ErrorKind {
  Parameter,    // argument outside its domain (beta <= 0, m out of range, ...)
  Domain,       // evaluation point on/outside a wall, zero-norm lifted block
  Capability,   // operation not supported for this field (no exact form, ...)
  Convergence,  // quadrature refinement disagreement, divergent integral
  Evaluation,   // non-finite integrand value at a quadrature node
  Degenerate,   // N == 0, E == 0, zero variance
  Optimization, // bracket failure or multi-start disagreement
  Conditioning, // rank-deficient Gram matrix
  Catalog,      // unknown catalog name or bad parameters
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Optimization: return "optimization";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::Catalog: return "catalog";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace hup
