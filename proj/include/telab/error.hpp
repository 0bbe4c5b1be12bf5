#pragma once

#include <stdexcept>
#include <string>

namespace telab {

// Error categories, kept coarse so callers (and the CLI) can map them to
// distinct exit codes without string matching.
enum class ErrorKind {
  io,            // file missing / unreadable
  parse,         // malformed input syntax
  validation,    // input violates a data-model invariant
  precondition,  // operation called outside its contract
  unknown_name,  // node / algorithm / method name not found
  infeasible,    // optimization has no feasible point
  internal,      // invariant broken inside the library
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::unknown_name: return "unknown-name";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace telab
