#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rpm {

enum class ErrorCode {
  EmptyInput,
  ParseError,
  InvalidArgument,
  NotEnoughSnapshots,
  InsufficientHistory,
  NodeUniverseMismatch,
  SingleClass,
  NonFiniteFeature,
  SchemaMismatch,
  LengthMismatch,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Sink for non-fatal diagnostics (trailing snapshots dropped, ignored
/// weight columns, ...). Defaults to stderr; tests swap it out.
inline std::function<void(std::string_view)>& warning_handler() {
  static std::function<void(std::string_view)> handler =
      [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return handler;
}

inline void warn(std::string_view msg) {
  if (warning_handler()) warning_handler()(msg);
}

}  // namespace rpm
