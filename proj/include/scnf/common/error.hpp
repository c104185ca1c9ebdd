#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scnf {

enum class Errc {
  InvalidArgument,
  UnwrittenBytes,
  AlreadyAttached,
  NotAttached,
  NotOwner,
  ClosedHandle,
  NegativePosition,
  SessionNotOpen,
  UnknownEntity,
  Deadlock,
  CyclicOrder,
  UnknownSyncOp,
  UnknownModel,
  TooLarge,
  ParseError,
  TooFewNodes,
  Config,
};

std::string_view to_string(Errc code);

// Single exception type for every failure the library reports. The code is
// what callers and tests branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace scnf
