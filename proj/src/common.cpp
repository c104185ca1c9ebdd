#include <charconv>

#include "scnf/common/error.hpp"
#include "scnf/common/types.hpp"

namespace scnf {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UnwrittenBytes: return "UnwrittenBytes";
    case Errc::AlreadyAttached: return "AlreadyAttached";
    case Errc::NotAttached: return "NotAttached";
    case Errc::NotOwner: return "NotOwner";
    case Errc::ClosedHandle: return "ClosedHandle";
    case Errc::NegativePosition: return "NegativePosition";
    case Errc::SessionNotOpen: return "SessionNotOpen";
    case Errc::UnknownEntity: return "UnknownEntity";
    case Errc::Deadlock: return "Deadlock";
    case Errc::CyclicOrder: return "CyclicOrder";
    case Errc::UnknownSyncOp: return "UnknownSyncOp";
    case Errc::UnknownModel: return "UnknownModel";
    case Errc::TooLarge: return "TooLarge";
    case Errc::ParseError: return "ParseError";
    case Errc::TooFewNodes: return "TooFewNodes";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

std::string to_string(const ByteRange& r) {
  return "[" + std::to_string(r.start) + "," + std::to_string(r.end) + "]";
}

std::string to_string(const ClientId& id) {
  return std::to_string(id.node) + "." + std::to_string(id.rank);
}

std::optional<ClientId> parse_client_id(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return std::nullopt;
  ClientId id;
  const char* b = text.data();
  auto r1 = std::from_chars(b, b + dot, id.node);
  auto r2 = std::from_chars(b + dot + 1, b + text.size(), id.rank);
  if (r1.ec != std::errc{} || r1.ptr != b + dot) return std::nullopt;
  if (r2.ec != std::errc{} || r2.ptr != b + text.size()) return std::nullopt;
  return id;
}

}  // namespace scnf
