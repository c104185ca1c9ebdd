#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "scnf/common/error.hpp"

namespace scnf {

// Inclusive byte range [start, end]. Never empty.
struct ByteRange {
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  ByteRange() = default;
  ByteRange(std::uint64_t s, std::uint64_t e) : start(s), end(e) {
    if (e < s) throw Error(Errc::InvalidArgument, "range end precedes start");
  }

  // Converts the (offset, size) spelling used by the file-system API.
  static ByteRange from_offset_size(std::uint64_t offset, std::uint64_t size) {
    if (size == 0) throw Error(Errc::InvalidArgument, "zero-length range");
    return ByteRange(offset, offset + size - 1);
  }

  [[nodiscard]] std::uint64_t length() const noexcept { return end - start + 1; }
  [[nodiscard]] bool contains(std::uint64_t off) const noexcept { return off >= start && off <= end; }
  [[nodiscard]] bool contains(const ByteRange& o) const noexcept { return o.start >= start && o.end <= end; }
  [[nodiscard]] bool overlaps(const ByteRange& o) const noexcept { return start <= o.end && o.start <= end; }

  // Caller must check overlaps() first.
  [[nodiscard]] ByteRange intersect(const ByteRange& o) const {
    return ByteRange(std::max(start, o.start), std::min(end, o.end));
  }

  auto operator<=>(const ByteRange&) const = default;
};

std::string to_string(const ByteRange& r);

// A simulated client process: rank `rank` on node `node`.
struct ClientId {
  std::uint32_t node = 0;
  std::uint32_t rank = 0;

  auto operator<=>(const ClientId&) const = default;
};

std::string to_string(const ClientId& id);
// Parses the "node.rank" spelling produced by to_string.
std::optional<ClientId> parse_client_id(const std::string& text);

}  // namespace scnf

template <>
struct std::hash<scnf::ClientId> {
  std::size_t operator()(const scnf::ClientId& id) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{id.node} << 32) | id.rank);
  }
};
