#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "scnf/common/types.hpp"

namespace scnf::interval {

struct GlobalInterval {
  ByteRange range;
  ClientId owner;

  auto operator<=>(const GlobalInterval&) const = default;
};

// Per-file ownership map kept by the global server.
//
// Invariants: stored intervals are pairwise disjoint, and no two adjacent
// intervals (a.end + 1 == b.start) share an owner. Backed by std::map keyed
// on start offset; since intervals never overlap, the start key alone orders
// them and the max-end augmentation of a general interval tree is redundant.
class GlobalTree {
 public:
  // Remaps every byte of iv.range to iv.owner. Partially covered intervals
  // of other owners are split, fully covered ones dropped, and same-owner
  // neighbours merged.
  void insert(const GlobalInterval& iv);

  // Drops ownership of the bytes in `range` currently held by `owner`.
  // Bytes held by anyone else are untouched. Returns the number of bytes
  // released (0 means the call was a no-op).
  std::uint64_t remove_if_owner(const ByteRange& range, const ClientId& owner);

  // Owned bytes of `range`, clipped, sorted by start. Gaps are omitted.
  [[nodiscard]] std::vector<GlobalInterval> query(const ByteRange& range) const;
  [[nodiscard]] std::vector<GlobalInterval> all() const;

  [[nodiscard]] std::optional<ClientId> owner_at(std::uint64_t offset) const;
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }

 private:
  struct Node {
    std::uint64_t end;
    ClientId owner;
  };
  using Map = std::map<std::uint64_t, Node>;

  // First node whose range may intersect [start, ...].
  Map::iterator first_touching(std::uint64_t start);
  Map::const_iterator first_touching(std::uint64_t start) const;
  void merge_around(Map::iterator it);

  Map nodes_;
};

}  // namespace scnf::interval
