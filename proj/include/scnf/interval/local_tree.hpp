#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "scnf/common/types.hpp"

namespace scnf::interval {

// One buffered write: file bytes `file` live at `buffer` in the client's
// burst-buffer file. Both ranges have the same length.
struct LocalInterval {
  ByteRange file;
  ByteRange buffer;
  bool attached = false;

  auto operator<=>(const LocalInterval&) const = default;
};

// Per-client, per-file map of locally buffered writes.
//
// Invariants: file ranges are pairwise disjoint; no two neighbours are
// contiguous in both file and buffer coordinates with equal attached flags
// (those are always merged).
class LocalTree {
 public:
  // Records a write of `file` bytes stored at `buffer`. Newer writes replace
  // older mappings byte for byte; the new interval starts unattached.
  void insert_write(const ByteRange& file, const ByteRange& buffer);

  // Clipped mappings for the written bytes of `range`, sorted by file offset.
  [[nodiscard]] std::vector<LocalInterval> lookup(const ByteRange& range) const;
  [[nodiscard]] std::vector<LocalInterval> all() const;

  // Throws UnwrittenBytes if any byte of `range` was never written and
  // AlreadyAttached if every byte of it is attached already.
  void mark_attached(const ByteRange& range);
  // Marks every unattached interval attached and returns the file ranges
  // that changed, merged and sorted.
  std::vector<ByteRange> mark_all_attached();
  // Clears the attached flag on the bytes of `range`. Returns bytes changed.
  std::uint64_t clear_attached(const ByteRange& range);
  std::vector<ByteRange> clear_all_attached();
  // Drops every unattached interval.
  void discard_unattached();
  // Forgets the bytes of `range` entirely. Returns bytes removed.
  std::uint64_t erase(const ByteRange& range);

  [[nodiscard]] bool fully_written(const ByteRange& range) const;
  [[nodiscard]] bool fully_attached(const ByteRange& range) const;
  [[nodiscard]] bool any_attached(const ByteRange& range) const;
  [[nodiscard]] bool has_unattached() const;
  [[nodiscard]] bool has_attached() const;
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }

 private:
  struct Node {
    std::uint64_t file_end;
    std::uint64_t buffer_start;
    bool attached;
  };
  using Map = std::map<std::uint64_t, Node>;

  Map::iterator first_touching(std::uint64_t start);
  Map::const_iterator first_touching(std::uint64_t start) const;
  // Ensures no node straddles `offset` (a node boundary starts there).
  void split_at(std::uint64_t offset);
  void merge_around(Map::iterator it);
  void normalize();
  std::vector<ByteRange> set_attached(const ByteRange& range, bool value);

  Map nodes_;
};

}  // namespace scnf::interval
