#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scnf/common/types.hpp"

namespace scnf::model {

using ProcessId = std::uint32_t;
using OpId = std::uint64_t;

enum class OpKind { Read, Write, Sync };

// A data or synchronization storage operation. Data ops carry a range;
// sync ops carry the model-specific operation name. Both name the file that
// serves as their synchronization object.
struct StorageOp {
  OpId id = 0;
  ProcessId process = 0;
  OpKind kind = OpKind::Read;
  std::string file;
  std::optional<ByteRange> range;
  std::string sync_name;

  [[nodiscard]] bool is_data() const noexcept { return kind != OpKind::Sync; }
  bool operator==(const StorageOp&) const = default;
};

struct SoEdge {
  OpId from = 0;
  OpId to = 0;
  bool operator==(const SoEdge&) const = default;
};

// Operations plus program order and synchronization order.
//
// Ops are stored sorted by id; program order is the id order among the ops
// of one process. Construction validates that so endpoints exist, that so
// only links distinct processes, and that po ∪ so is acyclic.
class ExecutionTrace {
 public:
  ExecutionTrace() = default;
  ExecutionTrace(std::vector<StorageOp> ops, std::vector<SoEdge> so);

  [[nodiscard]] const std::vector<StorageOp>& ops() const noexcept { return ops_; }
  [[nodiscard]] const std::vector<SoEdge>& so() const noexcept { return so_; }
  [[nodiscard]] std::size_t size() const noexcept { return ops_.size(); }
  [[nodiscard]] const StorageOp& op(std::size_t index) const { return ops_[index]; }
  [[nodiscard]] std::size_t index_of(OpId id) const;

  // Index of the next op of the same process, if any.
  [[nodiscard]] std::optional<std::size_t> po_next(std::size_t index) const;
  // Successor lists (immediate po successor plus outgoing so) by index.
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& successors() const noexcept { return succ_; }
  // Position of op within its process (0-based).
  [[nodiscard]] std::size_t po_position(std::size_t index) const { return po_pos_[index]; }

  // Returns a copy with extra so edges (validated like the constructor).
  [[nodiscard]] ExecutionTrace with_edges(const std::vector<SoEdge>& extra) const;

 private:
  std::vector<StorageOp> ops_;
  std::vector<SoEdge> so_;
  std::unordered_map<OpId, std::size_t> index_;
  std::vector<std::optional<std::size_t>> po_next_;
  std::vector<std::size_t> po_pos_;
  std::vector<std::vector<std::size_t>> succ_;
};

// Transitive closure of po ∪ so as a dense reachability matrix.
class HbRelation {
 public:
  explicit HbRelation(const ExecutionTrace& trace);

  // True iff a happens before b. Irreflexive.
  [[nodiscard]] bool before(std::size_t a, std::size_t b) const {
    return (rows_[a * words_ + (b >> 6)] >> (b & 63)) & 1U;
  }
  [[nodiscard]] std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> rows_;
};

}  // namespace scnf::model
