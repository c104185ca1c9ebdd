#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scnf/interval/global_tree.hpp"
#include "scnf/sim/world.hpp"

namespace scnf::basefs {

// The global server: per-file ownership trees and attach-driven EOF.
//
// Request effects are applied when a request is received, in delivery
// order; the worker pool then accounts the service time before the reply
// leaves. Each client has at most one request in flight, so per-client
// order is preserved.
class Server {
 public:
  Server(sim::World& world, sim::EntityId entity);

  [[nodiscard]] sim::EntityId entity() const { return entity_; }

  void attach(const std::string& path, const std::vector<ByteRange>& ranges, const ClientId& owner);
  // Returns bytes released.
  std::uint64_t detach(const std::string& path, const std::vector<ByteRange>& ranges, const ClientId& owner);
  [[nodiscard]] std::vector<interval::GlobalInterval> query(const std::string& path, const ByteRange& range) const;
  [[nodiscard]] std::vector<interval::GlobalInterval> query_file(const std::string& path) const;
  // One past the highest byte ever attached.
  [[nodiscard]] std::uint64_t attached_eof(const std::string& path) const;
  [[nodiscard]] const interval::GlobalTree* tree(const std::string& path) const;

  // Waits for a worker to process one request.
  sim::Task<void> service();
  [[nodiscard]] const sim::WorkerPool& pool() const { return pool_; }

 private:
  struct FileState {
    interval::GlobalTree tree;
    std::uint64_t eof = 0;
  };

  sim::World& world_;
  sim::EntityId entity_;
  sim::WorkerPool pool_;
  std::map<std::string, FileState> files_;
};

}  // namespace scnf::basefs
