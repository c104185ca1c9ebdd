#pragma once

#include <memory>
#include <vector>

#include "scnf/basefs/client.hpp"
#include "scnf/basefs/pfs.hpp"
#include "scnf/basefs/server.hpp"
#include "scnf/sim/world.hpp"
#include "scnf/trace/trace.hpp"

namespace scnf::basefs {

struct ClusterOptions {
  std::uint32_t nodes = 1;
  std::uint32_t procs_per_node = 1;
  // Keep actual bytes in buffers and on the PFS. Large benchmarks turn this
  // off and move sizes only.
  bool store_data = true;
  // Device holding each client's burst buffer.
  sim::DeviceKind buffer_device = sim::DeviceKind::Ssd;
};

// One BaseFS deployment inside a world: the global server, the PFS, and
// nodes × procs_per_node clients. Process p runs on node p / procs_per_node.
class Cluster {
 public:
  Cluster(sim::World& world, ClusterOptions options, trace::TraceRecorder* recorder = nullptr);
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  [[nodiscard]] sim::World& world() { return world_; }
  [[nodiscard]] const ClusterOptions& options() const { return options_; }
  [[nodiscard]] Server& server() { return server_; }
  [[nodiscard]] const Server& server() const { return server_; }
  [[nodiscard]] PfsStore& pfs() { return pfs_; }
  [[nodiscard]] sim::Device& pfs_device() { return *pfs_device_; }
  [[nodiscard]] sim::Device& ssd(std::uint32_t node) { return *ssd_.at(node); }
  [[nodiscard]] sim::Device& memory(std::uint32_t node) { return *mem_.at(node); }
  [[nodiscard]] sim::Device& buffer_device(std::uint32_t node);
  [[nodiscard]] trace::TraceRecorder* recorder() { return recorder_; }

  [[nodiscard]] std::size_t size() const { return clients_.size(); }
  Client& client(model::ProcessId p);
  Client& client(const ClientId& id);
  [[nodiscard]] model::ProcessId process_of(const ClientId& id) const;

  // Current end of file: highest attached or flushed byte + 1.
  [[nodiscard]] std::uint64_t file_size(const std::string& path) const;

 private:
  sim::World& world_;
  ClusterOptions options_;
  trace::TraceRecorder* recorder_;
  Server server_;
  PfsStore pfs_;
  sim::Device* pfs_device_;
  std::vector<sim::Device*> ssd_;
  std::vector<sim::Device*> mem_;
  std::vector<std::unique_ptr<Client>> clients_;
};

}  // namespace scnf::basefs
