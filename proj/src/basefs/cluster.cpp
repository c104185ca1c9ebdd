#include "scnf/basefs/cluster.hpp"

#include <algorithm>

#include "scnf/common/error.hpp"

namespace scnf::basefs {

Cluster::Cluster(sim::World& world, ClusterOptions options, trace::TraceRecorder* recorder)
    : world_(world),
      options_(options),
      recorder_(recorder),
      server_(world, world.add_entity("server")),
      pfs_(options.store_data) {
  if (options_.nodes == 0 || options_.procs_per_node == 0) {
    throw Error(Errc::InvalidArgument, "cluster needs at least one node and one process per node");
  }
  pfs_device_ = &world_.add_device("pfs", world_.add_entity("pfs"), sim::DeviceKind::Pfs);
  for (std::uint32_t n = 0; n < options_.nodes; ++n) {
    const auto node = std::to_string(n);
    ssd_.push_back(&world_.add_device("ssd" + node, world_.add_entity("ssd" + node), sim::DeviceKind::Ssd));
    mem_.push_back(&world_.add_device("mem" + node, world_.add_entity("mem" + node), sim::DeviceKind::Memory));
  }
  for (std::uint32_t n = 0; n < options_.nodes; ++n) {
    for (std::uint32_t r = 0; r < options_.procs_per_node; ++r) {
      const ClientId id{n, r};
      const auto p = static_cast<model::ProcessId>(clients_.size());
      clients_.push_back(std::make_unique<Client>(*this, id, p, world_.add_entity("client" + to_string(id))));
    }
  }
}

sim::Device& Cluster::buffer_device(std::uint32_t node) {
  return options_.buffer_device == sim::DeviceKind::Memory ? memory(node) : ssd(node);
}

Client& Cluster::client(model::ProcessId p) {
  if (p >= clients_.size()) throw Error(Errc::UnknownEntity, "no process " + std::to_string(p));
  return *clients_[p];
}

Client& Cluster::client(const ClientId& id) { return client(process_of(id)); }

model::ProcessId Cluster::process_of(const ClientId& id) const {
  if (id.node >= options_.nodes || id.rank >= options_.procs_per_node) {
    throw Error(Errc::UnknownEntity, "no client " + to_string(id));
  }
  return id.node * options_.procs_per_node + id.rank;
}

std::uint64_t Cluster::file_size(const std::string& path) const {
  return std::max(server_.attached_eof(path), pfs_.size(path));
}

}  // namespace scnf::basefs
