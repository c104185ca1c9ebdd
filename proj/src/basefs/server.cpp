#include "scnf/basefs/server.hpp"

#include <algorithm>

namespace scnf::basefs {

Server::Server(sim::World& world, sim::EntityId entity)
    : world_(world), entity_(entity), pool_("server", entity, world.config().server_workers) {}

void Server::attach(const std::string& path, const std::vector<ByteRange>& ranges, const ClientId& owner) {
  auto& f = files_[path];
  for (const auto& r : ranges) {
    f.tree.insert({r, owner});
    f.eof = std::max(f.eof, r.end + 1);
  }
}

std::uint64_t Server::detach(const std::string& path, const std::vector<ByteRange>& ranges, const ClientId& owner) {
  auto it = files_.find(path);
  if (it == files_.end()) return 0;
  std::uint64_t released = 0;
  for (const auto& r : ranges) released += it->second.tree.remove_if_owner(r, owner);
  return released;
}

std::vector<interval::GlobalInterval> Server::query(const std::string& path, const ByteRange& range) const {
  auto it = files_.find(path);
  if (it == files_.end()) return {};
  return it->second.tree.query(range);
}

std::vector<interval::GlobalInterval> Server::query_file(const std::string& path) const {
  auto it = files_.find(path);
  if (it == files_.end()) return {};
  return it->second.tree.all();
}

std::uint64_t Server::attached_eof(const std::string& path) const {
  auto it = files_.find(path);
  return it == files_.end() ? 0 : it->second.eof;
}

const interval::GlobalTree* Server::tree(const std::string& path) const {
  auto it = files_.find(path);
  return it == files_.end() ? nullptr : &it->second.tree;
}

sim::Task<void> Server::service() {
  const sim::SimTime cost = sim::from_seconds(world_.config().server_service_time);
  world_.charge_busy(entity_, cost);
  co_await world_.until(pool_.dispatch(world_.now(), cost));
}

}  // namespace scnf::basefs
