#include "scnf/sim/world.hpp"

#include <algorithm>

#include "scnf/common/error.hpp"

namespace scnf::sim {

SimTime FifoResource::reserve(SimTime now, SimTime duration) {
  const SimTime start = std::max(now, free_at_);
  free_at_ = start + duration;
  busy_ += duration;
  ++requests_;
  return free_at_;
}

SimTime Device::cost(Direction dir, std::uint64_t bytes) const {
  return op_latency_ + transfer_time(bytes, dir == Direction::Read ? read_bw_ : write_bw_);
}

WorkerPool::WorkerPool(const std::string& name, EntityId charge_to, std::uint32_t workers) {
  if (workers == 0) throw Error(Errc::Config, "worker pool needs at least one worker");
  for (std::uint32_t i = 0; i < workers; ++i) workers_.emplace_back(name + ".w" + std::to_string(i), charge_to);
}

SimTime WorkerPool::dispatch(SimTime now, SimTime service) {
  auto& w = workers_[next_];
  next_ = (next_ + 1) % workers_.size();
  return w.reserve(now, service);
}

void WakeAt::await_suspend(std::coroutine_handle<> h) const { world->schedule(at, h); }

World::World(SimConfig config) : config_(config) { config_.validate(); }

EntityId World::add_entity(std::string name) {
  names_.push_back(std::move(name));
  accounts_.emplace_back();
  return static_cast<EntityId>(names_.size() - 1);
}

void World::check_entity(EntityId id) const {
  if (id >= names_.size()) throw Error(Errc::UnknownEntity, "entity " + std::to_string(id) + " is not registered");
}

const std::string& World::entity_name(EntityId id) const {
  check_entity(id);
  return names_[id];
}

const Accounting& World::accounting(EntityId id) const {
  check_entity(id);
  return accounts_[id];
}

Accounting& World::accounting_mut(EntityId id) {
  check_entity(id);
  return accounts_[id];
}

Device& World::add_device(std::string name, EntityId charge_to, DeviceKind kind) {
  check_entity(charge_to);
  const SimTime lat = from_seconds(config_.ssd_op_latency);
  switch (kind) {
    case DeviceKind::Ssd:
      return devices_.emplace_back(std::move(name), charge_to, kind, config_.ssd_read_bw, config_.ssd_write_bw, lat);
    case DeviceKind::Pfs:
      return devices_.emplace_back(std::move(name), charge_to, kind, config_.pfs_read_bw, config_.pfs_write_bw, lat);
    case DeviceKind::Memory:
      return devices_.emplace_back(std::move(name), charge_to, kind, config_.mem_bw, config_.mem_bw, lat);
  }
  throw Error(Errc::InvalidArgument, "unknown device kind");
}

void World::spawn(std::string name, Task<void> task) {
  auto h = task.handle();
  roots_.push_back(Root{std::move(name), std::move(task)});
  schedule(now_, h);
}

void World::schedule(SimTime at, std::coroutine_handle<> h) {
  queue_.push(Event{std::max(at, now_), seq_++, h});
}

SimTime World::send_rpc(EntityId from, EntityId to, std::uint64_t payload_bytes, const std::string& kind) {
  check_entity(from);
  check_entity(to);
  accounts_[from].rpc_sent++;
  accounts_[to].rpc_recv++;
  if (!kind.empty()) accounts_[to].rpc_recv_by_kind[kind]++;
  return now_ + from_seconds(config_.rpc_latency) +
         from_seconds(static_cast<double>(payload_bytes) * config_.rpc_per_byte);
}

Task<SimTime> World::device_io(EntityId who, Device& device, Direction dir, std::uint64_t bytes) {
  check_entity(who);
  if (bytes == 0) throw Error(Errc::InvalidArgument, "device request of zero bytes");
  if (device.kind() == DeviceKind::Ssd) {
    if (dir == Direction::Read) {
      accounts_[who].bytes_read_ssd += bytes;
    } else {
      accounts_[who].bytes_written_ssd += bytes;
    }
  }
  const SimTime start = now_;
  const SimTime cost = device.cost(dir, bytes);
  accounts_[device.charge_to()].busy_time += cost;
  co_await until(device.reserve(now_, cost));
  co_return now_ - start;
}

void World::record_c2c(EntityId owner, EntityId reader, std::uint64_t bytes) {
  check_entity(owner);
  check_entity(reader);
  accounts_[owner].bytes_client_to_client += bytes;
  c2c_sent_[{owner, reader}] += bytes;
}

void World::record_owner_read(EntityId reader, EntityId owner, std::uint64_t bytes) {
  check_entity(owner);
  check_entity(reader);
  owner_reads_[{owner, reader}] += bytes;
}

SimTime World::run_until_idle() {
  while (!queue_.empty()) {
    const Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ++events_;
    ev.handle.resume();
  }
  for (auto& r : roots_) {
    if (r.task.done()) r.task.result();
  }
  std::string stuck;
  for (const auto& r : roots_) {
    if (!r.task.done()) stuck += (stuck.empty() ? "" : ", ") + r.name;
  }
  if (!stuck.empty()) throw Error(Errc::Deadlock, "processes still waiting with no pending events: " + stuck);
  return now_;
}

void Signal::fire() {
  if (fired_) return;
  fired_ = true;
  for (auto h : waiters_) world_->schedule(world_->now(), h);
  waiters_.clear();
}

bool Barrier::Awaiter::await_suspend(std::coroutine_handle<> h) {
  if (b->waiting_.size() + 1 < b->participants_) {
    b->waiting_.push_back(h);
    return true;
  }
  for (auto w : b->waiting_) b->world_->schedule(b->world_->now(), w);
  b->waiting_.clear();
  return false;
}

}  // namespace scnf::sim
