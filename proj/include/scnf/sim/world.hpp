#pragma once

#include <coroutine>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "scnf/sim/config.hpp"
#include "scnf/sim/task.hpp"
#include "scnf/sim/time.hpp"

namespace scnf::sim {

using EntityId = std::uint32_t;

enum class DeviceKind { Ssd, Pfs, Memory };
enum class Direction { Read, Write };

struct Accounting {
  std::uint64_t rpc_sent = 0;
  std::uint64_t rpc_recv = 0;
  std::uint64_t bytes_written_ssd = 0;
  std::uint64_t bytes_read_ssd = 0;
  std::uint64_t bytes_client_to_client = 0;
  SimTime busy_time = 0;
  // Received RPCs by request kind ("attach", "query", ...).
  std::map<std::string, std::uint64_t> rpc_recv_by_kind;

  bool operator==(const Accounting&) const = default;
};

// A server of requests in arrival order. Requests that arrive while it is
// busy queue behind the current one; its busy time is charged to `charge_to`.
class FifoResource {
 public:
  FifoResource(std::string name, EntityId charge_to) : name_(std::move(name)), charge_to_(charge_to) {}

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] EntityId charge_to() const { return charge_to_; }
  [[nodiscard]] SimTime busy_time() const { return busy_; }
  [[nodiscard]] SimTime free_at() const { return free_at_; }
  [[nodiscard]] std::uint64_t requests() const { return requests_; }

  // Books `duration` of service starting no earlier than `now`; returns the
  // completion time.
  SimTime reserve(SimTime now, SimTime duration);

 private:
  std::string name_;
  EntityId charge_to_;
  SimTime free_at_ = 0;
  SimTime busy_ = 0;
  std::uint64_t requests_ = 0;
};

class Device : public FifoResource {
 public:
  Device(std::string name, EntityId charge_to, DeviceKind kind, double read_bw, double write_bw, SimTime op_latency)
      : FifoResource(std::move(name), charge_to),
        kind_(kind),
        read_bw_(read_bw),
        write_bw_(write_bw),
        op_latency_(op_latency) {}

  [[nodiscard]] DeviceKind kind() const { return kind_; }
  // Service time of one request: op latency plus bytes at the direction's
  // bandwidth.
  [[nodiscard]] SimTime cost(Direction dir, std::uint64_t bytes) const;

 private:
  DeviceKind kind_;
  double read_bw_;
  double write_bw_;
  SimTime op_latency_;
};

// Round-robin pool of FIFO workers.
class WorkerPool {
 public:
  WorkerPool(const std::string& name, EntityId charge_to, std::uint32_t workers);
  // Hands the request to the next worker; returns its completion time.
  SimTime dispatch(SimTime now, SimTime service);
  [[nodiscard]] const std::vector<FifoResource>& workers() const { return workers_; }

 private:
  std::vector<FifoResource> workers_;
  std::size_t next_ = 0;
};

class World;

struct WakeAt {
  World* world;
  SimTime at;
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) const;
  void await_resume() const noexcept {}
};

// Deterministic discrete-event loop. Simulated processes are coroutines
// spawned into the world; they advance time by awaiting delays, device I/O
// and message delivery. Ties are broken by scheduling order.
class World {
 public:
  explicit World(SimConfig config = {});
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  [[nodiscard]] const SimConfig& config() const { return config_; }
  [[nodiscard]] SimTime now() const { return now_; }

  EntityId add_entity(std::string name);
  [[nodiscard]] std::size_t entity_count() const { return names_.size(); }
  [[nodiscard]] const std::string& entity_name(EntityId id) const;
  [[nodiscard]] const Accounting& accounting(EntityId id) const;
  Accounting& accounting_mut(EntityId id);

  Device& add_device(std::string name, EntityId charge_to, DeviceKind kind);

  // Starts `task` at the current time as a top-level simulated process.
  void spawn(std::string name, Task<void> task);

  // Resumes `h` at time `at` (clamped to now).
  void schedule(SimTime at, std::coroutine_handle<> h);

  WakeAt delay(SimTime dt) { return WakeAt{this, now_ + dt}; }
  WakeAt until(SimTime at) { return WakeAt{this, at}; }

  // Accounts one message and returns its delivery time:
  // now + rpc_latency + payload_bytes * rpc_per_byte.
  SimTime send_rpc(EntityId from, EntityId to, std::uint64_t payload_bytes, const std::string& kind = {});
  // send_rpc, then wait for delivery.
  WakeAt rpc(EntityId from, EntityId to, std::uint64_t payload_bytes, const std::string& kind = {}) {
    return until(send_rpc(from, to, payload_bytes, kind));
  }

  // Queues a request on `device` for `who`, waits for it, returns the
  // elapsed time including queueing.
  Task<SimTime> device_io(EntityId who, Device& device, Direction dir, std::uint64_t bytes);

  // Data served by `owner` to `reader` from owner-side storage.
  void record_c2c(EntityId owner, EntityId reader, std::uint64_t bytes);
  // Data received by `reader` from `owner`.
  void record_owner_read(EntityId reader, EntityId owner, std::uint64_t bytes);
  [[nodiscard]] const std::map<std::pair<EntityId, EntityId>, std::uint64_t>& c2c_sent() const { return c2c_sent_; }
  [[nodiscard]] const std::map<std::pair<EntityId, EntityId>, std::uint64_t>& owner_reads() const {
    return owner_reads_;
  }

  void charge_busy(EntityId id, SimTime dt) { accounting_mut(id).busy_time += dt; }

  // Drains all events and returns the final clock. Rethrows the first
  // failure of a spawned process; throws Deadlock if any spawned process is
  // still waiting once the queue is empty.
  SimTime run_until_idle();

  [[nodiscard]] std::uint64_t events_processed() const { return events_; }

 private:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    std::coroutine_handle<> handle;
    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };
  struct Root {
    std::string name;
    Task<void> task;
  };

  void check_entity(EntityId id) const;

  SimConfig config_;
  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t events_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::vector<std::string> names_;
  std::vector<Accounting> accounts_;
  std::deque<Device> devices_;
  std::vector<Root> roots_;
  std::map<std::pair<EntityId, EntityId>, std::uint64_t> c2c_sent_;
  std::map<std::pair<EntityId, EntityId>, std::uint64_t> owner_reads_;
};

// One-shot event: waiters block until fire(), later waiters pass through.
class Signal {
 public:
  explicit Signal(World& world) : world_(&world) {}
  void fire();
  [[nodiscard]] bool fired() const { return fired_; }

  struct Awaiter {
    Signal* s;
    bool await_ready() const noexcept { return s->fired_; }
    void await_suspend(std::coroutine_handle<> h) { s->waiters_.push_back(h); }
    void await_resume() const noexcept {}
  };
  Awaiter wait() { return Awaiter{this}; }

 private:
  World* world_;
  bool fired_ = false;
  std::vector<std::coroutine_handle<>> waiters_;
};

// Reusable barrier for a fixed number of participants.
class Barrier {
 public:
  Barrier(World& world, std::size_t participants) : world_(&world), participants_(participants) {}

  struct Awaiter {
    Barrier* b;
    bool await_ready() const noexcept { return false; }
    bool await_suspend(std::coroutine_handle<> h);
    void await_resume() const noexcept {}
  };
  Awaiter arrive_and_wait() { return Awaiter{this}; }

 private:
  World* world_;
  std::size_t participants_;
  std::vector<std::coroutine_handle<>> waiting_;
};

}  // namespace scnf::sim
