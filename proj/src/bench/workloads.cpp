#include "scnf/bench/workloads.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <numeric>
#include <optional>
#include <random>

#include "scnf/basefs/cluster.hpp"
#include "scnf/common/error.hpp"

namespace scnf::bench {

using layers::LayerHandle;
using layers::LayerKind;
using model::ProcessId;
using sim::Task;

Pattern parse_pattern(const std::string& name) {
  if (name == "contiguous") return Pattern::Contiguous;
  if (name == "strided") return Pattern::Strided;
  if (name == "random") return Pattern::Random;
  throw Error(Errc::InvalidArgument, "unknown access pattern '" + name + "' (contiguous, strided, random)");
}

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::Contiguous: return "contiguous";
    case Pattern::Strided: return "strided";
    case Pattern::Random: return "random";
  }
  return "?";
}

Shape parse_shape(const std::string& name) {
  if (name == "cnw" || name == "CN-W") return Shape::CnW;
  if (name == "snw" || name == "SN-W") return Shape::SnW;
  if (name == "ccr" || name == "CC-R") return Shape::CcR;
  if (name == "csr" || name == "CS-R") return Shape::CsR;
  throw Error(Errc::InvalidArgument, "unknown workload shape '" + name + "' (cnw, snw, ccr, csr)");
}

std::string to_string(Shape s) {
  switch (s) {
    case Shape::CnW: return "CN-W";
    case Shape::SnW: return "SN-W";
    case Shape::CcR: return "CC-R";
    case Shape::CsR: return "CS-R";
  }
  return "?";
}

Scaling parse_scaling(const std::string& name) {
  if (name == "strong") return Scaling::Strong;
  if (name == "weak") return Scaling::Weak;
  throw Error(Errc::InvalidArgument, "unknown scaling '" + name + "' (strong, weak)");
}

std::string to_string(Scaling s) { return s == Scaling::Strong ? "strong" : "weak"; }

void WorkloadConfig::validate() const {
  if (n() == 0) throw Error(Errc::InvalidArgument, "workload needs at least one node");
  if (p == 0) throw Error(Errc::InvalidArgument, "workload needs at least one process per node");
  if (s == 0) throw Error(Errc::InvalidArgument, "access size must be at least 1 byte");
}

WorkloadConfig shape_config(Shape shape, std::uint32_t n, std::uint32_t p, std::uint64_t s, LayerKind model) {
  WorkloadConfig c;
  c.p = p;
  c.s = s;
  c.model = model;
  c.m_w = 10;
  c.m_r = 10;
  switch (shape) {
    case Shape::CnW:
    case Shape::SnW:
      c.n_w = n;
      c.n_r = 0;
      c.write_pattern = shape == Shape::CnW ? Pattern::Contiguous : Pattern::Strided;
      break;
    case Shape::CcR:
    case Shape::CsR:
      if (n < 2 || n % 2 != 0) throw Error(Errc::InvalidArgument, to_string(shape) + " needs an even node count");
      c.n_w = n / 2;
      c.n_r = n / 2;
      c.write_pattern = Pattern::Contiguous;
      c.read_pattern = shape == Shape::CcR ? Pattern::Contiguous : Pattern::Strided;
      break;
  }
  return c;
}

std::vector<std::uint64_t> gen_offsets(const WorkloadConfig& c, Phase phase, std::uint32_t index) {
  const bool w = phase == Phase::Write;
  const std::uint64_t procs = static_cast<std::uint64_t>(w ? c.n_w : c.n_r) * c.p;
  const std::uint64_t m = w ? c.m_w : c.m_r;
  const Pattern pattern = w ? c.write_pattern : c.read_pattern;
  if (index >= procs) throw Error(Errc::InvalidArgument, "process index outside the phase");
  std::vector<std::uint64_t> out;
  out.reserve(m);
  switch (pattern) {
    case Pattern::Contiguous:
      for (std::uint64_t k = 0; k < m; ++k) out.push_back((index * m + k) * c.s);
      break;
    case Pattern::Strided:
      for (std::uint64_t k = 0; k < m; ++k) out.push_back((k * procs + index) * c.s);
      break;
    case Pattern::Random: {
      std::vector<std::uint64_t> slots(procs * m);
      std::iota(slots.begin(), slots.end(), 0);
      std::mt19937_64 rng(c.seed * 2 + (w ? 0 : 1));
      std::shuffle(slots.begin(), slots.end(), rng);
      for (std::uint64_t k = 0; k < m; ++k) out.push_back(slots[index * m + k] * c.s);
      break;
    }
  }
  return out;
}

double PhaseResult::bandwidth() const {
  const double t = seconds();
  return t > 0 ? static_cast<double>(bytes) / t : 0.0;
}

std::uint64_t PhaseResult::server_rpc(const std::string& kind) const {
  auto it = server_rpcs.find(kind);
  return it == server_rpcs.end() ? 0 : it->second;
}

std::uint64_t PhaseResult::server_rpc_total() const {
  std::uint64_t n = 0;
  for (const auto& [kind, count] : server_rpcs) n += count;
  return n;
}

const PhaseResult& BenchResult::phase(const std::string& name) const {
  for (const auto& p : phases) {
    if (p.name == name) return p;
  }
  throw Error(Errc::InvalidArgument, "no phase named '" + name + "'");
}

namespace {

// A cluster, one layer per process, a barrier over all processes, and the
// phase bookkeeping shared by every workload.
class Harness {
 public:
  Harness(const sim::SimConfig& sim, basefs::ClusterOptions options, LayerKind kind, bool record,
          std::string first_phase)
      : world_(sim),
        cluster_(world_, options, record ? &recorder_ : nullptr),
        barrier_(world_, cluster_.size()),
        record_(record) {
    for (ProcessId p = 0; p < cluster_.size(); ++p) {
      layers_.push_back(layers::make_layer(kind, cluster_.client(p), record ? &recorder_ : nullptr));
      all_.push_back(p);
    }
    open_phase(std::move(first_phase));
  }

  sim::World& world() { return world_; }
  basefs::Cluster& cluster() { return cluster_; }
  layers::Layer& layer(ProcessId p) { return *layers_.at(p); }
  [[nodiscard]] std::size_t size() const { return cluster_.size(); }

  // A participating process finished its share of the current phase.
  void finish(std::uint64_t ops, std::uint64_t bytes) {
    auto& ph = phases_.back();
    ph.ops += ops;
    ph.bytes += bytes;
    ph.end = std::max(ph.end, world_.now());
  }

  // Every process calls this with the same `next`. The first process past
  // the barrier closes the current phase and opens `next`, if given.
  Task<void> barrier(std::optional<std::string> next) {
    co_await barrier_.arrive_and_wait();
    if (returns_++ % size() == 0) {
      if (record_) recorder_.barrier(all_);
      if (next) {
        close_phase();
        open_phase(std::move(*next));
      }
    }
  }

  BenchResult finish_run(std::string workload, LayerKind model) {
    BenchResult r;
    r.elapsed = world_.run_until_idle();
    close_phase();
    r.workload = std::move(workload);
    r.model = model;
    r.nodes = cluster_.options().nodes;
    r.ppn = cluster_.options().procs_per_node;
    r.phases = std::move(phases_);
    for (sim::EntityId e = 0; e < world_.entity_count(); ++e) {
      r.accounting.emplace_back(world_.entity_name(e), world_.accounting(e));
    }
    r.trace = recorder_.records();
    return r;
  }

 private:
  void open_phase(std::string name) {
    PhaseResult ph;
    ph.name = std::move(name);
    ph.start = ph.end = world_.now();
    const auto& acc = world_.accounting(cluster_.server().entity());
    rpc_mark_ = acc.rpc_recv_by_kind;
    busy_mark_ = acc.busy_time;
    phases_.push_back(std::move(ph));
  }

  void close_phase() {
    auto& ph = phases_.back();
    const auto& acc = world_.accounting(cluster_.server().entity());
    for (const auto& [kind, count] : acc.rpc_recv_by_kind) {
      const auto before = rpc_mark_.count(kind) ? rpc_mark_.at(kind) : 0;
      if (count > before) ph.server_rpcs[kind] = count - before;
    }
    ph.server_busy = acc.busy_time - busy_mark_;
  }

  sim::World world_;
  trace::TraceRecorder recorder_;
  basefs::Cluster cluster_;
  sim::Barrier barrier_;
  bool record_;
  std::vector<std::unique_ptr<layers::Layer>> layers_;
  std::vector<ProcessId> all_;
  std::uint64_t returns_ = 0;
  std::vector<PhaseResult> phases_;
  std::map<std::string, std::uint64_t> rpc_mark_;
  sim::SimTime busy_mark_ = 0;
};

// Release of a file the process wrote: commit, session_close, or nothing.
Task<void> release(layers::Layer& layer, LayerHandle& h) {
  if (layer.kind() == LayerKind::Commit) co_await layer.sync(h, "commit");
  if (layer.kind() == LayerKind::Session) co_await layer.sync(h, "session_close");
}

Task<void> acquire(layers::Layer& layer, LayerHandle& h) {
  if (layer.kind() == LayerKind::Session) co_await layer.sync(h, "session_open");
}

Task<void> end_session(layers::Layer& layer, LayerHandle& h) {
  if (layer.kind() == LayerKind::Session) co_await layer.sync(h, "session_close");
}

std::string num(std::uint64_t v) { return std::to_string(v); }

// Synthetic workloads

constexpr const char* kSharedFile = "shared";

Task<void> synthetic_process(Harness& hx, WorkloadConfig c, ProcessId pid) {
  auto& layer = hx.layer(pid);
  const std::uint32_t writers = c.n_w * c.p;
  const bool has_read_phase = c.n_r > 0;
  if (pid < writers) {
    auto h = co_await layer.open(kSharedFile);
    const std::vector<std::uint8_t> data(c.store_data ? c.s : 0, static_cast<std::uint8_t>(pid % 251 + 1));
    for (auto off : gen_offsets(c, Phase::Write, pid)) {
      if (c.store_data) {
        co_await layer.write(h, off, data);
      } else {
        co_await layer.write_size(h, off, c.s);
      }
    }
    co_await release(layer, h);
    co_await layer.close(h);
    hx.finish(c.m_w, c.m_w * c.s);
  }
  if (!has_read_phase) co_return;
  co_await hx.barrier(std::string("read"));
  if (pid >= writers) {
    auto h = co_await layer.open(kSharedFile);
    co_await acquire(layer, h);
    for (auto off : gen_offsets(c, Phase::Read, pid - writers)) (void)co_await layer.read(h, off, c.s);
    co_await end_session(layer, h);
    co_await layer.close(h);
    hx.finish(c.m_r, c.m_r * c.s);
  }
}

// SCR partner checkpoint/restart

std::string ckpt_file(std::uint32_t node, std::uint32_t local) {
  return "ckpt." + std::to_string(node) + "." + std::to_string(local);
}

Task<void> scr_process(Harness& hx, ScrConfig c, ProcessId pid) {
  auto& world = hx.world();
  auto& cluster = hx.cluster();
  auto& layer = hx.layer(pid);
  auto& self = cluster.client(pid);
  const std::uint32_t node = pid / c.p;
  const std::uint32_t local = pid % c.p;
  const std::uint32_t spare = c.n - 1;
  const std::uint32_t groups = c.n - 1;
  const std::uint64_t ab = c.array_bytes();

  if (node < spare) {
    const std::uint32_t partner = (node + 1) % groups;
    auto& peer = cluster.client(partner * c.p + local);
    auto h = co_await layer.open(ckpt_file(node, local));
    for (std::uint32_t a = 0; a < c.arrays; ++a) {
      co_await layer.write_size(h, a * ab, ab);
      co_await world.rpc(self.entity(), peer.entity(), ab, "partner-copy");
      (void)co_await world.device_io(peer.entity(), cluster.memory(partner), sim::Direction::Write, ab);
    }
    co_await release(layer, h);
    co_await layer.close(h);
    (void)co_await world.device_io(self.entity(), cluster.ssd(node), sim::Direction::Write, c.rank_bytes());
    (void)co_await world.device_io(peer.entity(), cluster.ssd(partner), sim::Direction::Write, c.rank_bytes());
    hx.finish(c.arrays, c.rank_bytes());
  }
  co_await hx.barrier(std::string("restart"));

  if (node >= 1 && node < spare) {
    auto h = co_await layer.open(ckpt_file(node, local));
    co_await acquire(layer, h);
    for (std::uint32_t a = 0; a < c.arrays; ++a) (void)co_await layer.read(h, a * ab, ab);
    co_await end_session(layer, h);
    co_await layer.close(h);
    hx.finish(c.arrays, c.rank_bytes());
  }
  co_await hx.barrier(std::string("spare-transfer"));

  if (node == spare) {
    // Node 0 failed; its partner copy lives on node 1.
    const std::uint32_t holder = 1 % groups;
    auto& peer = cluster.client(holder * c.p + local);
    (void)co_await world.device_io(peer.entity(), cluster.memory(holder), sim::Direction::Read, c.rank_bytes());
    co_await world.rpc(peer.entity(), self.entity(), c.rank_bytes(), "spare-copy");
    (void)co_await world.device_io(self.entity(), cluster.memory(node), sim::Direction::Write, c.rank_bytes());
    hx.finish(1, c.rank_bytes());
  }
}

// Deep-learning sample reads

constexpr const char* kDatasetFile = "dataset";

Task<void> dl_process(Harness& hx, DlConfig c, ProcessId pid) {
  auto& layer = hx.layer(pid);
  const std::uint64_t procs = hx.size();
  const std::uint64_t total = c.dataset_samples();
  const std::uint64_t share = total / procs;
  const std::uint64_t batch = c.global_batch();
  const std::uint64_t per_proc = batch / procs;
  const std::uint64_t s = c.sample_size;

  auto h = co_await layer.open(kDatasetFile);
  for (std::uint64_t k = 0; k < share; ++k) co_await layer.write_size(h, (pid * share + k) * s, s);
  co_await release(layer, h);
  hx.finish(share, share * s);

  std::vector<std::uint64_t> perm(total);
  for (std::uint32_t e = 0; e < c.epochs; ++e) {
    co_await hx.barrier("epoch" + std::to_string(e));
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(c.seed * 1000003 + e);
    std::shuffle(perm.begin(), perm.end(), rng);
    co_await acquire(layer, h);
    for (std::uint32_t t = 0; t < c.iterations; ++t) {
      const std::uint64_t base = t * batch + pid * per_proc;
      for (std::uint64_t k = 0; k < per_proc; ++k) (void)co_await layer.read(h, perm[base + k] * s, s);
      if (t + 1 == c.iterations) {
        co_await end_session(layer, h);
        hx.finish(c.iterations * per_proc, c.iterations * per_proc * s);
      }
      if (t + 1 < c.iterations) co_await hx.barrier(std::nullopt);
    }
  }
  co_await layer.close(h);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

BenchResult run_synthetic(const WorkloadConfig& config, const sim::SimConfig& sim) {
  config.validate();
  basefs::ClusterOptions opt;
  opt.nodes = config.n();
  opt.procs_per_node = config.p;
  opt.store_data = config.store_data;
  Harness hx(sim, opt, config.model, config.record_trace, "write");
  for (ProcessId p = 0; p < hx.size(); ++p) hx.world().spawn("p" + std::to_string(p), synthetic_process(hx, config, p));
  auto r = hx.finish_run("synthetic", config.model);
  r.size = config.s;
  r.seed = config.seed;
  r.params = {{"n_w", num(config.n_w)},
              {"n_r", num(config.n_r)},
              {"m_w", num(config.m_w)},
              {"m_r", num(config.m_r)},
              {"write_pattern", to_string(config.write_pattern)},
              {"read_pattern", to_string(config.read_pattern)}};
  return r;
}

BenchResult run_scr(const ScrConfig& config, const sim::SimConfig& sim) {
  if (config.n < 3) throw Error(Errc::TooFewNodes, "SCR emulation needs at least 3 nodes (one spare)");
  if (config.p == 0 || config.arrays == 0 || config.array_bytes() == 0) {
    throw Error(Errc::InvalidArgument, "SCR emulation needs processes and non-empty arrays");
  }
  basefs::ClusterOptions opt;
  opt.nodes = config.n;
  opt.procs_per_node = config.p;
  opt.store_data = false;
  opt.buffer_device = sim::DeviceKind::Memory;
  Harness hx(sim, opt, config.model, config.record_trace, "checkpoint");
  for (ProcessId p = 0; p < hx.size(); ++p) hx.world().spawn("p" + std::to_string(p), scr_process(hx, config, p));
  auto r = hx.finish_run("scr", config.model);
  r.size = config.array_bytes();
  r.seed = config.seed;
  r.params = {{"particles_per_rank", num(config.particles_per_rank)},
              {"value_size", num(config.value_size)},
              {"arrays", num(config.arrays)}};
  return r;
}

std::uint64_t DlConfig::global_batch() const {
  return scaling == Scaling::Strong ? batch : static_cast<std::uint64_t>(batch) * n * p;
}

BenchResult run_dl(const DlConfig& config, const sim::SimConfig& sim) {
  const std::uint64_t procs = static_cast<std::uint64_t>(config.n) * config.p;
  if (procs == 0 || config.sample_size == 0 || config.iterations == 0 || config.batch == 0) {
    throw Error(Errc::InvalidArgument, "DL emulation needs processes, samples and iterations");
  }
  if (config.global_batch() % procs != 0) {
    throw Error(Errc::InvalidArgument, "mini-batch of " + std::to_string(config.global_batch()) +
                                           " samples does not divide across " + std::to_string(procs) + " processes");
  }
  basefs::ClusterOptions opt;
  opt.nodes = config.n;
  opt.procs_per_node = config.p;
  opt.store_data = false;
  Harness hx(sim, opt, config.model, config.record_trace, "preload");
  for (ProcessId p = 0; p < hx.size(); ++p) hx.world().spawn("p" + std::to_string(p), dl_process(hx, config, p));
  auto r = hx.finish_run("dl", config.model);
  r.size = config.sample_size;
  r.seed = config.seed;
  r.params = {{"scaling", to_string(config.scaling)},
              {"batch", num(config.batch)},
              {"iterations", num(config.iterations)},
              {"epochs", num(config.epochs)}};
  return r;
}

std::string csv_header() {
  return "workload,model,nodes,ppn,size,seed,phase,ops,bytes,seconds,bandwidth_Bps,query_rpcs,attach_rpcs,"
         "server_rpcs,server_busy_s,params\n";
}

std::string csv_rows(const BenchResult& r) {
  std::string params;
  for (const auto& [k, v] : r.params) {
    if (!params.empty()) params += ';';
    params += k + "=" + v;
  }
  std::string out;
  for (const auto& ph : r.phases) {
    out += r.workload + "," + layers::to_string(r.model) + "," + num(r.nodes) + "," + num(r.ppn) + "," + num(r.size) +
           "," + num(r.seed) + "," + ph.name + "," + num(ph.ops) + "," + num(ph.bytes) + "," + fmt(ph.seconds()) + "," +
           fmt(ph.bandwidth()) + "," + num(ph.server_rpc("query")) + "," + num(ph.server_rpc("attach")) + "," +
           num(ph.server_rpc_total()) + "," + fmt(sim::to_seconds(ph.server_busy)) + "," + params + "\n";
  }
  return out;
}

std::string plot_script(const std::string& csv_path, const std::string& title, const std::string& phase) {
  std::string s;
  s += "# gnuplot script: " + phase + " bandwidth against node count, one line per model.\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 800,500\n";
  s += "set output '" + title + ".png'\n";
  s += "set title '" + title + "'\n";
  s += "set xlabel 'nodes'\n";
  s += "set ylabel 'bandwidth (MiB/s)'\n";
  s += "set key top left\n";
  s += "set logscale x 2\n";
  s += "plot for [m in 'posix commit session'] '" + csv_path +
       "' every ::1 using 3:((strcol(2) eq m && strcol(7) eq '" + phase +
       "') ? $11/1048576 : 1/0) with linespoints title m\n";
  return s;
}

}  // namespace scnf::bench
