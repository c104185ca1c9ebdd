#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "scnf/layers/layer.hpp"
#include "scnf/sim/config.hpp"
#include "scnf/sim/world.hpp"
#include "scnf/trace/trace.hpp"

namespace scnf::bench {

enum class Pattern { Contiguous, Strided, Random };
Pattern parse_pattern(const std::string& name);
std::string to_string(Pattern p);

enum class Phase { Write, Read };

// Synthetic N-to-1 workload on one shared file. Writer nodes come first,
// reader nodes after them; every node runs p processes.
struct WorkloadConfig {
  std::uint32_t n_w = 1;
  std::uint32_t n_r = 1;
  std::uint32_t p = 1;
  std::uint32_t m_w = 10;
  std::uint32_t m_r = 10;
  std::uint64_t s = 8192;
  Pattern write_pattern = Pattern::Contiguous;
  Pattern read_pattern = Pattern::Contiguous;
  layers::LayerKind model = layers::LayerKind::Commit;
  std::uint64_t seed = 1;
  // Keep real bytes; benchmarks move sizes only.
  bool store_data = false;
  bool record_trace = true;

  [[nodiscard]] std::uint32_t n() const { return n_w + n_r; }
  // Throws InvalidArgument.
  void validate() const;
};

enum class Shape { CnW, SnW, CcR, CsR };
Shape parse_shape(const std::string& name);
std::string to_string(Shape s);
// The four standard configurations: write-only on all n nodes (contiguous
// or strided), or n/2 writers then n/2 readers (contiguous or strided
// reads). m_w = m_r = 10.
WorkloadConfig shape_config(Shape shape, std::uint32_t n, std::uint32_t p, std::uint64_t s, layers::LayerKind model);

// File offsets of the `index`-th participating process of a phase, in
// access order. Contiguous: one block of m*s bytes per process. Strided:
// slot `index` of every round of P slots. Random: a seeded permutation of
// all P*m slots, dealt out in blocks of m.
std::vector<std::uint64_t> gen_offsets(const WorkloadConfig& config, Phase phase, std::uint32_t index);

struct PhaseResult {
  std::string name;
  std::uint64_t ops = 0;
  std::uint64_t bytes = 0;
  sim::SimTime start = 0;
  sim::SimTime end = 0;
  // Requests received by the global server during the phase, by kind.
  std::map<std::string, std::uint64_t> server_rpcs;
  sim::SimTime server_busy = 0;

  [[nodiscard]] double seconds() const { return sim::to_seconds(end - start); }
  // bytes / (latest completion - phase start), bytes per simulated second.
  [[nodiscard]] double bandwidth() const;
  [[nodiscard]] std::uint64_t server_rpc(const std::string& kind) const;
  [[nodiscard]] std::uint64_t server_rpc_total() const;
};

struct BenchResult {
  std::string workload;
  layers::LayerKind model = layers::LayerKind::Commit;
  std::uint32_t nodes = 0;
  std::uint32_t ppn = 0;
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
  // Workload-specific parameters, in a fixed order.
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<PhaseResult> phases;
  std::vector<std::pair<std::string, sim::Accounting>> accounting;
  sim::SimTime elapsed = 0;
  std::vector<trace::TraceRecord> trace;

  // Throws InvalidArgument for an unknown phase.
  [[nodiscard]] const PhaseResult& phase(const std::string& name) const;
};

// Write phase, barrier, read phase. Writers do m_w writes then commit (or
// session_close); readers do their m_r reads with a query each (commit,
// posix) or inside one session.
BenchResult run_synthetic(const WorkloadConfig& config, const sim::SimConfig& sim = {});

// Checkpoint/restart of a particle code through a partner-copy scheme.
struct ScrConfig {
  std::uint32_t n = 4;
  std::uint32_t p = 12;
  std::uint64_t particles_per_rank = 10'000'000;
  std::uint64_t value_size = 4;
  std::uint32_t arrays = 9;
  layers::LayerKind model = layers::LayerKind::Session;
  std::uint64_t seed = 1;
  bool record_trace = true;

  [[nodiscard]] std::uint64_t array_bytes() const { return particles_per_rank * value_size; }
  [[nodiscard]] std::uint64_t rank_bytes() const { return array_bytes() * arrays; }
};

// Node n-1 is the spare and node 0 fails. Checkpoint: nodes 0..n-2 write
// their arrays into the memory buffer, copy them to the partner node's
// memory, commit, and flush both copies to SSD. Restart: nodes 1..n-2 read
// their checkpoints back from memory. Afterwards the spare receives node
// 0's copy from its partner; that transfer is reported as its own phase and
// is not part of the restart metric. Throws TooFewNodes for n < 3.
BenchResult run_scr(const ScrConfig& config, const sim::SimConfig& sim = {});

enum class Scaling { Strong, Weak };
Scaling parse_scaling(const std::string& name);
std::string to_string(Scaling s);

// Random sample reads of a preloaded training set.
struct DlConfig {
  std::uint32_t n = 1;
  std::uint32_t p = 4;
  std::uint64_t sample_size = 116 * 1024;
  Scaling scaling = Scaling::Strong;
  // Strong scaling: global mini-batch. Weak scaling: samples per process
  // per iteration.
  std::uint32_t batch = 1024;
  std::uint32_t iterations = 8;
  std::uint32_t epochs = 1;
  layers::LayerKind model = layers::LayerKind::Session;
  std::uint64_t seed = 1;
  bool record_trace = true;

  // Samples per global iteration.
  [[nodiscard]] std::uint64_t global_batch() const;
  [[nodiscard]] std::uint64_t dataset_samples() const { return global_batch() * iterations; }
};

// Preload (not measured): each process writes its contiguous share of the
// dataset and releases it. Each epoch then draws a seeded permutation of all
// samples; every iteration hands each process an equal slice of the batch,
// read from whichever process holds it, followed by a barrier. Session
// readers open one session per epoch. Throws InvalidArgument when the
// batch does not divide evenly across processes.
BenchResult run_dl(const DlConfig& config, const sim::SimConfig& sim = {});

// CSV with one row per phase. The header is fixed:
// workload,model,nodes,ppn,size,seed,phase,ops,bytes,seconds,bandwidth_Bps,
// query_rpcs,attach_rpcs,server_rpcs,server_busy_s,params
std::string csv_header();
std::string csv_rows(const BenchResult& result);

// gnuplot script plotting phase bandwidth against node count for each
// model, read from `csv_path`.
std::string plot_script(const std::string& csv_path, const std::string& title, const std::string& phase);

}  // namespace scnf::bench
