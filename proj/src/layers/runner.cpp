#include "scnf/layers/runner.hpp"

#include <map>
#include <memory>
#include <set>

#include "scnf/basefs/cluster.hpp"
#include "scnf/common/error.hpp"

namespace scnf::layers {

using model::OpKind;
using model::Program;
using model::ProgramOp;
using model::StmtRef;

model::Program with_epilogue(const model::Program& program, LayerKind kind) {
  Program out = program;
  std::map<std::string, std::uint64_t> extent;
  for (const auto& proc : program.processes) {
    for (const auto& st : proc) {
      if (st.kind == OpKind::Write) extent[st.file] = std::max(extent[st.file], st.offset + st.size);
    }
  }
  for (auto& proc : out.processes) {
    std::set<std::string> written;
    for (const auto& st : proc) {
      if (st.kind == OpKind::Write) written.insert(st.file);
    }
    for (const auto& f : written) {
      if (kind == LayerKind::Commit) proc.push_back(ProgramOp::sync("commit", f));
      if (kind == LayerKind::Session) proc.push_back(ProgramOp::sync("session_close", f));
    }
  }
  std::vector<ProgramOp> observer;
  for (const auto& [f, size] : extent) {
    if (kind == LayerKind::Session) observer.push_back(ProgramOp::sync("session_open", f));
    observer.push_back(ProgramOp::read(f, 0, size));
  }
  if (observer.empty()) return out;
  const auto obs = static_cast<std::uint32_t>(out.processes.size());
  for (std::uint32_t p = 0; p < obs; ++p) {
    if (!out.processes[p].empty()) {
      out.so.push_back({{p, static_cast<std::uint32_t>(out.processes[p].size() - 1)}, {obs, 0}});
    }
  }
  out.processes.push_back(std::move(observer));
  return out;
}

namespace {

class Run {
 public:
  Run(const Program& original, Program program, LayerKind kind, const sim::SimConfig& config)
      : original_(original),
        program_(std::move(program)),
        world_(config),
        cluster_(world_, {static_cast<std::uint32_t>(program_.processes.size()), 1, true}, &recorder_) {
    for (std::uint32_t p = 0; p < program_.processes.size(); ++p) {
      layers_.push_back(make_layer(kind, cluster_.client(p), &recorder_));
    }
    for (const auto& e : program_.so) {
      waits_[e.to].push_back(e.from);
      if (!done_.count(e.from)) done_.emplace(e.from, std::make_unique<sim::Signal>(world_));
    }
    // Read slots of the original program, process-major.
    std::size_t slot = 0;
    for (std::uint32_t p = 0; p < original_.processes.size(); ++p) {
      for (std::uint32_t i = 0; i < original_.processes[p].size(); ++i) {
        if (original_.processes[p][i].kind == OpKind::Read) slots_[{p, i}] = slot++;
      }
    }
    outcome_.reads.resize(slot);
    for (const auto& proc : original_.processes) {
      for (const auto& st : proc) outcome_.files.try_emplace(st.file);
    }
  }

  ProgramRun execute() {
    for (std::uint32_t p = 0; p < program_.processes.size(); ++p) {
      world_.spawn("p" + std::to_string(p), process(p));
    }
    ProgramRun out;
    out.end = world_.run_until_idle();
    out.outcome = std::move(outcome_);
    out.trace = recorder_.records();
    return out;
  }

 private:
  sim::Task<void> process(std::uint32_t p) {
    Layer& layer = *layers_[p];
    std::map<std::string, LayerHandle> handles;
    const bool observer = p >= original_.processes.size();
    for (std::uint32_t i = 0; i < program_.processes[p].size(); ++i) {
      const StmtRef self{p, i};
      if (auto w = waits_.find(self); w != waits_.end()) {
        for (const auto& from : w->second) {
          co_await done_.at(from)->wait();
          recorder_.add_pending(p, op_ids_.at(from));
        }
      }
      const ProgramOp& st = program_.processes[p][i];
      auto h = handles.find(st.file);
      if (h == handles.end()) h = handles.emplace(st.file, co_await layer.open(st.file)).first;
      if (st.kind == OpKind::Write) {
        const std::vector<std::uint8_t> data(st.size, st.value);
        co_await layer.write(h->second, st.offset, data);
      } else if (st.kind == OpKind::Read) {
        auto r = co_await layer.read(h->second, st.offset, st.size);
        if (r.bytes.empty()) r.bytes.assign(st.size, 0);
        if (observer) {
          outcome_.files[st.file] = std::move(r.bytes);
        } else {
          outcome_.reads[slots_.at(self)] = std::move(r.bytes);
        }
      } else {
        co_await layer.sync(h->second, st.sync_name);
      }
      op_ids_[self] = *layer.last_op();
      if (auto d = done_.find(self); d != done_.end()) d->second->fire();
    }
  }

  const Program& original_;
  Program program_;
  sim::World world_;
  trace::TraceRecorder recorder_;
  basefs::Cluster cluster_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::map<StmtRef, std::vector<StmtRef>> waits_;
  std::map<StmtRef, std::unique_ptr<sim::Signal>> done_;
  std::map<StmtRef, std::uint64_t> op_ids_;
  std::map<StmtRef, std::size_t> slots_;
  model::Outcome outcome_;
};

}  // namespace

ProgramRun run_program(const model::Program& program, LayerKind kind, const sim::SimConfig& config) {
  (void)model::to_trace(program);  // validates so edges
  Run run(program, with_epilogue(program, kind), kind, config);
  return run.execute();
}

model::Program program_from_trace(const std::vector<trace::TraceRecord>& records) {
  std::map<model::ProcessId, std::uint32_t> dense;
  for (const auto& r : records) {
    if (r.kind != trace::RecordKind::Edge && r.kind != trace::RecordKind::Primitive) dense.emplace(r.process, 0);
  }
  std::uint32_t next = 0;
  for (auto& [proc, idx] : dense) idx = next++;

  Program out;
  out.processes.resize(dense.size());
  std::map<std::uint64_t, StmtRef> where;
  std::uint32_t writes = 0;
  for (const auto& r : records) {
    if (r.kind == trace::RecordKind::Edge || r.kind == trace::RecordKind::Primitive) continue;
    const auto p = dense.at(r.process);
    auto& proc = out.processes[p];
    where[r.seq] = {p, static_cast<std::uint32_t>(proc.size())};
    if (r.kind == trace::RecordKind::Write) {
      proc.push_back(ProgramOp::write(r.file, r.offset, r.size, static_cast<std::uint8_t>(writes++ % 255 + 1)));
    } else if (r.kind == trace::RecordKind::Read) {
      proc.push_back(ProgramOp::read(r.file, r.offset, r.size));
    } else {
      proc.push_back(ProgramOp::sync(r.name, r.file));
    }
  }
  for (const auto& r : records) {
    if (r.kind != trace::RecordKind::Edge) continue;
    auto from = where.find(r.from);
    auto to = where.find(r.to);
    if (from == where.end() || to == where.end()) {
      throw Error(Errc::ParseError, "so edge references missing op " +
                                        std::to_string(from == where.end() ? r.from : r.to));
    }
    out.so.push_back({from->second, to->second});
  }
  return out;
}

}  // namespace scnf::layers
