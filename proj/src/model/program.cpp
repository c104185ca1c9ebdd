#include "scnf/model/program.hpp"

#include <functional>
#include <unordered_set>

namespace scnf::model {

ProgramOp ProgramOp::write(std::string file, std::uint64_t offset, std::uint64_t size, std::uint8_t value) {
  ProgramOp op;
  op.kind = OpKind::Write;
  op.file = std::move(file);
  op.offset = offset;
  op.size = size;
  op.value = value;
  return op;
}

ProgramOp ProgramOp::read(std::string file, std::uint64_t offset, std::uint64_t size) {
  ProgramOp op;
  op.kind = OpKind::Read;
  op.file = std::move(file);
  op.offset = offset;
  op.size = size;
  return op;
}

ProgramOp ProgramOp::sync(std::string name, std::string file) {
  ProgramOp op;
  op.kind = OpKind::Sync;
  op.file = std::move(file);
  op.sync_name = std::move(name);
  return op;
}

std::size_t Program::op_count() const {
  std::size_t n = 0;
  for (const auto& p : processes) n += p.size();
  return n;
}

OpId Program::op_id(StmtRef ref) const {
  OpId id = 0;
  for (std::uint32_t p = 0; p < ref.process; ++p) id += processes[p].size();
  return id + ref.index;
}

ExecutionTrace to_trace(const Program& program) {
  std::vector<StorageOp> ops;
  OpId id = 0;
  for (std::uint32_t p = 0; p < program.processes.size(); ++p) {
    for (const auto& st : program.processes[p]) {
      StorageOp op;
      op.id = id++;
      op.process = p;
      op.kind = st.kind;
      op.file = st.file;
      if (st.kind == OpKind::Sync) {
        op.sync_name = st.sync_name;
      } else {
        op.range = ByteRange::from_offset_size(st.offset, st.size);
      }
      ops.push_back(std::move(op));
    }
  }
  std::vector<SoEdge> so;
  for (const auto& e : program.so) so.push_back({program.op_id(e.from), program.op_id(e.to)});
  return ExecutionTrace(std::move(ops), std::move(so));
}

std::string to_string(const Outcome& outcome) {
  std::string out = "reads{";
  for (std::size_t i = 0; i < outcome.reads.size(); ++i) {
    if (i) out += " ";
    for (std::size_t b = 0; b < outcome.reads[i].size(); ++b) {
      if (b) out += ",";
      out += std::to_string(outcome.reads[i][b]);
    }
  }
  out += "} files{";
  for (const auto& [name, bytes] : outcome.files) {
    out += name + ":";
    for (auto b : bytes) out += std::to_string(b) + ".";
    out += " ";
  }
  return out + "}";
}

namespace {

struct State {
  std::vector<std::uint32_t> pos;
  std::map<std::string, std::vector<std::uint8_t>> files;
  std::vector<std::vector<std::uint8_t>> reads;
};

std::string key_of(const State& s) {
  std::string k;
  for (auto p : s.pos) k.push_back(static_cast<char>(p));
  k.push_back('|');
  for (const auto& [name, bytes] : s.files) {
    k += name;
    k.push_back(':');
    k.append(bytes.begin(), bytes.end());
    k.push_back('|');
  }
  for (const auto& r : s.reads) {
    k.push_back(static_cast<char>(r.size()));
    k.append(r.begin(), r.end());
  }
  return k;
}

}  // namespace

std::set<Outcome> enumerate_sc_results(const Program& program) {
  if (program.processes.size() > kMaxOracleProcesses) {
    throw Error(Errc::TooLarge, "SC enumeration is limited to 4 processes");
  }
  for (const auto& p : program.processes) {
    if (p.size() > kMaxOracleOpsPerProcess) throw Error(Errc::TooLarge, "SC enumeration is limited to 8 ops per process");
  }
  (void)to_trace(program);  // validates so edges and acyclicity

  const std::size_t nproc = program.processes.size();
  // Read slot of every read statement, process-major.
  std::vector<std::vector<int>> slot(nproc);
  int reads = 0;
  for (std::size_t p = 0; p < nproc; ++p) {
    for (const auto& st : program.processes[p]) slot[p].push_back(st.kind == OpKind::Read ? reads++ : -1);
  }
  // Incoming so edges per statement.
  std::map<StmtRef, std::vector<StmtRef>> waits;
  for (const auto& e : program.so) waits[e.to].push_back(e.from);

  std::set<Outcome> results;
  std::unordered_set<std::string> seen;
  State init;
  init.pos.assign(nproc, 0);
  init.reads.resize(reads);
  for (const auto& p : program.processes) {
    for (const auto& st : p) init.files.try_emplace(st.file);
  }

  std::function<void(State&)> dfs = [&](State& s) {
    if (!seen.insert(key_of(s)).second) return;
    bool done = true;
    for (std::uint32_t p = 0; p < nproc; ++p) {
      const std::uint32_t i = s.pos[p];
      if (i >= program.processes[p].size()) continue;
      done = false;
      if (auto w = waits.find(StmtRef{p, i}); w != waits.end()) {
        bool ready = true;
        for (const auto& from : w->second) ready = ready && s.pos[from.process] > from.index;
        if (!ready) continue;
      }
      const ProgramOp& st = program.processes[p][i];
      State next = s;
      next.pos[p] = i + 1;
      auto& bytes = next.files[st.file];
      if (st.kind == OpKind::Write) {
        if (bytes.size() < st.offset + st.size) bytes.resize(st.offset + st.size, 0);
        std::fill_n(bytes.begin() + static_cast<std::ptrdiff_t>(st.offset), st.size, st.value);
      } else if (st.kind == OpKind::Read) {
        auto& out = next.reads[slot[p][i]];
        out.assign(st.size, 0);
        for (std::uint64_t b = 0; b < st.size; ++b) {
          if (st.offset + b < bytes.size()) out[b] = bytes[st.offset + b];
        }
      }
      dfs(next);
    }
    if (done) results.insert(Outcome{s.reads, s.files});
  };
  dfs(init);
  return results;
}

}  // namespace scnf::model
