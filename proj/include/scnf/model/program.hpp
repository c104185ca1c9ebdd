#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scnf/model/execution.hpp"

namespace scnf::model {

// One statement of a small multi-process storage program. Writes fill their
// range with `value`; reads return what they observe.
struct ProgramOp {
  OpKind kind = OpKind::Read;
  std::string file;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  std::uint8_t value = 0;
  std::string sync_name;

  static ProgramOp write(std::string file, std::uint64_t offset, std::uint64_t size, std::uint8_t value);
  static ProgramOp read(std::string file, std::uint64_t offset, std::uint64_t size);
  static ProgramOp sync(std::string name, std::string file);
  bool operator==(const ProgramOp&) const = default;
};

// Statement `index` of process `process`.
struct StmtRef {
  std::uint32_t process = 0;
  std::uint32_t index = 0;
  auto operator<=>(const StmtRef&) const = default;
};

// so edge: `to` may not start before `from` has completed.
struct ProgramEdge {
  StmtRef from;
  StmtRef to;
  bool operator==(const ProgramEdge&) const = default;
};

struct Program {
  std::vector<std::vector<ProgramOp>> processes;
  std::vector<ProgramEdge> so;

  [[nodiscard]] std::size_t op_count() const;
  // Op id of a statement in to_trace(): process-major numbering.
  [[nodiscard]] OpId op_id(StmtRef ref) const;
};

// The program's ops with po from statement order and the declared so edges.
ExecutionTrace to_trace(const Program& program);

// Observable result of one execution: every read's returned bytes (in
// process-major statement order) and each file's final contents.
struct Outcome {
  std::vector<std::vector<std::uint8_t>> reads;
  std::map<std::string, std::vector<std::uint8_t>> files;
  auto operator<=>(const Outcome&) const = default;
};

std::string to_string(const Outcome& outcome);

inline constexpr std::size_t kMaxOracleProcesses = 4;
inline constexpr std::size_t kMaxOracleOpsPerProcess = 8;

// Every outcome of a sequentially consistent execution: all interleavings
// respecting po and so, run against a zero-initialised byte-array file
// model. Throws TooLarge past 4 processes or 8 ops per process.
std::set<Outcome> enumerate_sc_results(const Program& program);

}  // namespace scnf::model
