#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scnf/model/execution.hpp"
#include "scnf/sim/time.hpp"

namespace scnf::trace {

inline constexpr int kTraceMajor = 1;
inline constexpr int kTraceMinor = 0;

enum class RecordKind {
  Write,      // W: data write
  Read,       // R: data read
  Sync,       // S: synchronization op
  Edge,       // E: so edge between two op records
  Primitive,  // P: BaseFS primitive invocation (informational)
};

// One line of a trace file. Which fields are meaningful depends on the kind;
// see docs/trace_format.md. Unused fields stay at their defaults.
struct TraceRecord {
  RecordKind kind = RecordKind::Write;
  std::uint64_t seq = 0;
  model::ProcessId process = 0;
  std::string file;
  std::string name;  // S: sync op name; P: primitive name
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
  sim::SimTime t_start = 0;
  sim::SimTime t_end = 0;
  std::uint64_t from = 0;  // E only
  std::uint64_t to = 0;    // E only
  std::vector<std::string> flags;

  bool operator==(const TraceRecord&) const = default;
};

// Single line, no trailing newline. Throws InvalidArgument for records that
// violate the per-kind field rules.
std::string encode(const TraceRecord& record);
// Inverse of encode. Throws ParseError.
TraceRecord decode(std::string_view line);

std::string header_line();

// Whole-file text: header plus one line per record.
std::string to_text(const std::vector<TraceRecord>& records);
// Parses a whole file, checking the header version and that seq strictly
// increases. ParseError messages carry `source:line`.
std::vector<TraceRecord> parse_text(std::string_view text, std::string_view source = "<trace>");

void write_file(const std::filesystem::path& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_file(const std::filesystem::path& path);

// W/R/S records become ops (op id = seq), E records become so edges.
// P records are ignored. A so edge naming a missing op is a ParseError.
model::ExecutionTrace to_execution_trace(const std::vector<TraceRecord>& records);
// read_file + to_execution_trace.
model::ExecutionTrace read_trace(const std::filesystem::path& path);

// Accumulates records during a simulation run. Sequence numbers are assigned
// in call order, so a deterministic run yields an identical trace.
class TraceRecorder {
 public:
  std::uint64_t data(model::ProcessId process, RecordKind kind, const std::string& file, std::uint64_t offset,
                     std::uint64_t size, sim::SimTime t_start, sim::SimTime t_end,
                     std::vector<std::string> flags = {});
  std::uint64_t sync(model::ProcessId process, const std::string& name, const std::string& file,
                     sim::SimTime t_start, sim::SimTime t_end);
  void primitive(model::ProcessId process, const std::string& name, const std::string& file, std::uint64_t offset,
                 std::uint64_t size, sim::SimTime t_start, sim::SimTime t_end);
  void edge(std::uint64_t from, std::uint64_t to);

  // so edges into the next op `process` records.
  void add_pending(model::ProcessId process, std::uint64_t from);
  // Barrier among `participants`: each participant's next op is ordered
  // after every other participant's most recent op.
  void barrier(const std::vector<model::ProcessId>& participants);
  [[nodiscard]] std::optional<std::uint64_t> last_op(model::ProcessId process) const;

  [[nodiscard]] const std::vector<TraceRecord>& records() const { return records_; }

 private:
  std::uint64_t push_op(TraceRecord r);

  std::uint64_t next_seq_ = 0;
  std::vector<TraceRecord> records_;
  std::map<model::ProcessId, std::uint64_t> last_op_;
  std::map<model::ProcessId, std::vector<std::uint64_t>> pending_;
};

}  // namespace scnf::trace
