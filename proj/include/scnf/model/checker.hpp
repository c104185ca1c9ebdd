#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scnf/model/execution.hpp"
#include "scnf/model/model_def.hpp"

namespace scnf::model {

// Conflicting pairs as trace indices (first < second): same file, ranges
// overlap, at least one write. Sorted.
std::vector<std::pair<std::size_t, std::size_t>> find_conflicts(const ExecutionTrace& trace);

// Sync ops s_1..s_k (trace indices) instantiating `pattern` between data ops
// x and y, or nullopt. A po edge additionally requires both endpoints to be
// issued by the same process; every s_i must name the conflicting file.
std::optional<std::vector<std::size_t>> match_msc(const ExecutionTrace& trace, const HbRelation& hb,
                                                  std::size_t x, std::size_t y, const MscPattern& pattern);

enum class Verdict { ProperlySynchronized, Race };

struct RaceReport {
  OpId first = 0;   // X: the op that happens before (or the lower id if unordered)
  OpId second = 0;  // Y
  Verdict verdict = Verdict::Race;
  // How the pair was judged: "read-hb", "msc", "unordered" or "no-msc".
  std::string reason;
  // Index into ModelDef::msc of the matched pattern and its sync op ids.
  std::optional<std::size_t> pattern;
  std::vector<OpId> witness;
};

// Judges every conflicting pair. Throws UnknownSyncOp if the trace uses a
// sync op outside model.sync_ops.
std::vector<RaceReport> check_properly_synchronized(const ExecutionTrace& trace, const ModelDef& model);

[[nodiscard]] inline bool has_race(const std::vector<RaceReport>& reports) {
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Race) return true;
  }
  return false;
}

std::string format_report_text(const ExecutionTrace& trace, const ModelDef& model,
                               const std::vector<RaceReport>& reports);
// One JSON object per line.
std::string format_report_jsonl(const ModelDef& model, const std::vector<RaceReport>& reports);

}  // namespace scnf::model
