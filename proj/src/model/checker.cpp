#include "scnf/model/checker.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"

namespace scnf::model {

std::vector<std::pair<std::size_t, std::size_t>> find_conflicts(const ExecutionTrace& trace) {
  std::map<std::string, std::vector<std::size_t>> by_file;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.op(i).is_data()) by_file[trace.op(i).file].push_back(i);
  }

  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto& [file, idx] : by_file) {
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
      return std::pair(trace.op(a).range->start, a) < std::pair(trace.op(b).range->start, b);
    });
    // Sweep by start offset; `active` holds ops whose range may still reach
    // the current start.
    std::vector<std::size_t> active;
    for (auto i : idx) {
      const ByteRange& r = *trace.op(i).range;
      std::erase_if(active, [&](auto a) { return trace.op(a).range->end < r.start; });
      for (auto a : active) {
        if (trace.op(a).kind == OpKind::Write || trace.op(i).kind == OpKind::Write) {
          out.emplace_back(std::min(a, i), std::max(a, i));
        }
      }
      active.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool related(const ExecutionTrace& trace, const HbRelation& hb, Edge e, std::size_t a, std::size_t b) {
  if (e == Edge::Po) return trace.op(a).process == trace.op(b).process && a < b;
  return hb.before(a, b);
}

}  // namespace

std::optional<std::vector<std::size_t>> match_msc(const ExecutionTrace& trace, const HbRelation& hb,
                                                  std::size_t x, std::size_t y, const MscPattern& pattern) {
  const std::string& file = trace.op(x).file;
  if (pattern.k() == 0) {
    if (related(trace, hb, pattern.edges[0], x, y)) return std::vector<std::size_t>{};
    return std::nullopt;
  }

  // Layered search: layer i holds every candidate for s_{i+1} reachable from
  // X through a valid prefix, with a back-pointer into layer i-1.
  struct Cand {
    std::size_t op;
    std::size_t parent;
  };
  std::vector<std::vector<Cand>> layers(pattern.k());
  std::vector<std::size_t> prev{x};
  for (std::size_t step = 0; step < pattern.k(); ++step) {
    for (std::size_t s = 0; s < trace.size(); ++s) {
      const auto& op = trace.op(s);
      if (op.kind != OpKind::Sync || op.sync_name != pattern.ops[step] || op.file != file) continue;
      for (std::size_t pi = 0; pi < prev.size(); ++pi) {
        if (related(trace, hb, pattern.edges[step], prev[pi], s)) {
          layers[step].push_back({s, pi});
          break;
        }
      }
    }
    if (layers[step].empty()) return std::nullopt;
    prev.clear();
    for (const auto& c : layers[step]) prev.push_back(c.op);
  }
  for (std::size_t li = 0; li < layers.back().size(); ++li) {
    if (!related(trace, hb, pattern.edges.back(), layers.back()[li].op, y)) continue;
    std::vector<std::size_t> chain(pattern.k());
    std::size_t at = li;
    for (std::size_t step = pattern.k(); step-- > 0;) {
      chain[step] = layers[step][at].op;
      at = layers[step][at].parent;
    }
    return chain;
  }
  return std::nullopt;
}

std::vector<RaceReport> check_properly_synchronized(const ExecutionTrace& trace, const ModelDef& model) {
  model.validate();
  for (const auto& op : trace.ops()) {
    if (op.kind == OpKind::Sync && !model.sync_ops.contains(op.sync_name)) {
      throw Error(Errc::UnknownSyncOp,
                  "op " + std::to_string(op.id) + " '" + op.sync_name + "' is not a sync op of " + model.name);
    }
  }

  const HbRelation hb(trace);
  std::vector<RaceReport> reports;
  for (auto [a, b] : find_conflicts(trace)) {
    RaceReport r;
    std::size_t x = a;
    std::size_t y = b;
    if (hb.before(b, a)) std::swap(x, y);
    r.first = trace.op(x).id;
    r.second = trace.op(y).id;
    if (!hb.before(x, y)) {
      r.verdict = Verdict::Race;
      r.reason = "unordered";
    } else if (trace.op(x).kind == OpKind::Read) {
      r.verdict = Verdict::ProperlySynchronized;
      r.reason = "read-hb";
    } else {
      r.verdict = Verdict::Race;
      r.reason = "no-msc";
      for (std::size_t pi = 0; pi < model.msc.size(); ++pi) {
        if (auto chain = match_msc(trace, hb, x, y, model.msc[pi])) {
          r.verdict = Verdict::ProperlySynchronized;
          r.reason = "msc";
          r.pattern = pi;
          for (auto s : *chain) r.witness.push_back(trace.op(s).id);
          break;
        }
      }
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

namespace {

std::string describe(const StorageOp& op) {
  std::string kind = op.kind == OpKind::Read ? "read" : op.kind == OpKind::Write ? "write" : op.sync_name;
  std::string out = "#" + std::to_string(op.id) + " p" + std::to_string(op.process) + " " + kind + " " + op.file;
  if (op.range) out += to_string(*op.range);
  return out;
}

}  // namespace

std::string format_report_text(const ExecutionTrace& trace, const ModelDef& model,
                               const std::vector<RaceReport>& reports) {
  std::ostringstream out;
  std::size_t races = 0;
  for (const auto& r : reports) {
    if (r.verdict != Verdict::Race) continue;
    ++races;
    out << "RACE " << describe(trace.op(trace.index_of(r.first))) << "  vs  "
        << describe(trace.op(trace.index_of(r.second))) << "  (" << r.reason << ")\n";
  }
  out << model.name << ": " << reports.size() << " conflicting pairs, " << races << " storage races\n";
  return out.str();
}

std::string format_report_jsonl(const ModelDef& model, const std::vector<RaceReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    nlohmann::json j{{"model", model.name},
                     {"first", r.first},
                     {"second", r.second},
                     {"verdict", r.verdict == Verdict::Race ? "race" : "properly-synchronized"},
                     {"reason", r.reason},
                     {"witness", r.witness}};
    if (r.pattern) j["msc"] = to_string(model.msc[*r.pattern]);
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace scnf::model
