#include "scnf/model/execution.hpp"

#include <algorithm>

namespace scnf::model {

ExecutionTrace::ExecutionTrace(std::vector<StorageOp> ops, std::vector<SoEdge> so)
    : ops_(std::move(ops)), so_(std::move(so)) {
  std::stable_sort(ops_.begin(), ops_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const std::size_t n = ops_.size();
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& op = ops_[i];
    if (!index_.emplace(op.id, i).second) {
      throw Error(Errc::ParseError, "duplicate op id " + std::to_string(op.id));
    }
    if (op.is_data() && !op.range) {
      throw Error(Errc::InvalidArgument, "data op " + std::to_string(op.id) + " has no range");
    }
    if (op.kind == OpKind::Sync && op.sync_name.empty()) {
      throw Error(Errc::InvalidArgument, "sync op " + std::to_string(op.id) + " has no name");
    }
  }

  po_next_.assign(n, std::nullopt);
  po_pos_.assign(n, 0);
  succ_.assign(n, {});
  std::unordered_map<ProcessId, std::size_t> last;
  std::unordered_map<ProcessId, std::size_t> count;
  for (std::size_t i = 0; i < n; ++i) {
    const ProcessId p = ops_[i].process;
    if (auto it = last.find(p); it != last.end()) {
      po_next_[it->second] = i;
      succ_[it->second].push_back(i);
    }
    last[p] = i;
    po_pos_[i] = count[p]++;
  }

  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (po_next_[i]) ++indegree[*po_next_[i]];
  }
  for (const auto& e : so_) {
    auto f = index_.find(e.from);
    auto t = index_.find(e.to);
    if (f == index_.end()) throw Error(Errc::ParseError, "so edge names missing op " + std::to_string(e.from));
    if (t == index_.end()) throw Error(Errc::ParseError, "so edge names missing op " + std::to_string(e.to));
    if (ops_[f->second].process == ops_[t->second].process) {
      throw Error(Errc::InvalidArgument, "so edge within one process: " + std::to_string(e.from) + "->" +
                                             std::to_string(e.to));
    }
    succ_[f->second].push_back(t->second);
    ++indegree[t->second];
  }

  // Kahn's algorithm: any op left unvisited sits on a cycle.
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++visited;
    for (auto s : succ_[v]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (visited != n) throw Error(Errc::CyclicOrder, "po ∪ so contains a cycle");
}

std::size_t ExecutionTrace::index_of(OpId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(Errc::InvalidArgument, "unknown op id " + std::to_string(id));
  return it->second;
}

std::optional<std::size_t> ExecutionTrace::po_next(std::size_t index) const { return po_next_[index]; }

ExecutionTrace ExecutionTrace::with_edges(const std::vector<SoEdge>& extra) const {
  auto so = so_;
  so.insert(so.end(), extra.begin(), extra.end());
  return ExecutionTrace(ops_, std::move(so));
}

HbRelation::HbRelation(const ExecutionTrace& trace) : n_(trace.size()), words_((trace.size() + 63) / 64) {
  rows_.assign(n_ * words_, 0);
  const auto& succ = trace.successors();

  // Reverse topological order; a row is the union of its successors' rows.
  std::vector<std::size_t> indegree(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (auto s : succ[i]) ++indegree[s];
  }
  std::vector<std::size_t> order;
  order.reserve(n_);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n_; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (auto s : succ[v]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    std::uint64_t* row = &rows_[v * words_];
    for (auto s : succ[v]) {
      row[s >> 6] |= std::uint64_t{1} << (s & 63);
      const std::uint64_t* srow = &rows_[s * words_];
      for (std::size_t w = 0; w < words_; ++w) row[w] |= srow[w];
    }
  }
}

}  // namespace scnf::model
