#include "scnf/interval/global_tree.hpp"

namespace scnf::interval {

GlobalTree::Map::iterator GlobalTree::first_touching(std::uint64_t start) {
  auto it = nodes_.upper_bound(start);
  if (it != nodes_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.end >= start) return prev;
  }
  return it;
}

GlobalTree::Map::const_iterator GlobalTree::first_touching(std::uint64_t start) const {
  auto it = nodes_.upper_bound(start);
  if (it != nodes_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.end >= start) return prev;
  }
  return it;
}

void GlobalTree::merge_around(Map::iterator it) {
  if (it != nodes_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.end + 1 == it->first && prev->second.owner == it->second.owner) {
      prev->second.end = it->second.end;
      nodes_.erase(it);
      it = prev;
    }
  }
  auto next = std::next(it);
  if (next != nodes_.end() && it->second.end + 1 == next->first &&
      it->second.owner == next->second.owner) {
    it->second.end = next->second.end;
    nodes_.erase(next);
  }
}

void GlobalTree::insert(const GlobalInterval& iv) {
  const auto [start, end] = iv.range;
  auto it = first_touching(start);
  while (it != nodes_.end() && it->first <= end) {
    const std::uint64_t s = it->first;
    const Node node = it->second;
    it = nodes_.erase(it);
    if (s < start) nodes_.emplace(s, Node{start - 1, node.owner});
    if (node.end > end) {
      nodes_.emplace(end + 1, Node{node.end, node.owner});
      break;
    }
  }
  auto [pos, _] = nodes_.emplace(start, Node{end, iv.owner});
  merge_around(pos);
}

std::uint64_t GlobalTree::remove_if_owner(const ByteRange& range, const ClientId& owner) {
  std::uint64_t released = 0;
  auto it = first_touching(range.start);
  while (it != nodes_.end() && it->first <= range.end) {
    if (!(it->second.owner == owner)) {
      ++it;
      continue;
    }
    const std::uint64_t s = it->first;
    const Node node = it->second;
    it = nodes_.erase(it);
    const ByteRange cut = ByteRange(s, node.end).intersect(range);
    released += cut.length();
    if (s < cut.start) nodes_.emplace(s, Node{cut.start - 1, owner});
    if (node.end > cut.end) {
      nodes_.emplace(cut.end + 1, Node{node.end, owner});
      break;
    }
  }
  return released;
}

std::vector<GlobalInterval> GlobalTree::query(const ByteRange& range) const {
  std::vector<GlobalInterval> out;
  for (auto it = first_touching(range.start); it != nodes_.end() && it->first <= range.end; ++it) {
    out.push_back({ByteRange(it->first, it->second.end).intersect(range), it->second.owner});
  }
  return out;
}

std::vector<GlobalInterval> GlobalTree::all() const {
  std::vector<GlobalInterval> out;
  out.reserve(nodes_.size());
  for (const auto& [s, node] : nodes_) out.push_back({ByteRange(s, node.end), node.owner});
  return out;
}

std::optional<ClientId> GlobalTree::owner_at(std::uint64_t offset) const {
  auto it = first_touching(offset);
  if (it == nodes_.end() || it->first > offset) return std::nullopt;
  return it->second.owner;
}

}  // namespace scnf::interval
