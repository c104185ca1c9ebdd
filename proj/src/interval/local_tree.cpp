#include "scnf/interval/local_tree.hpp"

namespace scnf::interval {

namespace {

bool mergeable(std::uint64_t a_start, std::uint64_t a_end, std::uint64_t a_buf, bool a_att,
               std::uint64_t b_start, std::uint64_t b_buf, bool b_att) {
  return a_end + 1 == b_start && a_buf + (a_end - a_start + 1) == b_buf && a_att == b_att;
}

void append_merged(std::vector<ByteRange>& out, const ByteRange& r) {
  if (!out.empty() && out.back().end + 1 == r.start) {
    out.back().end = r.end;
  } else {
    out.push_back(r);
  }
}

}  // namespace

LocalTree::Map::iterator LocalTree::first_touching(std::uint64_t start) {
  auto it = nodes_.upper_bound(start);
  if (it != nodes_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.file_end >= start) return prev;
  }
  return it;
}

LocalTree::Map::const_iterator LocalTree::first_touching(std::uint64_t start) const {
  auto it = nodes_.upper_bound(start);
  if (it != nodes_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.file_end >= start) return prev;
  }
  return it;
}

void LocalTree::split_at(std::uint64_t offset) {
  auto it = first_touching(offset);
  if (it == nodes_.end() || it->first >= offset) return;
  Node& left = it->second;
  const Node right{left.file_end, left.buffer_start + (offset - it->first), left.attached};
  left.file_end = offset - 1;
  nodes_.emplace(offset, right);
}

void LocalTree::merge_around(Map::iterator it) {
  if (it != nodes_.begin()) {
    auto prev = std::prev(it);
    if (mergeable(prev->first, prev->second.file_end, prev->second.buffer_start, prev->second.attached,
                  it->first, it->second.buffer_start, it->second.attached)) {
      prev->second.file_end = it->second.file_end;
      nodes_.erase(it);
      it = prev;
    }
  }
  auto next = std::next(it);
  if (next != nodes_.end() &&
      mergeable(it->first, it->second.file_end, it->second.buffer_start, it->second.attached,
                next->first, next->second.buffer_start, next->second.attached)) {
    it->second.file_end = next->second.file_end;
    nodes_.erase(next);
  }
}

void LocalTree::normalize() {
  for (auto it = nodes_.begin(); it != nodes_.end();) {
    auto next = std::next(it);
    if (next != nodes_.end() &&
        mergeable(it->first, it->second.file_end, it->second.buffer_start, it->second.attached,
                  next->first, next->second.buffer_start, next->second.attached)) {
      it->second.file_end = next->second.file_end;
      nodes_.erase(next);
    } else {
      it = next;
    }
  }
}

void LocalTree::insert_write(const ByteRange& file, const ByteRange& buffer) {
  if (file.length() != buffer.length()) {
    throw Error(Errc::InvalidArgument, "file and buffer ranges differ in length");
  }
  auto it = first_touching(file.start);
  while (it != nodes_.end() && it->first <= file.end) {
    const std::uint64_t s = it->first;
    const Node node = it->second;
    it = nodes_.erase(it);
    if (s < file.start) nodes_.emplace(s, Node{file.start - 1, node.buffer_start, node.attached});
    if (node.file_end > file.end) {
      nodes_.emplace(file.end + 1,
                     Node{node.file_end, node.buffer_start + (file.end + 1 - s), node.attached});
      break;
    }
  }
  auto [pos, _] = nodes_.emplace(file.start, Node{file.end, buffer.start, false});
  merge_around(pos);
}

std::vector<LocalInterval> LocalTree::lookup(const ByteRange& range) const {
  std::vector<LocalInterval> out;
  for (auto it = first_touching(range.start); it != nodes_.end() && it->first <= range.end; ++it) {
    const ByteRange clip = ByteRange(it->first, it->second.file_end).intersect(range);
    const std::uint64_t b = it->second.buffer_start + (clip.start - it->first);
    out.push_back({clip, ByteRange(b, b + clip.length() - 1), it->second.attached});
  }
  return out;
}

std::vector<LocalInterval> LocalTree::all() const {
  std::vector<LocalInterval> out;
  out.reserve(nodes_.size());
  for (const auto& [s, n] : nodes_) {
    out.push_back({ByteRange(s, n.file_end),
                   ByteRange(n.buffer_start, n.buffer_start + (n.file_end - s)), n.attached});
  }
  return out;
}

bool LocalTree::fully_written(const ByteRange& range) const {
  std::uint64_t next = range.start;
  for (auto it = first_touching(range.start); it != nodes_.end() && it->first <= range.end; ++it) {
    if (it->first > next) return false;
    if (it->second.file_end >= range.end) return true;
    next = it->second.file_end + 1;
  }
  return false;
}

bool LocalTree::fully_attached(const ByteRange& range) const {
  std::uint64_t next = range.start;
  for (auto it = first_touching(range.start); it != nodes_.end() && it->first <= range.end; ++it) {
    if (it->first > next || !it->second.attached) return false;
    if (it->second.file_end >= range.end) return true;
    next = it->second.file_end + 1;
  }
  return false;
}

bool LocalTree::any_attached(const ByteRange& range) const {
  for (auto it = first_touching(range.start); it != nodes_.end() && it->first <= range.end; ++it) {
    if (it->second.attached) return true;
  }
  return false;
}

bool LocalTree::has_unattached() const {
  for (const auto& [s, n] : nodes_) {
    if (!n.attached) return true;
  }
  return false;
}

bool LocalTree::has_attached() const {
  for (const auto& [s, n] : nodes_) {
    if (n.attached) return true;
  }
  return false;
}

std::vector<ByteRange> LocalTree::set_attached(const ByteRange& range, bool value) {
  split_at(range.start);
  if (range.end + 1 != 0) split_at(range.end + 1);
  std::vector<ByteRange> changed;
  for (auto it = first_touching(range.start); it != nodes_.end() && it->first <= range.end; ++it) {
    if (it->second.attached != value) {
      it->second.attached = value;
      append_merged(changed, ByteRange(it->first, it->second.file_end));
    }
  }
  normalize();
  return changed;
}

void LocalTree::mark_attached(const ByteRange& range) {
  if (!fully_written(range)) {
    throw Error(Errc::UnwrittenBytes, "attach of unwritten bytes in " + to_string(range));
  }
  if (fully_attached(range)) {
    throw Error(Errc::AlreadyAttached, to_string(range) + " is already attached");
  }
  set_attached(range, true);
}

std::vector<ByteRange> LocalTree::mark_all_attached() {
  std::vector<ByteRange> changed;
  for (auto& [s, n] : nodes_) {
    if (!n.attached) {
      n.attached = true;
      append_merged(changed, ByteRange(s, n.file_end));
    }
  }
  normalize();
  return changed;
}

std::uint64_t LocalTree::clear_attached(const ByteRange& range) {
  std::uint64_t bytes = 0;
  for (const auto& r : set_attached(range, false)) bytes += r.length();
  return bytes;
}

std::vector<ByteRange> LocalTree::clear_all_attached() {
  std::vector<ByteRange> changed;
  for (auto& [s, n] : nodes_) {
    if (n.attached) {
      n.attached = false;
      append_merged(changed, ByteRange(s, n.file_end));
    }
  }
  normalize();
  return changed;
}

void LocalTree::discard_unattached() {
  std::erase_if(nodes_, [](const auto& kv) { return !kv.second.attached; });
}

std::uint64_t LocalTree::erase(const ByteRange& range) {
  split_at(range.start);
  if (range.end + 1 != 0) split_at(range.end + 1);
  std::uint64_t bytes = 0;
  auto it = first_touching(range.start);
  while (it != nodes_.end() && it->first <= range.end) {
    bytes += it->second.file_end - it->first + 1;
    it = nodes_.erase(it);
  }
  return bytes;
}

}  // namespace scnf::interval
