#include "scnf/basefs/client.hpp"

#include <algorithm>

#include "scnf/basefs/cluster.hpp"
#include "scnf/common/error.hpp"

namespace scnf::basefs {

namespace {

// Message sizes used for RPC cost. Only the order of magnitude matters.
constexpr std::uint64_t kHeaderBytes = 64;
constexpr std::uint64_t kRangeBytes = 16;
constexpr std::uint64_t kIntervalBytes = 24;

std::vector<ByteRange> merged_ranges(const std::vector<interval::LocalInterval>& pieces) {
  std::vector<ByteRange> out;
  for (const auto& p : pieces) {
    if (!out.empty() && out.back().end + 1 == p.file.start) {
      out.back().end = p.file.end;
    } else {
      out.push_back(p.file);
    }
  }
  return out;
}

}  // namespace

Client::Client(Cluster& cluster, ClientId id, model::ProcessId process, sim::EntityId entity)
    : cluster_(cluster), id_(id), process_(process), entity_(entity) {}

sim::World& Client::world() { return cluster_.world(); }

Client::Handle& Client::live(FileHandle h) {
  if (h.id >= handles_.size() || !handles_[h.id].open) {
    throw Error(Errc::ClosedHandle, "handle " + std::to_string(h.id) + " is not open");
  }
  return handles_[h.id];
}

const Client::Handle& Client::live(FileHandle h) const { return const_cast<Client*>(this)->live(h); }

const std::string& Client::path_of(FileHandle h) const { return live(h).path; }

const interval::LocalTree* Client::local_tree(const std::string& path) const {
  auto it = files_.find(path);
  return it == files_.end() ? nullptr : &it->second.local;
}

const interval::LocalTree* Client::published(const std::string& path) const {
  auto it = files_.find(path);
  return it == files_.end() ? nullptr : &it->second.published;
}

void Client::log(const char* name, const std::string& path, std::uint64_t offset, std::uint64_t size,
                 sim::SimTime t0) {
  if (auto* rec = cluster_.recorder()) rec->primitive(process_, name, path, offset, size, t0, cluster_.world().now());
}

sim::Task<FileHandle> Client::open(std::string path) {
  if (path.empty()) throw Error(Errc::InvalidArgument, "empty path");
  const auto t0 = cluster_.world().now();
  handles_.push_back(Handle{path, 0, true});
  state(path).open_handles++;
  log("bfs_open", path, 0, 0, t0);
  co_return FileHandle{handles_.size() - 1};
}

sim::Task<void> Client::close(FileHandle h) {
  auto& hd = live(h);
  const auto t0 = cluster_.world().now();
  hd.open = false;
  auto& f = state(hd.path);
  // Unattached data is dropped once no handle of this client can reach it.
  if (--f.open_handles == 0) f.local.discard_unattached();
  log("bfs_close", hd.path, 0, 0, t0);
  co_return;
}

sim::Task<std::uint64_t> Client::write(FileHandle h, std::span<const std::uint8_t> data) {
  return do_write(h, data, data.size());
}

sim::Task<std::uint64_t> Client::write_size(FileHandle h, std::uint64_t size) { return do_write(h, {}, size); }

sim::Task<std::uint64_t> Client::do_write(FileHandle h, std::span<const std::uint8_t> data, std::uint64_t size) {
  const std::string path = live(h).path;
  const std::uint64_t pos = live(h).position;
  if (size == 0) co_return 0;
  auto& world = cluster_.world();
  const auto t0 = world.now();
  co_await world.device_io(entity_, cluster_.buffer_device(id_.node), sim::Direction::Write, size);
  auto& f = state(path);
  const ByteRange buf = ByteRange::from_offset_size(f.buffer_len, size);
  if (cluster_.options().store_data) {
    if (data.empty()) {
      f.buffer.resize(f.buffer.size() + size, 0);
    } else {
      f.buffer.insert(f.buffer.end(), data.begin(), data.end());
    }
  }
  f.buffer_len += size;
  f.local.insert_write(ByteRange::from_offset_size(pos, size), buf);
  live(h).position = pos + size;
  log("bfs_write", path, pos, size, t0);
  co_return size;
}

void Client::copy_out(const FileState& f, const interval::LocalInterval& m, std::vector<std::uint8_t>& out,
                      std::uint64_t at) const {
  if (!cluster_.options().store_data) return;
  std::copy_n(f.buffer.begin() + static_cast<std::ptrdiff_t>(m.buffer.start), m.file.length(),
              out.begin() + static_cast<std::ptrdiff_t>(at));
}

sim::Task<ReadResult> Client::read(FileHandle h, std::uint64_t size, std::optional<ClientId> owner) {
  const std::string path = live(h).path;
  const std::uint64_t pos = live(h).position;
  if (size == 0) co_return ReadResult{};
  const auto t0 = cluster_.world().now();
  const ByteRange range = ByteRange::from_offset_size(pos, size);
  ReadResult r;
  if (!owner) {
    r = co_await read_pfs(path, range);
  } else if (*owner == id_) {
    r = co_await read_self(path, range);
  } else {
    r = co_await read_owner(cluster_.client(*owner), path, range);
  }
  live(h).position = pos + size;
  log("bfs_read", path, pos, size, t0);
  co_return r;
}

sim::Task<ReadResult> Client::read_self(std::string path, ByteRange range) {
  auto it = files_.find(path);
  if (it == files_.end() || !it->second.local.fully_written(range)) {
    throw Error(Errc::NotOwner, "client " + to_string(id_) + " has not written " + to_string(range));
  }
  ReadResult r;
  r.size = range.length();
  if (cluster_.options().store_data) {
    r.bytes.assign(r.size, 0);
    for (const auto& m : it->second.local.lookup(range)) copy_out(it->second, m, r.bytes, m.file.start - range.start);
  }
  co_await cluster_.world().device_io(entity_, cluster_.buffer_device(id_.node), sim::Direction::Read, r.size);
  co_return r;
}

sim::Task<ReadResult> Client::read_owner(Client& owner, std::string path, ByteRange range) {
  auto& world = cluster_.world();
  const bool remote = owner.id_.node != id_.node;
  if (remote) co_await world.rpc(entity_, owner.entity_, kHeaderBytes, "read-req");
  auto it = owner.files_.find(path);
  if (it == owner.files_.end() || !it->second.published.fully_written(range)) {
    throw Error(Errc::NotOwner, "client " + to_string(owner.id_) + " does not own " + to_string(range));
  }
  ReadResult r;
  r.size = range.length();
  if (cluster_.options().store_data) {
    r.bytes.assign(r.size, 0);
    for (const auto& m : it->second.published.lookup(range)) {
      owner.copy_out(it->second, m, r.bytes, m.file.start - range.start);
    }
  }
  co_await world.device_io(owner.entity_, cluster_.buffer_device(owner.id_.node), sim::Direction::Read, r.size);
  if (remote) co_await world.rpc(owner.entity_, entity_, r.size, "read-data");
  world.record_c2c(owner.entity_, entity_, r.size);
  world.record_owner_read(entity_, owner.entity_, r.size);
  co_return r;
}

sim::Task<ReadResult> Client::read_pfs(std::string path, ByteRange range) {
  ReadResult r;
  r.size = range.length();
  r.undefined = range.end >= cluster_.file_size(path);
  r.from_pfs = true;
  r.bytes = cluster_.pfs().read(path, range.start, r.size);
  co_await cluster_.world().device_io(entity_, cluster_.pfs_device(), sim::Direction::Read, r.size);
  co_return r;
}

void Client::publish(FileState& f, const std::vector<ByteRange>& ranges) {
  for (const auto& r : ranges) {
    for (const auto& m : f.local.lookup(r)) f.published.insert_write(m.file, m.buffer);
  }
}

sim::Task<void> Client::send_attach(std::string path, std::vector<ByteRange> ranges) {
  auto& world = cluster_.world();
  auto& server = cluster_.server();
  co_await world.rpc(entity_, server.entity(), kHeaderBytes + kRangeBytes * ranges.size(), "attach");
  server.attach(path, ranges, id_);
  co_await server.service();
  co_await world.rpc(server.entity(), entity_, kHeaderBytes, "reply");
}

sim::Task<void> Client::send_detach(std::string path, std::vector<ByteRange> ranges) {
  auto& world = cluster_.world();
  auto& server = cluster_.server();
  co_await world.rpc(entity_, server.entity(), kHeaderBytes + kRangeBytes * ranges.size(), "detach");
  server.detach(path, ranges, id_);
  co_await server.service();
  co_await world.rpc(server.entity(), entity_, kHeaderBytes, "reply");
}

sim::Task<void> Client::attach(FileHandle h, std::uint64_t offset, std::uint64_t size) {
  const std::string path = live(h).path;
  const auto t0 = cluster_.world().now();
  const ByteRange range = ByteRange::from_offset_size(offset, size);
  auto& f = state(path);
  f.local.mark_attached(range);
  // Published before the server learns of it, so a reader that sees us as
  // owner always finds the data.
  publish(f, {range});
  co_await send_attach(path, {range});
  log("bfs_attach", path, offset, size, t0);
}

sim::Task<void> Client::attach_file(FileHandle h) {
  const std::string path = live(h).path;
  const auto t0 = cluster_.world().now();
  auto& f = state(path);
  const auto changed = f.local.mark_all_attached();
  if (!changed.empty()) {
    publish(f, changed);
    co_await send_attach(path, changed);
  }
  log("bfs_attach_file", path, 0, 0, t0);
}

sim::Task<std::vector<interval::GlobalInterval>> Client::query(FileHandle h, std::uint64_t offset,
                                                               std::uint64_t size) {
  const std::string path = live(h).path;
  const ByteRange range = ByteRange::from_offset_size(offset, size);
  auto& world = cluster_.world();
  auto& server = cluster_.server();
  const auto t0 = world.now();
  co_await world.rpc(entity_, server.entity(), kHeaderBytes, "query");
  auto result = server.query(path, range);
  co_await server.service();
  co_await world.rpc(server.entity(), entity_, kHeaderBytes + kIntervalBytes * result.size(), "reply");
  log("bfs_query", path, offset, size, t0);
  co_return result;
}

sim::Task<std::vector<interval::GlobalInterval>> Client::query_file(FileHandle h) {
  const std::string path = live(h).path;
  auto& world = cluster_.world();
  auto& server = cluster_.server();
  const auto t0 = world.now();
  co_await world.rpc(entity_, server.entity(), kHeaderBytes, "query");
  auto result = server.query_file(path);
  co_await server.service();
  co_await world.rpc(server.entity(), entity_, kHeaderBytes + kIntervalBytes * result.size(), "reply");
  log("bfs_query_file", path, 0, 0, t0);
  co_return result;
}

sim::Task<void> Client::detach(FileHandle h, std::uint64_t offset, std::uint64_t size) {
  const std::string path = live(h).path;
  const auto t0 = cluster_.world().now();
  const ByteRange range = ByteRange::from_offset_size(offset, size);
  auto& f = state(path);
  if (f.published.lookup(range).empty()) {
    throw Error(Errc::NotAttached, to_string(range) + " was not attached by " + to_string(id_));
  }
  f.local.clear_attached(range);
  f.published.erase(range);
  co_await send_detach(path, {range});
  log("bfs_detach", path, offset, size, t0);
}

sim::Task<void> Client::detach_file(FileHandle h) {
  const std::string path = live(h).path;
  const auto t0 = cluster_.world().now();
  auto& f = state(path);
  const auto ranges = merged_ranges(f.published.all());
  if (!ranges.empty()) {
    f.local.clear_all_attached();
    f.published = interval::LocalTree{};
    co_await send_detach(path, ranges);
  }
  log("bfs_detach_file", path, 0, 0, t0);
}

sim::Task<void> Client::write_pfs(std::string path, std::vector<interval::LocalInterval> pieces) {
  std::uint64_t total = 0;
  for (const auto& p : pieces) total += p.file.length();
  co_await cluster_.world().device_io(entity_, cluster_.pfs_device(), sim::Direction::Write, total);
  const auto& f = files_.at(path);
  for (const auto& p : pieces) {
    if (cluster_.options().store_data) {
      std::vector<std::uint8_t> bytes(p.file.length());
      copy_out(f, p, bytes, 0);
      cluster_.pfs().write(path, p.file.start, bytes);
    } else {
      cluster_.pfs().write_size(path, p.file.start, p.file.length());
    }
  }
}

sim::Task<void> Client::flush(FileHandle h, std::uint64_t offset, std::uint64_t size) {
  const std::string path = live(h).path;
  const auto t0 = cluster_.world().now();
  const auto pieces = state(path).local.lookup(ByteRange::from_offset_size(offset, size));
  if (!pieces.empty()) co_await write_pfs(path, pieces);
  log("bfs_flush", path, offset, size, t0);
}

sim::Task<void> Client::flush_file(FileHandle h) {
  const std::string path = live(h).path;
  const auto t0 = cluster_.world().now();
  const auto pieces = state(path).local.all();
  if (!pieces.empty()) co_await write_pfs(path, pieces);
  log("bfs_flush_file", path, 0, 0, t0);
}

sim::Task<std::uint64_t> Client::stat(FileHandle h) {
  const std::string path = live(h).path;
  auto& world = cluster_.world();
  auto& server = cluster_.server();
  const auto t0 = world.now();
  co_await world.rpc(entity_, server.entity(), kHeaderBytes, "stat");
  const std::uint64_t size = cluster_.file_size(path);
  co_await server.service();
  co_await world.rpc(server.entity(), entity_, kHeaderBytes, "reply");
  log("bfs_stat", path, 0, 0, t0);
  co_return size;
}

sim::Task<std::uint64_t> Client::seek(FileHandle h, std::int64_t offset, Whence whence) {
  std::int64_t base = 0;
  if (whence == Whence::Cur) {
    base = static_cast<std::int64_t>(live(h).position);
  } else if (whence == Whence::End) {
    base = static_cast<std::int64_t>(co_await stat(h));
  } else {
    live(h);
  }
  const std::int64_t pos = base + offset;
  if (pos < 0) throw Error(Errc::NegativePosition, "seek to " + std::to_string(pos));
  live(h).position = static_cast<std::uint64_t>(pos);
  co_return live(h).position;
}

std::uint64_t Client::tell(FileHandle h) const { return live(h).position; }

}  // namespace scnf::basefs
