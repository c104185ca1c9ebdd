#include "scnf/layers/layer.hpp"

#include <algorithm>

#include "scnf/common/error.hpp"

namespace scnf::layers {

LayerKind parse_layer_kind(const std::string& name) {
  if (name == "posix") return LayerKind::Posix;
  if (name == "commit") return LayerKind::Commit;
  if (name == "session") return LayerKind::Session;
  throw Error(Errc::UnknownModel, "no executable layer named '" + name + "' (posix, commit, session)");
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Posix: return "posix";
    case LayerKind::Commit: return "commit";
    case LayerKind::Session: return "session";
  }
  return "?";
}

sim::SimTime Layer::now() const { return client_.world().now(); }

void Layer::record_data(trace::RecordKind kind, const LayerHandle& h, std::uint64_t offset, std::uint64_t size,
                        sim::SimTime t0, std::vector<std::string> flags) {
  if (recorder_) last_op_ = recorder_->data(client_.process(), kind, h.path, offset, size, t0, now(), std::move(flags));
}

void Layer::record_sync(const std::string& name, const LayerHandle& h, sim::SimTime t0) {
  if (recorder_) last_op_ = recorder_->sync(client_.process(), name, h.path, t0, now());
}

sim::Task<LayerHandle> Layer::open(std::string path) {
  LayerHandle h;
  h.fh = co_await client_.open(path);
  h.path = std::move(path);
  co_return h;
}

sim::Task<void> Layer::close(LayerHandle& h) { co_await client_.close(h.fh); }

sim::Task<std::uint64_t> Layer::buffered_write(LayerHandle& h, std::uint64_t offset,
                                               std::span<const std::uint8_t> data, std::uint64_t size) {
  co_await client_.seek(h.fh, static_cast<std::int64_t>(offset), basefs::Whence::Set);
  if (data.empty()) co_return co_await client_.write_size(h.fh, size);
  co_return co_await client_.write(h.fh, data);
}

sim::Task<basefs::ReadResult> Layer::split_read(LayerHandle& h, std::uint64_t offset, std::uint64_t size,
                                                std::vector<interval::GlobalInterval> owners) {
  basefs::ReadResult out;
  out.size = size;
  if (size == 0) co_return out;
  const ByteRange want = ByteRange::from_offset_size(offset, size);

  // Owned sub-ranges in order, with PFS pieces for the gaps.
  std::vector<std::pair<ByteRange, std::optional<ClientId>>> pieces;
  std::uint64_t cursor = want.start;
  for (const auto& iv : owners) {
    if (!iv.range.overlaps(want)) continue;
    const ByteRange part = iv.range.intersect(want);
    if (part.start > cursor) pieces.emplace_back(ByteRange(cursor, part.start - 1), std::nullopt);
    pieces.emplace_back(part, iv.owner);
    cursor = part.end + 1;
  }
  if (cursor <= want.end && (pieces.empty() || pieces.back().first.end < want.end)) {
    pieces.emplace_back(ByteRange(cursor, want.end), std::nullopt);
  }

  for (const auto& [range, owner] : pieces) {
    co_await client_.seek(h.fh, static_cast<std::int64_t>(range.start), basefs::Whence::Set);
    auto r = co_await client_.read(h.fh, range.length(), owner);
    if (!r.bytes.empty()) {
      if (out.bytes.empty()) out.bytes.assign(size, 0);
      std::copy(r.bytes.begin(), r.bytes.end(), out.bytes.begin() + static_cast<std::ptrdiff_t>(range.start - offset));
    }
    out.undefined = out.undefined || r.undefined;
    out.from_pfs = out.from_pfs || r.from_pfs;
  }
  co_return out;
}

namespace {

std::vector<std::string> read_flags(const basefs::ReadResult& r) {
  std::vector<std::string> flags;
  if (r.from_pfs) flags.emplace_back("pfs");
  if (r.undefined) flags.emplace_back("undef");
  return flags;
}

}  // namespace

// PosixFS

sim::Task<std::uint64_t> PosixFs::write_attach(LayerHandle& h, std::uint64_t offset,
                                               std::span<const std::uint8_t> data, std::uint64_t size) {
  const auto t0 = now();
  const auto n = co_await buffered_write(h, offset, data, size);
  if (n > 0) co_await client_.attach(h.fh, offset, n);
  record_data(trace::RecordKind::Write, h, offset, size, t0);
  co_return n;
}

sim::Task<std::uint64_t> PosixFs::write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) {
  return write_attach(h, offset, data, data.size());
}

sim::Task<std::uint64_t> PosixFs::write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) {
  return write_attach(h, offset, {}, size);
}

sim::Task<basefs::ReadResult> PosixFs::read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) {
  const auto t0 = now();
  auto owners = co_await client_.query(h.fh, offset, size);
  auto r = co_await split_read(h, offset, size, std::move(owners));
  record_data(trace::RecordKind::Read, h, offset, size, t0, read_flags(r));
  co_return r;
}

sim::Task<void> PosixFs::sync(LayerHandle&, std::string name) {
  throw Error(Errc::UnknownSyncOp, "PosixFS has no synchronization op '" + name + "'");
  co_return;
}

// CommitFS

sim::Task<std::uint64_t> CommitFs::write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) {
  const auto t0 = now();
  const auto n = co_await buffered_write(h, offset, data, data.size());
  record_data(trace::RecordKind::Write, h, offset, data.size(), t0);
  co_return n;
}

sim::Task<std::uint64_t> CommitFs::write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) {
  const auto t0 = now();
  const auto n = co_await buffered_write(h, offset, {}, size);
  record_data(trace::RecordKind::Write, h, offset, size, t0);
  co_return n;
}

sim::Task<basefs::ReadResult> CommitFs::read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) {
  const auto t0 = now();
  auto owners = co_await client_.query(h.fh, offset, size);
  auto r = co_await split_read(h, offset, size, std::move(owners));
  record_data(trace::RecordKind::Read, h, offset, size, t0, read_flags(r));
  co_return r;
}

sim::Task<void> CommitFs::commit(LayerHandle& h) {
  const auto t0 = now();
  co_await client_.attach_file(h.fh);
  record_sync("commit", h, t0);
}

sim::Task<void> CommitFs::sync(LayerHandle& h, std::string name) {
  if (name != "commit") throw Error(Errc::UnknownSyncOp, "CommitFS has no synchronization op '" + name + "'");
  co_await commit(h);
}

// SessionFS

sim::Task<std::uint64_t> SessionFs::write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) {
  const auto t0 = now();
  const auto n = co_await buffered_write(h, offset, data, data.size());
  record_data(trace::RecordKind::Write, h, offset, data.size(), t0);
  co_return n;
}

sim::Task<std::uint64_t> SessionFs::write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) {
  const auto t0 = now();
  const auto n = co_await buffered_write(h, offset, {}, size);
  record_data(trace::RecordKind::Write, h, offset, size, t0);
  co_return n;
}

sim::Task<basefs::ReadResult> SessionFs::read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) {
  if (!h.session_open) throw Error(Errc::SessionNotOpen, "read of " + h.path + " outside a session");
  const auto t0 = now();
  auto r = co_await split_read(h, offset, size, h.snapshot);
  record_data(trace::RecordKind::Read, h, offset, size, t0, read_flags(r));
  co_return r;
}

sim::Task<void> SessionFs::session_open(LayerHandle& h) {
  const auto t0 = now();
  h.snapshot = co_await client_.query_file(h.fh);
  h.session_open = true;
  record_sync("session_open", h, t0);
}

sim::Task<void> SessionFs::session_close(LayerHandle& h) {
  const auto t0 = now();
  co_await client_.attach_file(h.fh);
  h.session_open = false;
  h.snapshot.clear();
  record_sync("session_close", h, t0);
}

sim::Task<void> SessionFs::sync(LayerHandle& h, std::string name) {
  if (name == "session_open") {
    co_await session_open(h);
  } else if (name == "session_close") {
    co_await session_close(h);
  } else {
    throw Error(Errc::UnknownSyncOp, "SessionFS has no synchronization op '" + name + "'");
  }
}

sim::Task<LayerHandle> SessionFs::open_session(std::string path) {
  auto h = co_await open(std::move(path));
  co_await session_open(h);
  co_return h;
}

sim::Task<void> SessionFs::close_session(LayerHandle& h) {
  co_await session_close(h);
  co_await close(h);
}

std::unique_ptr<Layer> make_layer(LayerKind kind, basefs::Client& client, trace::TraceRecorder* recorder) {
  switch (kind) {
    case LayerKind::Posix: return std::make_unique<PosixFs>(client, recorder);
    case LayerKind::Commit: return std::make_unique<CommitFs>(client, recorder);
    case LayerKind::Session: return std::make_unique<SessionFs>(client, recorder);
  }
  throw Error(Errc::InvalidArgument, "unknown layer kind");
}

}  // namespace scnf::layers
