#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scnf/interval/global_tree.hpp"
#include "scnf/interval/local_tree.hpp"
#include "scnf/model/execution.hpp"
#include "scnf/sim/world.hpp"

namespace scnf::basefs {

class Cluster;

struct FileHandle {
  std::uint64_t id = 0;
  auto operator<=>(const FileHandle&) const = default;
};

enum class Whence { Set, Cur, End };

struct ReadResult {
  std::uint64_t size = 0;
  std::vector<std::uint8_t> bytes;  // empty in size-only mode
  bool undefined = false;           // touched bytes beyond EOF
  bool from_pfs = false;            // some bytes came from the PFS
};

// One client process and its BaseFS primitives. Every primitive is a
// coroutine that advances simulated time by its cost.
class Client {
 public:
  Client(Cluster& cluster, ClientId id, model::ProcessId process, sim::EntityId entity);

  [[nodiscard]] const ClientId& id() const { return id_; }
  [[nodiscard]] model::ProcessId process() const { return process_; }
  [[nodiscard]] sim::EntityId entity() const { return entity_; }
  [[nodiscard]] sim::World& world();

  sim::Task<FileHandle> open(std::string path);
  sim::Task<void> close(FileHandle h);

  sim::Task<std::uint64_t> write(FileHandle h, std::span<const std::uint8_t> data);
  // Write of `size` bytes whose contents are not tracked (size-only mode).
  sim::Task<std::uint64_t> write_size(FileHandle h, std::uint64_t size);
  // owner == nullopt reads the PFS.
  sim::Task<ReadResult> read(FileHandle h, std::uint64_t size, std::optional<ClientId> owner);

  sim::Task<void> attach(FileHandle h, std::uint64_t offset, std::uint64_t size);
  sim::Task<void> attach_file(FileHandle h);
  sim::Task<std::vector<interval::GlobalInterval>> query(FileHandle h, std::uint64_t offset, std::uint64_t size);
  sim::Task<std::vector<interval::GlobalInterval>> query_file(FileHandle h);
  sim::Task<void> detach(FileHandle h, std::uint64_t offset, std::uint64_t size);
  sim::Task<void> detach_file(FileHandle h);
  sim::Task<void> flush(FileHandle h, std::uint64_t offset, std::uint64_t size);
  sim::Task<void> flush_file(FileHandle h);

  sim::Task<std::uint64_t> seek(FileHandle h, std::int64_t offset, Whence whence);
  [[nodiscard]] std::uint64_t tell(FileHandle h) const;
  sim::Task<std::uint64_t> stat(FileHandle h);

  [[nodiscard]] const std::string& path_of(FileHandle h) const;
  // Inspection, for tests.
  [[nodiscard]] const interval::LocalTree* local_tree(const std::string& path) const;
  [[nodiscard]] const interval::LocalTree* published(const std::string& path) const;

 private:
  friend class Cluster;

  struct Handle {
    std::string path;
    std::uint64_t position = 0;
    bool open = true;
  };
  struct FileState {
    interval::LocalTree local;
    // What other clients may read from us: the mappings as of each attach.
    interval::LocalTree published;
    std::vector<std::uint8_t> buffer;
    std::uint64_t buffer_len = 0;
    std::uint32_t open_handles = 0;
  };

  Handle& live(FileHandle h);
  const Handle& live(FileHandle h) const;
  FileState& state(const std::string& path) { return files_[path]; }

  sim::Task<std::uint64_t> do_write(FileHandle h, std::span<const std::uint8_t> data, std::uint64_t size);
  sim::Task<ReadResult> read_self(std::string path, ByteRange range);
  sim::Task<ReadResult> read_owner(Client& owner, std::string path, ByteRange range);
  sim::Task<ReadResult> read_pfs(std::string path, ByteRange range);
  sim::Task<void> send_attach(std::string path, std::vector<ByteRange> ranges);
  sim::Task<void> send_detach(std::string path, std::vector<ByteRange> ranges);
  sim::Task<void> write_pfs(std::string path, std::vector<interval::LocalInterval> pieces);
  void publish(FileState& f, const std::vector<ByteRange>& ranges);
  // Bytes of a mapped buffer range; empty in size-only mode.
  void copy_out(const FileState& f, const interval::LocalInterval& m, std::vector<std::uint8_t>& out,
                std::uint64_t at) const;
  void log(const char* name, const std::string& path, std::uint64_t offset, std::uint64_t size, sim::SimTime t0);

  Cluster& cluster_;
  ClientId id_;
  model::ProcessId process_;
  sim::EntityId entity_;
  std::map<std::string, FileState> files_;
  std::vector<Handle> handles_;
};

}  // namespace scnf::basefs
