#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scnf/basefs/client.hpp"
#include "scnf/trace/trace.hpp"

namespace scnf::layers {

enum class LayerKind { Posix, Commit, Session };

LayerKind parse_layer_kind(const std::string& name);
std::string to_string(LayerKind kind);

struct LayerHandle {
  basefs::FileHandle fh;
  std::string path;
  // SessionFS: ownership snapshot taken at session open.
  bool session_open = false;
  std::vector<interval::GlobalInterval> snapshot;
};

// A consistency layer over one client's BaseFS primitives. Layers never
// touch server or client state directly. Data and sync ops are recorded in
// the cluster's trace (if any) as program-level operations.
class Layer {
 public:
  Layer(basefs::Client& client, trace::TraceRecorder* recorder) : client_(client), recorder_(recorder) {}
  virtual ~Layer() = default;

  [[nodiscard]] virtual LayerKind kind() const = 0;
  [[nodiscard]] basefs::Client& client() { return client_; }

  sim::Task<LayerHandle> open(std::string path);
  sim::Task<void> close(LayerHandle& h);

  // Positional write/read at `offset`. Returns the recorded op id (or 0
  // without a recorder) through last_op().
  virtual sim::Task<std::uint64_t> write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) = 0;
  virtual sim::Task<std::uint64_t> write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) = 0;
  virtual sim::Task<basefs::ReadResult> read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) = 0;
  // Synchronization op by model name ("commit", "session_open",
  // "session_close"). Throws UnknownSyncOp for names the layer lacks.
  virtual sim::Task<void> sync(LayerHandle& h, std::string name) = 0;

  // Trace id of the most recent recorded op.
  [[nodiscard]] std::optional<std::uint64_t> last_op() const { return last_op_; }

 protected:
  sim::Task<std::uint64_t> buffered_write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data,
                                          std::uint64_t size);
  // Reads [offset, offset+size) piecewise: owned sub-ranges from their
  // owners, gaps from the PFS.
  sim::Task<basefs::ReadResult> split_read(LayerHandle& h, std::uint64_t offset, std::uint64_t size,
                                           std::vector<interval::GlobalInterval> owners);
  void record_data(trace::RecordKind kind, const LayerHandle& h, std::uint64_t offset, std::uint64_t size,
                   sim::SimTime t0, std::vector<std::string> flags = {});
  void record_sync(const std::string& name, const LayerHandle& h, sim::SimTime t0);
  [[nodiscard]] sim::SimTime now() const;

  basefs::Client& client_;
  trace::TraceRecorder* recorder_;
  std::optional<std::uint64_t> last_op_;
};

// write = bfs_write + bfs_attach; read = bfs_query + bfs_read.
class PosixFs : public Layer {
 public:
  using Layer::Layer;
  [[nodiscard]] LayerKind kind() const override { return LayerKind::Posix; }
  sim::Task<std::uint64_t> write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) override;
  sim::Task<std::uint64_t> write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) override;
  sim::Task<basefs::ReadResult> read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) override;
  sim::Task<void> sync(LayerHandle& h, std::string name) override;

 private:
  sim::Task<std::uint64_t> write_attach(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data,
                                        std::uint64_t size);
};

// write = bfs_write; commit = bfs_attach_file; read = bfs_query + bfs_read.
class CommitFs : public Layer {
 public:
  using Layer::Layer;
  [[nodiscard]] LayerKind kind() const override { return LayerKind::Commit; }
  sim::Task<std::uint64_t> write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) override;
  sim::Task<std::uint64_t> write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) override;
  sim::Task<basefs::ReadResult> read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) override;
  sim::Task<void> sync(LayerHandle& h, std::string name) override;
  sim::Task<void> commit(LayerHandle& h);
};

// session_open = bfs_query_file; session_close = bfs_attach_file;
// read = bfs_read against the open-time snapshot.
class SessionFs : public Layer {
 public:
  using Layer::Layer;
  [[nodiscard]] LayerKind kind() const override { return LayerKind::Session; }
  sim::Task<std::uint64_t> write(LayerHandle& h, std::uint64_t offset, std::span<const std::uint8_t> data) override;
  sim::Task<std::uint64_t> write_size(LayerHandle& h, std::uint64_t offset, std::uint64_t size) override;
  // Throws SessionNotOpen outside a session.
  sim::Task<basefs::ReadResult> read(LayerHandle& h, std::uint64_t offset, std::uint64_t size) override;
  sim::Task<void> sync(LayerHandle& h, std::string name) override;
  sim::Task<void> session_open(LayerHandle& h);
  sim::Task<void> session_close(LayerHandle& h);
  // POSIX-style spellings: open + session_open, session_close + close.
  sim::Task<LayerHandle> open_session(std::string path);
  sim::Task<void> close_session(LayerHandle& h);
};

std::unique_ptr<Layer> make_layer(LayerKind kind, basefs::Client& client, trace::TraceRecorder* recorder);

}  // namespace scnf::layers
