#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scnf::model {

enum class Edge { Po, Hb };

// An MSC: ops.size() == k synchronization operations joined by k+1 edges,
//   X -edges[0]-> ops[0] -edges[1]-> ... ops[k-1] -edges[k]-> Y
struct MscPattern {
  std::vector<std::string> ops;
  std::vector<Edge> edges;

  // Parses "po commit hb" (arrows "->po" and "→po" are accepted too).
  static MscPattern parse(std::string_view text);
  [[nodiscard]] std::size_t k() const noexcept { return ops.size(); }
  bool operator==(const MscPattern&) const = default;
};

std::string to_string(const MscPattern& p);

// A properly-synchronized SCNF model: the sync-op set S plus the MSCs that
// order a write before a conflicting access.
struct ModelDef {
  std::string name;
  std::set<std::string> sync_ops;
  std::vector<MscPattern> msc;

  // Throws InvalidArgument if a pattern is malformed or uses an op not in S.
  void validate() const;
};

// posix, commit, commit-relaxed, session, mpiio.
ModelDef load_builtin_model(std::string_view name);
std::vector<std::string> builtin_model_names();

}  // namespace scnf::model
