#pragma once

// Random operation sequences checked against the byte oracles.

#include <random>
#include <string>

#include "byte_oracle.hpp"

namespace scnf::testing {

inline constexpr std::uint64_t kFuzzSpan = 512;

inline ByteRange random_range(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> start(0, kFuzzSpan - 1);
  std::uint64_t s = start(rng);
  std::uniform_int_distribution<std::uint64_t> len(1, std::min<std::uint64_t>(64, kFuzzSpan - s));
  return ByteRange(s, s + len(rng) - 1);
}

// Returns an empty string on success, otherwise a description of the first
// divergence.
inline std::string fuzz_global_tree(std::uint64_t seed, int max_ops = 64) {
  std::mt19937_64 rng(seed);
  interval::GlobalTree tree;
  OwnershipOracle oracle(kFuzzSpan);
  std::uniform_int_distribution<int> n_ops(1, max_ops);
  std::uniform_int_distribution<int> op(0, 9);
  std::uniform_int_distribution<std::uint32_t> who(0, 2);
  const int count = n_ops(rng);
  for (int i = 0; i < count; ++i) {
    const ByteRange r = random_range(rng);
    const ClientId c{who(rng), 0};
    const int k = op(rng);
    if (k < 5) {
      tree.insert({r, c});
      oracle.insert(r.start, r.end, c);
    } else if (k < 8) {
      auto got = tree.remove_if_owner(r, c);
      auto want = oracle.remove_if_owner(r.start, r.end, c);
      if (got != want) return "remove byte count mismatch at op " + std::to_string(i);
    } else {
      if (tree.query(r) != oracle.query(r.start, r.end)) {
        return "query mismatch at op " + std::to_string(i) + " range " + to_string(r);
      }
    }
    if (!disjoint_and_canonical(tree)) return "invariant broken at op " + std::to_string(i);
    auto bytes = expand(tree, kFuzzSpan);
    for (std::uint64_t b = 0; b < kFuzzSpan; ++b) {
      if (bytes[b] != oracle.at(b)) return "byte " + std::to_string(b) + " differs at op " + std::to_string(i);
    }
  }
  return {};
}

inline std::string fuzz_local_tree(std::uint64_t seed, int max_ops = 64) {
  std::mt19937_64 rng(seed);
  interval::LocalTree tree;
  LocalOracle oracle(kFuzzSpan);
  std::uniform_int_distribution<int> n_ops(1, max_ops);
  std::uniform_int_distribution<int> op(0, 11);
  std::uint64_t buffer_end = 0;
  const int count = n_ops(rng);
  for (int i = 0; i < count; ++i) {
    const ByteRange r = random_range(rng);
    const int k = op(rng);
    if (k < 5) {
      // Occasionally rewind the buffer cursor so buffer ranges get reused
      // and contiguity in only one coordinate shows up.
      if (k == 0) buffer_end = buffer_end / 2;
      const ByteRange buf(buffer_end, buffer_end + r.length() - 1);
      buffer_end += r.length();
      tree.insert_write(r, buf);
      oracle.write(r.start, r.end, buf.start);
    } else if (k < 8) {
      std::optional<Errc> got, want;
      try { tree.mark_attached(r); } catch (const Error& e) { got = e.code(); }
      try { oracle.mark_attached(r.start, r.end); } catch (const Error& e) { want = e.code(); }
      if (got != want) return "mark_attached outcome mismatch at op " + std::to_string(i);
    } else if (k == 8) {
      tree.clear_attached(r);
      oracle.clear_attached(r.start, r.end);
    } else if (k == 9 && i % 7 == 0) {
      tree.discard_unattached();
      oracle.discard_unattached();
    } else if (k == 9 && i % 7 == 1) {
      tree.erase(r);
      oracle.erase(r.start, r.end);
    } else {
      auto got = tree.lookup(r);
      // Oracle side: every written byte of r must be covered exactly once,
      // in order, with matching buffer offset and flag.
      std::size_t idx = 0;
      std::uint64_t seen = 0;
      for (std::uint64_t b = r.start; b <= r.end; ++b) {
        const auto& want = oracle.at(b);
        while (idx < got.size() && got[idx].file.end < b) ++idx;
        const bool covered = idx < got.size() && got[idx].file.contains(b);
        if (covered != want.has_value()) return "lookup coverage mismatch at byte " + std::to_string(b);
        if (!covered) continue;
        ++seen;
        const auto& m = got[idx];
        if (m.buffer.start + (b - m.file.start) != want->buffer || m.attached != want->attached) {
          return "lookup mapping mismatch at byte " + std::to_string(b);
        }
      }
      std::uint64_t total = 0;
      for (const auto& m : got) {
        if (!r.contains(m.file)) return "lookup result not clipped";
        total += m.file.length();
      }
      if (total != seen) return "lookup returned overlapping mappings";
    }
    if (!disjoint_and_canonical(tree)) return "invariant broken at op " + std::to_string(i);
    auto bytes = expand(tree, kFuzzSpan);
    for (std::uint64_t b = 0; b < kFuzzSpan; ++b) {
      if (bytes[b] != oracle.at(b)) return "byte " + std::to_string(b) + " differs at op " + std::to_string(i);
    }
  }
  return {};
}

}  // namespace scnf::testing
