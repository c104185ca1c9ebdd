#pragma once

#include <cmath>
#include <cstdint>

namespace scnf::sim {

// Simulated time in picoseconds. Integer time keeps event ordering exact and
// runs reproducible across platforms.
using SimTime = std::int64_t;

inline constexpr SimTime kPicosPerSecond = 1'000'000'000'000;

inline SimTime from_seconds(double s) { return static_cast<SimTime>(std::llround(s * 1e12)); }
inline double to_seconds(SimTime t) { return static_cast<double>(t) / 1e12; }

// Time to move `bytes` at `bytes_per_second`.
inline SimTime transfer_time(std::uint64_t bytes, double bytes_per_second) {
  return from_seconds(static_cast<double>(bytes) / bytes_per_second);
}

}  // namespace scnf::sim
