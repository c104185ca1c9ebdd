#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scnf::sim {

// Flat `key = value` file with a mandatory `version = <major>[.<minor>]`
// entry. Keys are consumed by the components that understand them so the
// caller can reject leftovers.
class KeyValueConfig {
 public:
  static constexpr int kMajorVersion = 1;

  static KeyValueConfig parse(std::string_view text, std::string_view source = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> take(const std::string& key);
  double take_double(const std::string& key, double fallback);
  std::uint64_t take_uint(const std::string& key, std::uint64_t fallback);
  std::string take_string(const std::string& key, const std::string& fallback);

  // Keys present but never taken.
  [[nodiscard]] std::vector<std::string> unused() const;
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  std::set<std::string> taken_;
};

// Cost parameters. Defaults mirror config/calibration.conf.
struct SimConfig {
  double rpc_latency = 10e-6;          // s
  double rpc_per_byte = 0.25e-9;       // s/B
  double ssd_write_bw = 1e9;           // B/s
  double ssd_read_bw = 2e9;            // B/s
  double ssd_op_latency = 10e-6;       // s, charged per device request
  double pfs_read_bw = 2e9;            // B/s
  double pfs_write_bw = 2e9;           // B/s
  double mem_bw = 10e9;                // B/s
  std::uint32_t server_workers = 4;
  double server_service_time = 40e-6;  // s of worker time per request
  std::uint64_t seed = 1;

  void validate() const;

  // Reads every known key from `kv` (taking it), falling back to defaults.
  static SimConfig from(KeyValueConfig& kv);
  static SimConfig load(const std::filesystem::path& path);

  // `key = value` lines, one per field, in declaration order.
  [[nodiscard]] std::string to_text() const;
  bool operator==(const SimConfig&) const = default;
};

}  // namespace scnf::sim
