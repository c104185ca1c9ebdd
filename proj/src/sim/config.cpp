#include "scnf/sim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "scnf/common/error.hpp"

namespace scnf::sim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw Error(Errc::Config, "key '" + key + "': expected " + want + ", got '" + value + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view source) {
  KeyValueConfig kv;
  kv.source_ = std::string(source);
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = kv.source_ + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw Error(Errc::Config, where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(Errc::Config, where + ": empty key");
    if (kv.values_.count(key)) throw Error(Errc::Config, where + ": duplicate key '" + key + "'");
    kv.values_[key] = value;
  }
  const auto version = kv.take("version");
  if (!version) throw Error(Errc::Config, kv.source_ + ": missing 'version' entry");
  int major = 0;
  const char* b = version->data();
  const char* e = b + version->size();
  auto [ptr, ec] = std::from_chars(b, e, major);
  if (ec != std::errc{} || (ptr != e && *ptr != '.')) bad_value("version", *version, "a version number");
  if (major != kMajorVersion) {
    throw Error(Errc::Config, kv.source_ + ": unsupported config version " + *version);
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Config, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  taken_.erase(key);
}

std::optional<std::string> KeyValueConfig::take(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  taken_.insert(key);
  return it->second;
}

double KeyValueConfig::take_double(const std::string& key, double fallback) {
  auto v = take(key);
  if (!v) return fallback;
  double out = 0;
  const char* b = v->data();
  const char* e = b + v->size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc{} || ptr != e) bad_value(key, *v, "a number");
  return out;
}

std::uint64_t KeyValueConfig::take_uint(const std::string& key, std::uint64_t fallback) {
  auto v = take(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const char* b = v->data();
  const char* e = b + v->size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc{} || ptr != e) bad_value(key, *v, "a non-negative integer");
  return out;
}

std::string KeyValueConfig::take_string(const std::string& key, const std::string& fallback) {
  return take(key).value_or(fallback);
}

std::vector<std::string> KeyValueConfig::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!taken_.count(k)) out.push_back(k);
  }
  return out;
}

void SimConfig::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0)) throw Error(Errc::Config, std::string(name) + " must be > 0");
  };
  auto non_negative = [](const char* name, double v) {
    if (!(v >= 0)) throw Error(Errc::Config, std::string(name) + " must be >= 0");
  };
  non_negative("rpc_latency", rpc_latency);
  non_negative("rpc_per_byte", rpc_per_byte);
  positive("ssd_write_bw", ssd_write_bw);
  positive("ssd_read_bw", ssd_read_bw);
  non_negative("ssd_op_latency", ssd_op_latency);
  positive("pfs_read_bw", pfs_read_bw);
  positive("pfs_write_bw", pfs_write_bw);
  positive("mem_bw", mem_bw);
  non_negative("server_service_time", server_service_time);
  if (server_workers < 1) throw Error(Errc::Config, "server_workers must be >= 1");
}

SimConfig SimConfig::from(KeyValueConfig& kv) {
  SimConfig c;
  c.rpc_latency = kv.take_double("rpc_latency", c.rpc_latency);
  c.rpc_per_byte = kv.take_double("rpc_per_byte", c.rpc_per_byte);
  c.ssd_write_bw = kv.take_double("ssd_write_bw", c.ssd_write_bw);
  c.ssd_read_bw = kv.take_double("ssd_read_bw", c.ssd_read_bw);
  c.ssd_op_latency = kv.take_double("ssd_op_latency", c.ssd_op_latency);
  c.pfs_read_bw = kv.take_double("pfs_read_bw", c.pfs_read_bw);
  c.pfs_write_bw = kv.take_double("pfs_write_bw", c.pfs_write_bw);
  c.mem_bw = kv.take_double("mem_bw", c.mem_bw);
  const auto workers = kv.take_uint("server_workers", c.server_workers);
  if (workers > 1'000'000) throw Error(Errc::Config, "server_workers out of range");
  c.server_workers = static_cast<std::uint32_t>(workers);
  c.server_service_time = kv.take_double("server_service_time", c.server_service_time);
  c.seed = kv.take_uint("seed", c.seed);
  c.validate();
  return c;
}

SimConfig SimConfig::load(const std::filesystem::path& path) {
  auto kv = KeyValueConfig::load(path);
  auto c = from(kv);
  if (auto rest = kv.unused(); !rest.empty()) {
    throw Error(Errc::Config, path.string() + ": unknown key '" + rest.front() + "'");
  }
  return c;
}

std::string SimConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "rpc_latency = " << rpc_latency << "\n"
      << "rpc_per_byte = " << rpc_per_byte << "\n"
      << "ssd_write_bw = " << ssd_write_bw << "\n"
      << "ssd_read_bw = " << ssd_read_bw << "\n"
      << "ssd_op_latency = " << ssd_op_latency << "\n"
      << "pfs_read_bw = " << pfs_read_bw << "\n"
      << "pfs_write_bw = " << pfs_write_bw << "\n"
      << "mem_bw = " << mem_bw << "\n"
      << "server_workers = " << server_workers << "\n"
      << "server_service_time = " << server_service_time << "\n"
      << "seed = " << seed << "\n";
  return out.str();
}

}  // namespace scnf::sim
