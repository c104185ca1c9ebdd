#include "scnf/basefs/pfs.hpp"

#include <algorithm>

namespace scnf::basefs {

void PfsStore::write(const std::string& path, std::uint64_t offset, std::span<const std::uint8_t> data) {
  auto& f = files_[path];
  f.size = std::max(f.size, offset + data.size());
  if (!store_data_) return;
  if (f.bytes.size() < offset + data.size()) f.bytes.resize(offset + data.size(), 0);
  std::copy(data.begin(), data.end(), f.bytes.begin() + static_cast<std::ptrdiff_t>(offset));
}

void PfsStore::write_size(const std::string& path, std::uint64_t offset, std::uint64_t size) {
  auto& f = files_[path];
  f.size = std::max(f.size, offset + size);
  if (store_data_ && f.bytes.size() < f.size) f.bytes.resize(f.size, 0);
}

std::vector<std::uint8_t> PfsStore::read(const std::string& path, std::uint64_t offset, std::uint64_t size) const {
  if (!store_data_) return {};
  std::vector<std::uint8_t> out(size, 0);
  auto it = files_.find(path);
  if (it == files_.end()) return out;
  const auto& bytes = it->second.bytes;
  for (std::uint64_t i = 0; i < size && offset + i < bytes.size(); ++i) out[i] = bytes[offset + i];
  return out;
}

std::uint64_t PfsStore::size(const std::string& path) const {
  auto it = files_.find(path);
  return it == files_.end() ? 0 : it->second.size;
}

}  // namespace scnf::basefs
