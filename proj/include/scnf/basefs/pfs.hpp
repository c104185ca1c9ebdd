#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace scnf::basefs {

// Backing parallel file system: a byte store per path. In size-only mode
// (store_data == false) contents are not kept and reads yield no bytes.
class PfsStore {
 public:
  explicit PfsStore(bool store_data) : store_data_(store_data) {}

  void write(const std::string& path, std::uint64_t offset, std::span<const std::uint8_t> data);
  void write_size(const std::string& path, std::uint64_t offset, std::uint64_t size);
  // Bytes [offset, offset+size); unwritten bytes read as zero.
  [[nodiscard]] std::vector<std::uint8_t> read(const std::string& path, std::uint64_t offset,
                                               std::uint64_t size) const;
  [[nodiscard]] std::uint64_t size(const std::string& path) const;
  [[nodiscard]] bool store_data() const { return store_data_; }

 private:
  struct File {
    std::uint64_t size = 0;
    std::vector<std::uint8_t> bytes;
  };
  bool store_data_;
  std::map<std::string, File> files_;
};

}  // namespace scnf::basefs
