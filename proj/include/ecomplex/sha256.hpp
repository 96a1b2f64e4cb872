#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace ecomplex {

// Plain SHA-256; enough for artifact manifests, not a crypto library.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  std::string hex_digest();  // finalizes

  static std::string of_string(const std::string& data);
  static std::string of_file(const std::string& path);  // throws when unreadable

 private:
  void process_block(const std::uint8_t* block);
  std::uint32_t state_[8];
  std::uint64_t bit_count_ = 0;
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
};

}  // namespace ecomplex
