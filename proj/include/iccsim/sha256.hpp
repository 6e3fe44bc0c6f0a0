#pragma once

#include <cstdint>
#include <string>

namespace iccsim {

// Minimal SHA-256, used for config fingerprints and output checksums.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, size_t len);
  void update(const std::string& s) { update(s.data(), s.size()); }
  std::string hex_digest();  // finalizes

  static std::string of(const std::string& data);
  static std::string of_file(const std::string& path);

 private:
  void process_block(const uint8_t* block);
  uint32_t state_[8];
  uint64_t length_ = 0;
  uint8_t buffer_[64];
  size_t buffered_ = 0;
};

}  // namespace iccsim
