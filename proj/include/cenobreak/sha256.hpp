#pragma once
#include <cstdint>
#include <string>

namespace cenobreak {

/// Incremental SHA-256. Used to fingerprint input files in tool metadata.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  /// Finalizes and returns the lowercase hex digest. The object must not be
  /// updated afterwards.
  std::string hex_digest();

  static std::string of_string(const std::string& s);
  /// Digest of a file's bytes; throws std::runtime_error if unreadable.
  static std::string of_file(const std::string& path);

 private:
  void process_block(const std::uint8_t* block);
  std::uint32_t state_[8];
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
  std::uint64_t total_len_ = 0;
  bool finalized_ = false;
};

}  // namespace cenobreak
