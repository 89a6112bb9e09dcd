// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mito {

// FNV-1a 64-bit. Used for artifact fingerprints that guard against stale or
// mixed-up stage outputs, not for anything adversarial.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& update(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= static_cast<unsigned char>(v >> (8 * i));
      hash_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  uint64_t value() const { return hash_; }
  std::string hex() const;

 private:
  uint64_t hash_ = 0xcbf29ce484222325ULL;
};

inline uint64_t fnv1a64(std::string_view bytes) {
  return Fnv1a{}.update(bytes).value();
}

std::string hex64(uint64_t v);

// Digest of a file's raw bytes, formatted as 16 hex characters.
std::string file_digest(const std::filesystem::path& path);

}  // namespace mito
