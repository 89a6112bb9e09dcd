// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/digest.hpp"

#include <cstdio>

#include "mito/util.hpp"

namespace mito {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string Fnv1a::hex() const { return hex64(hash_); }

std::string file_digest(const std::filesystem::path& path) {
  return hex64(fnv1a64(read_file(path)));
}

}  // namespace mito
