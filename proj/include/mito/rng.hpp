// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "mito/digest.hpp"
#include "mito/util.hpp"

namespace mito {

// Counter-based deterministic generator (splitmix64 core). Streams are keyed
// by (seed, string id, replica, stream label), so independent work items draw
// from independent sequences and results do not depend on scheduling order.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : state_(key) {}

  static uint64_t derive_key(uint64_t seed, std::string_view id,
                             uint64_t replica = 0,
                             std::string_view stream = {}) {
    Fnv1a h;
    h.update(seed).update(id).update(replica).update(stream);
    return h.value();
  }

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform over the inclusive range [lo, hi], unbiased via rejection.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw Error("uniform_int: empty range");
    const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    if (span == 0) return static_cast<int>(next_u64());  // full 64-bit range
    const uint64_t reject_above = UINT64_MAX - (UINT64_MAX % span + 1) % span;
    uint64_t x = next_u64();
    while (x > reject_above) x = next_u64();
    return static_cast<int>(lo + static_cast<int64_t>(x % span));
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform_real();
    const double u2 = uniform_real();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mito
