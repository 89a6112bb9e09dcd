// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace mito {

// Axis-aligned pixel rectangle with half-open intervals [x_min, x_max) and
// [y_min, y_max). Two boxes sharing only an edge do not intersect.
struct Box {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  bool valid() const { return width() > 0 && height() > 0; }

  bool intersects(const Box& o) const {
    return x_min < o.x_max && o.x_min < x_max && y_min < o.y_max &&
           o.y_min < y_max;
  }

  bool contains(const Box& o) const {
    return x_min <= o.x_min && o.x_max <= x_max && y_min <= o.y_min &&
           o.y_max <= y_max;
  }

  bool operator==(const Box&) const = default;
};

// Inclusive integer interval [lo, hi]; empty when lo > hi.
struct Interval {
  int lo = 0;
  int hi = -1;

  bool empty() const { return lo > hi; }
  int count() const { return empty() ? 0 : hi - lo + 1; }
  int clamp(int v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool contains(int v) const { return lo <= v && v <= hi; }

  bool operator==(const Interval&) const = default;
};

}  // namespace mito
