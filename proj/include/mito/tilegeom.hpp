// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mito/geometry.hpp"
#include "mito/image.hpp"
#include "mito/manifest.hpp"

namespace mito {

struct ShiftBounds {
  int max_shift_px = 80;
  int tile_side_px = 224;
  int box_side_px = 50;

  // A shifted tile must still contain the whole annotation box:
  // max_shift + box_side/2 <= tile_side/2. Throws when violated.
  void validate() const;
};

enum class TileRole { TRAIN, EVAL };
enum class ShiftMode { SHIFTED, CENTERED };
enum class PruneMode { TILE_VS_BOX, TILE_VS_TILE };

std::string to_string(TileRole role);
TileRole tile_role_from_string(std::string_view s);

// One concrete crop: a tile_side x tile_side rectangle fully inside its
// slide, containing the source annotation box.
struct TileSpec {
  std::string annotation_id;
  std::string slide_id;
  int origin_x = 0;
  int origin_y = 0;
  int tile_side_px = 0;
  int shift_x = 0;
  int shift_y = 0;
  Label label = Label::HARD_NEGATIVE;
  int replica_index = 0;
  uint64_t rng_seed = 0;

  Box rect() const {
    return Box{origin_x, origin_y, origin_x + tile_side_px,
               origin_y + tile_side_px};
  }

  bool operator==(const TileSpec&) const = default;
};

struct TileOrigin {
  int x = 0;
  int y = 0;
};

// Top-left of the unshifted tile centered (up to floor rounding) on the box.
// May land outside the slide; clamping is feasible_shift_interval's job.
TileOrigin expand_box(const Box& box, int tile_side);

// Intersection of the +/-max_shift window with the shifts that keep the
// tile inside [0, extent). Never empty when extent >= tile_side.
Interval feasible_shift_interval_axis(int origin, int slide_extent,
                                      int tile_side, int max_shift);
std::pair<Interval, Interval> feasible_shift_interval(
    const TileOrigin& origin, const SlideInfo& slide,
    const ShiftBounds& bounds);

// Uniform integer draw per axis from a counter RNG keyed by the tile key.
std::pair<int, int> sample_shift(const Interval& interval_x,
                                 const Interval& interval_y, uint64_t key);

uint64_t tile_rng_key(uint64_t global_seed, std::string_view annotation_id,
                      int replica_index);

struct PruneResult {
  std::vector<TileSpec> kept;
  std::vector<TileSpec> pruned;
};

// Drops every hard-negative tile whose rectangle intersects any mitotic
// annotation box on the same slide (half-open semantics). Mitotic tiles are
// never pruned; input order is preserved.
PruneResult prune_overlapping_negatives(
    std::vector<TileSpec> tiles, std::span<const AnnotationRecord> positives);

struct TileGenOptions {
  ShiftMode shift_mode = ShiftMode::SHIFTED;
  PruneMode prune_mode = PruneMode::TILE_VS_BOX;
};

// expand -> feasible interval -> sample -> prune, for every annotation in the
// manifest. Parallel over annotations; output is ordered by (annotation_id,
// replica_index) and is a pure function of the arguments.
std::vector<TileSpec> generate_tiles(const Manifest& manifest, TileRole role,
                                     int replicas, const ShiftBounds& bounds,
                                     uint64_t global_seed,
                                     const TileGenOptions& options = {});

// Exact crop of the tile rectangle; no resampling.
ImageBuffer read_tile_pixels(const TileSpec& spec, const SlideInfo& slide,
                             SlideCache* cache = nullptr);

// One record per line; read(write(tiles)) round-trips exactly.
std::string tile_specs_to_string(std::span<const TileSpec> tiles);
std::vector<TileSpec> tile_specs_from_string(std::string_view text);
void write_tile_specs(const std::filesystem::path& path,
                      std::span<const TileSpec> tiles);
std::vector<TileSpec> read_tile_specs(const std::filesystem::path& path);

}  // namespace mito
