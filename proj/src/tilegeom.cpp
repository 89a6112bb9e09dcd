// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/tilegeom.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "mito/rng.hpp"
#include "mito/util.hpp"

namespace mito {

using nlohmann::json;

void ShiftBounds::validate() const {
  if (tile_side_px <= 0 || box_side_px <= 0 || max_shift_px < 0) {
    throw Error("shift bounds must have positive sides and non-negative shift");
  }
  if (box_side_px > tile_side_px) {
    throw Error("annotation box (" + std::to_string(box_side_px) +
                ") larger than tile (" + std::to_string(tile_side_px) + ")");
  }
  if (max_shift_px + box_side_px / 2 > tile_side_px / 2) {
    throw Error("max shift " + std::to_string(max_shift_px) +
                " can push a " + std::to_string(box_side_px) +
                "px box out of a " + std::to_string(tile_side_px) + "px tile");
  }
}

std::string to_string(TileRole role) {
  return role == TileRole::TRAIN ? "train" : "eval";
}

TileRole tile_role_from_string(std::string_view s) {
  if (s == "train") return TileRole::TRAIN;
  if (s == "eval") return TileRole::EVAL;
  throw Error("unknown tile role: " + std::string(s));
}

TileOrigin expand_box(const Box& box, int tile_side) {
  // Integer center with floor rounding; documented and fixed.
  const int cx = (box.x_min + box.x_max) / 2;
  const int cy = (box.y_min + box.y_max) / 2;
  return TileOrigin{cx - tile_side / 2, cy - tile_side / 2};
}

Interval feasible_shift_interval_axis(int origin, int slide_extent,
                                      int tile_side, int max_shift) {
  if (slide_extent < tile_side) {
    throw Error("slide extent " + std::to_string(slide_extent) +
                " cannot hold a " + std::to_string(tile_side) + "px tile");
  }
  const int lo = std::max(-max_shift, -origin);
  const int hi = std::min(max_shift, slide_extent - tile_side - origin);
  return Interval{lo, hi};
}

std::pair<Interval, Interval> feasible_shift_interval(
    const TileOrigin& origin, const SlideInfo& slide,
    const ShiftBounds& bounds) {
  return {feasible_shift_interval_axis(origin.x, slide.width_px,
                                       bounds.tile_side_px,
                                       bounds.max_shift_px),
          feasible_shift_interval_axis(origin.y, slide.height_px,
                                       bounds.tile_side_px,
                                       bounds.max_shift_px)};
}

std::pair<int, int> sample_shift(const Interval& interval_x,
                                 const Interval& interval_y, uint64_t key) {
  if (interval_x.empty() || interval_y.empty()) {
    throw Error("cannot sample a shift from an empty interval");
  }
  CounterRng rng(key);
  const int dx = rng.uniform_int(interval_x.lo, interval_x.hi);
  const int dy = rng.uniform_int(interval_y.lo, interval_y.hi);
  return {dx, dy};
}

uint64_t tile_rng_key(uint64_t global_seed, std::string_view annotation_id,
                      int replica_index) {
  return CounterRng::derive_key(global_seed, annotation_id,
                                static_cast<uint64_t>(replica_index), "shift");
}

namespace {

TileSpec make_tile_spec(const AnnotationRecord& rec, const SlideInfo& slide,
                        const ShiftBounds& bounds, uint64_t global_seed,
                        int replica, ShiftMode shift_mode) {
  const TileOrigin unshifted = expand_box(rec.box, bounds.tile_side_px);
  const auto [ix, iy] = feasible_shift_interval(unshifted, slide, bounds);
  TileSpec tile;
  tile.annotation_id = rec.annotation_id;
  tile.slide_id = rec.slide_id;
  tile.tile_side_px = bounds.tile_side_px;
  tile.label = rec.label;
  tile.replica_index = replica;
  tile.rng_seed = tile_rng_key(global_seed, rec.annotation_id, replica);
  if (shift_mode == ShiftMode::CENTERED) {
    // Closest feasible shift to zero; exactly zero for interior boxes.
    tile.shift_x = ix.clamp(0);
    tile.shift_y = iy.clamp(0);
  } else {
    std::tie(tile.shift_x, tile.shift_y) =
        sample_shift(ix, iy, tile.rng_seed);
  }
  tile.origin_x = unshifted.x + tile.shift_x;
  tile.origin_y = unshifted.y + tile.shift_y;
  return tile;
}

// slide_id -> rectangles a negative tile must not touch.
std::unordered_map<std::string, std::vector<Box>> boxes_by_slide(
    std::span<const Box> boxes, std::span<const std::string> slide_ids) {
  std::unordered_map<std::string, std::vector<Box>> out;
  for (size_t i = 0; i < boxes.size(); ++i) out[slide_ids[i]].push_back(boxes[i]);
  return out;
}

std::vector<char> overlap_flags(
    std::span<const TileSpec> tiles,
    const std::unordered_map<std::string, std::vector<Box>>& positive_rects) {
  std::vector<char> hit(tiles.size(), 0);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(tiles.size()); ++i) {
    const TileSpec& tile = tiles[i];
    if (tile.label != Label::HARD_NEGATIVE) continue;
    auto it = positive_rects.find(tile.slide_id);
    if (it == positive_rects.end()) continue;
    const Box rect = tile.rect();
    for (const Box& positive : it->second) {
      if (rect.intersects(positive)) {
        hit[i] = 1;
        break;
      }
    }
  }
  return hit;
}

}  // namespace

PruneResult prune_overlapping_negatives(
    std::vector<TileSpec> tiles, std::span<const AnnotationRecord> positives) {
  std::vector<Box> boxes;
  std::vector<std::string> slide_ids;
  for (const auto& rec : positives) {
    if (rec.label != Label::MITOTIC) continue;
    boxes.push_back(rec.box);
    slide_ids.push_back(rec.slide_id);
  }
  const auto rects = boxes_by_slide(boxes, slide_ids);
  const auto hit = overlap_flags(tiles, rects);
  PruneResult result;
  for (size_t i = 0; i < tiles.size(); ++i) {
    (hit[i] ? result.pruned : result.kept).push_back(std::move(tiles[i]));
  }
  return result;
}

std::vector<TileSpec> generate_tiles(const Manifest& manifest, TileRole role,
                                     int replicas, const ShiftBounds& bounds,
                                     uint64_t global_seed,
                                     const TileGenOptions& options) {
  bounds.validate();
  if (replicas < 1) throw Error("replicas must be >= 1");
  if (bounds.box_side_px != kAnnotationBoxSidePx) {
    // Tiles are generated from validated 50px annotation boxes.
    throw Error("box_side_px must be " + std::to_string(kAnnotationBoxSidePx));
  }
  const auto& annotations = manifest.annotations();
  const ShiftMode shift_mode =
      role == TileRole::EVAL ? options.shift_mode : ShiftMode::SHIFTED;

  std::vector<TileSpec> tiles(annotations.size() *
                              static_cast<size_t>(replicas));
  // Each annotation owns an independent RNG stream, so this is safe to run
  // with any thread count and the output slots fix the order.
#pragma omp parallel for schedule(static)
  for (long a = 0; a < static_cast<long>(annotations.size()); ++a) {
    const AnnotationRecord& rec = annotations[a];
    const SlideInfo& slide = manifest.slide_for(rec);
    for (int r = 0; r < replicas; ++r) {
      tiles[static_cast<size_t>(a) * replicas + r] =
          make_tile_spec(rec, slide, bounds, global_seed, r, shift_mode);
    }
  }

  std::unordered_map<std::string, std::vector<Box>> positive_rects;
  if (options.prune_mode == PruneMode::TILE_VS_TILE) {
    for (const auto& tile : tiles) {
      if (tile.label == Label::MITOTIC) {
        positive_rects[tile.slide_id].push_back(tile.rect());
      }
    }
  } else {
    for (const auto& rec : annotations) {
      if (rec.label == Label::MITOTIC) {
        positive_rects[rec.slide_id].push_back(rec.box);
      }
    }
  }
  const auto hit = overlap_flags(tiles, positive_rects);
  std::vector<TileSpec> kept;
  kept.reserve(tiles.size());
  for (size_t i = 0; i < tiles.size(); ++i) {
    if (!hit[i]) kept.push_back(std::move(tiles[i]));
  }
  return kept;
}

ImageBuffer read_tile_pixels(const TileSpec& spec, const SlideInfo& slide,
                             SlideCache* cache) {
  if (spec.slide_id != slide.slide_id) {
    throw Error("tile for slide " + spec.slide_id +
                " paired with slide info for " + slide.slide_id);
  }
  const Box rect = spec.rect();
  if (rect.x_min < 0 || rect.y_min < 0 || rect.x_max > slide.width_px ||
      rect.y_max > slide.height_px) {
    throw Error("tile [" + std::to_string(rect.x_min) + "," +
                std::to_string(rect.y_min) + ") on slide " + spec.slide_id +
                " leaves the slide bounds");
  }
  try {
    if (cache != nullptr) {
      return crop(*cache->get(slide.image_path), rect);
    }
    return crop(load_image(slide.image_path), rect);
  } catch (const Error& e) {
    throw Error("reading tile at (" + std::to_string(spec.origin_x) + "," +
                std::to_string(spec.origin_y) + ") on slide " + spec.slide_id +
                ": " + e.what());
  }
}

namespace {

json tile_to_json(const TileSpec& t) {
  return json{{"annotation_id", t.annotation_id},
              {"slide_id", t.slide_id},
              {"origin", {t.origin_x, t.origin_y}},
              {"tile_side_px", t.tile_side_px},
              {"shift", {t.shift_x, t.shift_y}},
              {"label", to_string(t.label)},
              {"replica_index", t.replica_index},
              {"rng_seed", hex64(t.rng_seed)}};
}

TileSpec tile_from_json(const json& rec) {
  TileSpec t;
  t.annotation_id = rec.at("annotation_id").get<std::string>();
  t.slide_id = rec.at("slide_id").get<std::string>();
  t.origin_x = rec.at("origin").at(0).get<int>();
  t.origin_y = rec.at("origin").at(1).get<int>();
  t.tile_side_px = rec.at("tile_side_px").get<int>();
  t.shift_x = rec.at("shift").at(0).get<int>();
  t.shift_y = rec.at("shift").at(1).get<int>();
  t.label = label_from_string(rec.at("label").get<std::string>());
  t.replica_index = rec.at("replica_index").get<int>();
  t.rng_seed = std::stoull(rec.at("rng_seed").get<std::string>(), nullptr, 16);
  return t;
}

}  // namespace

std::string tile_specs_to_string(std::span<const TileSpec> tiles) {
  std::ostringstream out;
  for (const auto& tile : tiles) out << tile_to_json(tile).dump() << '\n';
  return out.str();
}

std::vector<TileSpec> tile_specs_from_string(std::string_view text) {
  std::vector<TileSpec> tiles;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    tiles.push_back(tile_from_json(json::parse(line)));
  }
  return tiles;
}

void write_tile_specs(const std::filesystem::path& path,
                      std::span<const TileSpec> tiles) {
  write_file(path, tile_specs_to_string(tiles));
}

std::vector<TileSpec> read_tile_specs(const std::filesystem::path& path) {
  return tile_specs_from_string(read_file(path));
}

}  // namespace mito
