// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mito/manifest.hpp"
#include "mito/tilegeom.hpp"

namespace mito {

enum class Partition { TRAIN, VAL, TEST };

std::string to_string(Partition p);
Partition partition_from_string(std::string_view s);

// Deterministic patient-level train/val/test assignment for one seed.
struct SplitPlan {
  uint64_t seed = 0;
  std::array<double, 3> fractions{0.6, 0.2, 0.2};
  std::map<std::string, Partition> assignment;  // patient_id -> partition

  std::vector<std::string> patients_in(Partition p) const;
};

// Shuffles patients with a seed-keyed generator, then assigns the first
// round(0.6n) to TRAIN, the next round(0.2n) to VAL, the remainder to TEST.
// Throws when fewer than 5 patients are available.
SplitPlan make_split(std::vector<std::string> patients, uint64_t seed);

std::string split_plan_to_string(const SplitPlan& plan);
SplitPlan split_plan_from_string(std::string_view text);
void write_split_plan(const std::filesystem::path& path, const SplitPlan& plan);
SplitPlan read_split_plan(const std::filesystem::path& path);

struct PartitionCounts {
  size_t annotations = 0;
  size_t tiles = 0;
};

struct SplitDataset {
  SplitPlan plan;
  std::vector<TileSpec> train;
  std::vector<TileSpec> val;
  std::vector<TileSpec> test;
  PartitionCounts train_counts;
  PartitionCounts val_counts;
  PartitionCounts test_counts;

  const std::vector<TileSpec>& tiles_in(Partition p) const;
};

struct MaterializeOptions {
  int train_replicas = 10;
  int eval_replicas = 1;
  TileGenOptions tilegen;
};

// Generates TRAIN tiles with train_replicas and VAL/TEST tiles with
// eval_replicas, each partition restricted to its own patients. The plan's
// seed keys all tile shifts.
SplitDataset materialize_split(const Manifest& manifest, const SplitPlan& plan,
                               const ShiftBounds& bounds,
                               const MaterializeOptions& options = {});

}  // namespace mito
