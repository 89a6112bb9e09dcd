// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/splits.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "mito/rng.hpp"
#include "mito/util.hpp"

namespace mito {

using nlohmann::json;

std::string to_string(Partition p) {
  switch (p) {
    case Partition::TRAIN: return "train";
    case Partition::VAL: return "val";
    case Partition::TEST: return "test";
  }
  throw Error("invalid partition value");
}

Partition partition_from_string(std::string_view s) {
  if (s == "train") return Partition::TRAIN;
  if (s == "val") return Partition::VAL;
  if (s == "test") return Partition::TEST;
  throw Error("unknown partition: " + std::string(s));
}

std::vector<std::string> SplitPlan::patients_in(Partition p) const {
  std::vector<std::string> out;
  for (const auto& [patient, partition] : assignment) {
    if (partition == p) out.push_back(patient);
  }
  return out;
}

SplitPlan make_split(std::vector<std::string> patients, uint64_t seed) {
  std::sort(patients.begin(), patients.end());
  patients.erase(std::unique(patients.begin(), patients.end()),
                 patients.end());
  const size_t n = patients.size();
  if (n < 5) {
    throw Error("need at least 5 patients to split, got " + std::to_string(n));
  }
  SplitPlan plan;
  plan.seed = seed;
  CounterRng rng(CounterRng::derive_key(seed, "patient-shuffle", 0, "split"));
  for (size_t i = n - 1; i > 0; --i) {
    const size_t j =
        static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i)));
    std::swap(patients[i], patients[j]);
  }
  const auto n_train = static_cast<size_t>(
      std::lround(plan.fractions[0] * static_cast<double>(n)));
  const auto n_val = static_cast<size_t>(
      std::lround(plan.fractions[1] * static_cast<double>(n)));
  for (size_t i = 0; i < n; ++i) {
    const Partition p = i < n_train             ? Partition::TRAIN
                        : i < n_train + n_val   ? Partition::VAL
                                                : Partition::TEST;
    plan.assignment[patients[i]] = p;
  }
  return plan;
}

std::string split_plan_to_string(const SplitPlan& plan) {
  json assignment = json::object();
  for (const auto& [patient, partition] : plan.assignment) {
    assignment[patient] = to_string(partition);
  }
  const json doc{{"seed", plan.seed},
                 {"fractions", plan.fractions},
                 {"assignment", assignment}};
  return doc.dump(2) + "\n";
}

SplitPlan split_plan_from_string(std::string_view text) {
  const json doc = json::parse(text);
  SplitPlan plan;
  plan.seed = doc.at("seed").get<uint64_t>();
  const auto& fractions = doc.at("fractions");
  for (size_t i = 0; i < plan.fractions.size(); ++i) {
    plan.fractions[i] = fractions.at(i).get<double>();
  }
  for (const auto& [patient, partition] : doc.at("assignment").items()) {
    plan.assignment[patient] =
        partition_from_string(partition.get<std::string>());
  }
  return plan;
}

void write_split_plan(const std::filesystem::path& path,
                      const SplitPlan& plan) {
  write_file(path, split_plan_to_string(plan));
}

SplitPlan read_split_plan(const std::filesystem::path& path) {
  return split_plan_from_string(read_file(path));
}

const std::vector<TileSpec>& SplitDataset::tiles_in(Partition p) const {
  switch (p) {
    case Partition::TRAIN: return train;
    case Partition::VAL: return val;
    case Partition::TEST: return test;
  }
  throw Error("invalid partition value");
}

SplitDataset materialize_split(const Manifest& manifest, const SplitPlan& plan,
                               const ShiftBounds& bounds,
                               const MaterializeOptions& options) {
  SplitDataset dataset;
  dataset.plan = plan;
  for (const Partition p :
       {Partition::TRAIN, Partition::VAL, Partition::TEST}) {
    const Manifest part = manifest.restricted_to_patients(plan.patients_in(p));
    const bool is_train = p == Partition::TRAIN;
    auto tiles = generate_tiles(
        part, is_train ? TileRole::TRAIN : TileRole::EVAL,
        is_train ? options.train_replicas : options.eval_replicas, bounds,
        plan.seed, options.tilegen);
    PartitionCounts counts;
    counts.annotations = part.annotations().size();
    counts.tiles = tiles.size();
    switch (p) {
      case Partition::TRAIN:
        dataset.train = std::move(tiles);
        dataset.train_counts = counts;
        break;
      case Partition::VAL:
        dataset.val = std::move(tiles);
        dataset.val_counts = counts;
        break;
      case Partition::TEST:
        dataset.test = std::move(tiles);
        dataset.test_counts = counts;
        break;
    }
  }
  return dataset;
}

}  // namespace mito
