// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mito/manifest.hpp"

namespace mito {

struct Rejection {
  std::string record_id;
  std::string reason;
};

struct IngestResult {
  Manifest manifest;
  std::vector<Rejection> rejected_slides;
  std::vector<Rejection> rejected_annotations;
  size_t input_slide_count = 0;
  size_t input_annotation_count = 0;

  size_t accepted_slide_count() const { return manifest.slides().size(); }
  size_t accepted_annotation_count() const {
    return manifest.annotations().size();
  }
};

// Parses a COCO-style annotation document (images with id/width/height/
// file_name; annotations with image_id, [x_min, y_min, x_max, y_max] corner
// bbox and category_id 1=mitotic / 2=hard negative) plus a per-image metadata
// table (JSON object/array or CSV) carrying tumor_type, species, scanner and
// optionally patient_id. Malformed records are collected, never dropped
// silently. Unreadable or structurally invalid files throw.
IngestResult parse_annotations(const std::filesystem::path& annotations_path,
                               const std::filesystem::path& metadata_path);

struct ManifestStats {
  std::map<Label, size_t> per_label;
  std::map<std::string, size_t> per_patient;
  // (tumor_type, species, scanner) -> count
  std::map<std::tuple<std::string, std::string, std::string>, size_t>
      per_stratum;
};

ManifestStats manifest_stats(const Manifest& m);
std::string stats_to_csv(const ManifestStats& stats);

std::string rejections_to_string(const std::vector<Rejection>& rejections);
void write_rejection_report(const std::filesystem::path& path,
                            const IngestResult& result);

}  // namespace mito
