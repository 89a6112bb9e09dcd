// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mito/geometry.hpp"

namespace mito {

enum class Label { MITOTIC, HARD_NEGATIVE };

std::string to_string(Label label);
Label label_from_string(std::string_view s);

// Smallest slide (per axis) that can still yield a default-sized tile.
inline constexpr int kMinSlideSidePx = 224;
inline constexpr int kAnnotationBoxSidePx = 50;

struct SlideInfo {
  std::string slide_id;
  std::string patient_id;
  int width_px = 0;
  int height_px = 0;
  std::filesystem::path image_path;
  std::string tumor_type;
  std::string species;
  std::string scanner;
};

struct AnnotationRecord {
  std::string annotation_id;
  std::string slide_id;
  Box box;  // half-open pixel intervals, exactly 50x50
  Label label = Label::HARD_NEGATIVE;
};

struct Provenance {
  std::string annotations_digest;
  std::string metadata_digest;
  std::string parsed_at;  // informational only; excluded from digests
};

// Validated, immutable view of a dataset: slides sorted by slide_id,
// annotations sorted by annotation_id, every annotation resolving to a slide.
class Manifest {
 public:
  Manifest() = default;
  Manifest(std::vector<SlideInfo> slides,
           std::vector<AnnotationRecord> annotations, Provenance provenance);

  const std::vector<SlideInfo>& slides() const { return slides_; }
  const std::vector<AnnotationRecord>& annotations() const {
    return annotations_;
  }
  const Provenance& provenance() const { return provenance_; }

  const SlideInfo* find_slide(const std::string& slide_id) const;
  const SlideInfo& slide_for(const AnnotationRecord& rec) const;

  std::vector<std::string> patient_ids() const;  // sorted, deduplicated

  // Keeps only the slides of the given patients (and their annotations).
  Manifest restricted_to_patients(const std::vector<std::string>& patients) const;

  // Digest over slides and annotations (not the parse timestamp), so a
  // re-parse of identical inputs fingerprints identically.
  std::string content_digest() const;

 private:
  std::vector<SlideInfo> slides_;
  std::vector<AnnotationRecord> annotations_;
  Provenance provenance_;
  std::unordered_map<std::string, size_t> slide_index_;
};

// Newline-delimited record serialization; parse(write(m)) is a fixed point.
std::string manifest_to_string(const Manifest& m);
Manifest manifest_from_string(std::string_view text);
void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace mito
