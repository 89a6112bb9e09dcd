// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/ingest.hpp"

#include <chrono>
#include <ctime>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "mito/digest.hpp"
#include "mito/util.hpp"

namespace mito {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Accepts integer or string ids and canonicalizes to a string.
std::string id_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error("id must be an integer or string, got: " + v.dump());
}

struct MetadataEntry {
  std::string tumor_type;
  std::string species;
  std::string scanner;
  std::string patient_id;  // may be empty; falls back to slide_id
};

// One CSV record with quoted-field support ("" escapes a quote).
std::vector<std::string> parse_csv_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

MetadataEntry metadata_from_json(const json& obj) {
  MetadataEntry e;
  e.tumor_type = obj.value("tumor_type", "");
  e.species = obj.value("species", "");
  e.scanner = obj.value("scanner", "");
  e.patient_id = obj.value("patient_id", "");
  return e;
}

std::unordered_map<std::string, MetadataEntry> parse_metadata(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, MetadataEntry> out;
  const std::string text = read_file(path);
  const std::string ext = to_lower(path.extension().string());
  if (ext == ".csv" || ext == ".tsv") {
    const auto lines = split(text, '\n');
    if (lines.empty()) throw Error("metadata file is empty: " + path.string());
    auto header = parse_csv_row(lines[0]);
    std::unordered_map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) {
      col[std::string(trim(header[i]))] = i;
    }
    for (const char* required : {"image_id", "tumor_type", "species", "scanner"}) {
      if (!col.contains(required)) {
        throw Error(std::string("metadata CSV is missing column '") + required +
                    "': " + path.string());
      }
    }
    for (size_t li = 1; li < lines.size(); ++li) {
      if (trim(lines[li]).empty()) continue;
      auto row = parse_csv_row(lines[li]);
      auto cell = [&](const char* name) -> std::string {
        auto it = col.find(name);
        if (it == col.end() || it->second >= row.size()) return "";
        return std::string(trim(row[it->second]));
      };
      MetadataEntry e;
      e.tumor_type = cell("tumor_type");
      e.species = cell("species");
      e.scanner = cell("scanner");
      e.patient_id = cell("patient_id");
      out[cell("image_id")] = std::move(e);
    }
    return out;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error("metadata file is not valid JSON: " + path.string() + ": " +
                e.what());
  }
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      out[key] = metadata_from_json(value);
    }
  } else if (doc.is_array()) {
    for (const auto& row : doc) {
      out[id_to_string(row.at("image_id"))] = metadata_from_json(row);
    }
  } else {
    throw Error("metadata JSON must be an object or array: " + path.string());
  }
  return out;
}

}  // namespace

IngestResult parse_annotations(const std::filesystem::path& annotations_path,
                               const std::filesystem::path& metadata_path) {
  json doc;
  try {
    doc = json::parse(read_file(annotations_path));
  } catch (const json::exception& e) {
    throw Error("annotation file is not valid JSON: " +
                annotations_path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("images") ||
      !doc.contains("annotations")) {
    throw Error("annotation file must contain 'images' and 'annotations': " +
                annotations_path.string());
  }
  const auto metadata = parse_metadata(metadata_path);

  IngestResult result;
  std::vector<SlideInfo> slides;
  std::unordered_map<std::string, SlideInfo> by_image_id;
  std::set<std::string> seen_slide_ids;

  const auto& images = doc.at("images");
  result.input_slide_count = images.size();
  for (const auto& img : images) {
    std::string image_id;
    try {
      image_id = id_to_string(img.at("id"));
    } catch (const std::exception& e) {
      result.rejected_slides.push_back({"<unknown>", e.what()});
      continue;
    }
    SlideInfo slide;
    const std::string file_name = img.value("file_name", "");
    slide.slide_id = file_name.empty()
                         ? "image_" + image_id
                         : std::filesystem::path(file_name).stem().string();
    if (!img.contains("width") || !img.contains("height") ||
        !img.at("width").is_number_integer() ||
        !img.at("height").is_number_integer()) {
      result.rejected_slides.push_back(
          {slide.slide_id, "image " + image_id + " lacks integer width/height"});
      continue;
    }
    slide.width_px = img.at("width").get<int>();
    slide.height_px = img.at("height").get<int>();
    if (slide.width_px < kMinSlideSidePx || slide.height_px < kMinSlideSidePx) {
      result.rejected_slides.push_back(
          {slide.slide_id,
           "slide is " + std::to_string(slide.width_px) + "×" +
               std::to_string(slide.height_px) + ", smaller than " +
               std::to_string(kMinSlideSidePx) + "×" +
               std::to_string(kMinSlideSidePx) + "; cannot yield any tile"});
      continue;
    }
    std::filesystem::path image_path(file_name);
    if (!file_name.empty() && image_path.is_relative()) {
      image_path = annotations_path.parent_path() / image_path;
    }
    slide.image_path = image_path;
    auto meta_it = metadata.find(image_id);
    if (meta_it == metadata.end()) {
      result.rejected_slides.push_back(
          {slide.slide_id, "no metadata entry for image id " + image_id});
      continue;
    }
    slide.tumor_type = meta_it->second.tumor_type;
    slide.species = meta_it->second.species;
    slide.scanner = meta_it->second.scanner;
    if (slide.tumor_type.empty() || slide.species.empty() ||
        slide.scanner.empty()) {
      result.rejected_slides.push_back(
          {slide.slide_id,
           "metadata for image id " + image_id +
               " has empty tumor_type/species/scanner"});
      continue;
    }
    slide.patient_id = meta_it->second.patient_id.empty()
                           ? slide.slide_id
                           : meta_it->second.patient_id;
    if (by_image_id.contains(image_id) ||
        seen_slide_ids.contains(slide.slide_id)) {
      result.rejected_slides.push_back(
          {slide.slide_id, "duplicate image id or slide id"});
      continue;
    }
    seen_slide_ids.insert(slide.slide_id);
    by_image_id[image_id] = slide;
    slides.push_back(std::move(slide));
  }

  std::vector<AnnotationRecord> annotations;
  std::set<std::string> seen_annotation_ids;
  const auto& raw_annotations = doc.at("annotations");
  result.input_annotation_count = raw_annotations.size();
  size_t ordinal = 0;
  for (const auto& ann : raw_annotations) {
    ++ordinal;
    AnnotationRecord rec;
    rec.annotation_id = ann.contains("id") ? id_to_string(ann.at("id"))
                                           : "ann_" + std::to_string(ordinal);
    auto reject = [&](const std::string& reason) {
      result.rejected_annotations.push_back({rec.annotation_id, reason});
    };
    if (seen_annotation_ids.contains(rec.annotation_id)) {
      reject("duplicate annotation_id");
      continue;
    }
    if (!ann.contains("image_id")) {
      reject("annotation lacks image_id");
      continue;
    }
    const std::string image_id = id_to_string(ann.at("image_id"));
    auto slide_it = by_image_id.find(image_id);
    if (slide_it == by_image_id.end()) {
      reject("references unknown image id " + image_id);
      continue;
    }
    rec.slide_id = slide_it->second.slide_id;
    if (!ann.contains("bbox") || !ann.at("bbox").is_array() ||
        ann.at("bbox").size() != 4) {
      reject("bbox must be [x_min, y_min, x_max, y_max]");
      continue;
    }
    const auto& bbox = ann.at("bbox");
    bool numeric = true;
    for (const auto& v : bbox) numeric = numeric && v.is_number();
    if (!numeric) {
      reject("bbox has non-numeric entries: " + bbox.dump());
      continue;
    }
    rec.box = Box{static_cast<int>(bbox.at(0).get<double>()),
                  static_cast<int>(bbox.at(1).get<double>()),
                  static_cast<int>(bbox.at(2).get<double>()),
                  static_cast<int>(bbox.at(3).get<double>())};
    if (rec.box.width() != kAnnotationBoxSidePx ||
        rec.box.height() != kAnnotationBoxSidePx) {
      reject("box is " + std::to_string(rec.box.width()) + "×" +
             std::to_string(rec.box.height()) + ", expected " +
             std::to_string(kAnnotationBoxSidePx) + "×" +
             std::to_string(kAnnotationBoxSidePx) + ": " + bbox.dump());
      continue;
    }
    if (rec.box.x_min < 0 || rec.box.y_min < 0 ||
        rec.box.x_max > slide_it->second.width_px ||
        rec.box.y_max > slide_it->second.height_px) {
      reject("box " + bbox.dump() + " leaves slide bounds " +
             std::to_string(slide_it->second.width_px) + "×" +
             std::to_string(slide_it->second.height_px));
      continue;
    }
    if (!ann.contains("category_id") ||
        !ann.at("category_id").is_number_integer()) {
      reject("annotation lacks integer category_id");
      continue;
    }
    const int category = ann.at("category_id").get<int>();
    if (category == 1) {
      rec.label = Label::MITOTIC;
    } else if (category == 2) {
      rec.label = Label::HARD_NEGATIVE;
    } else {
      reject("category_id must be 1 (mitotic) or 2 (hard negative), got " +
             std::to_string(category));
      continue;
    }
    seen_annotation_ids.insert(rec.annotation_id);
    annotations.push_back(std::move(rec));
  }

  Provenance provenance;
  provenance.annotations_digest = file_digest(annotations_path);
  provenance.metadata_digest = file_digest(metadata_path);
  provenance.parsed_at = utc_timestamp();
  result.manifest = Manifest(std::move(slides), std::move(annotations),
                             std::move(provenance));
  return result;
}

ManifestStats manifest_stats(const Manifest& m) {
  ManifestStats stats;
  stats.per_label[Label::MITOTIC] = 0;
  stats.per_label[Label::HARD_NEGATIVE] = 0;
  for (const auto& rec : m.annotations()) {
    ++stats.per_label[rec.label];
    const SlideInfo& slide = m.slide_for(rec);
    ++stats.per_patient[slide.patient_id];
    ++stats.per_stratum[{slide.tumor_type, slide.species, slide.scanner}];
  }
  return stats;
}

std::string stats_to_csv(const ManifestStats& stats) {
  std::ostringstream out;
  out << "section,key,count\n";
  for (const auto& [label, count] : stats.per_label) {
    out << "label," << to_string(label) << ',' << count << '\n';
  }
  for (const auto& [patient, count] : stats.per_patient) {
    out << "patient," << patient << ',' << count << '\n';
  }
  for (const auto& [stratum, count] : stats.per_stratum) {
    out << "stratum," << std::get<0>(stratum) << '|' << std::get<1>(stratum)
        << '|' << std::get<2>(stratum) << ',' << count << '\n';
  }
  return out.str();
}

std::string rejections_to_string(const std::vector<Rejection>& rejections) {
  std::ostringstream out;
  for (const auto& r : rejections) {
    out << json{{"record_id", r.record_id}, {"reason", r.reason}}.dump()
        << '\n';
  }
  return out.str();
}

void write_rejection_report(const std::filesystem::path& path,
                            const IngestResult& result) {
  std::ostringstream out;
  out << json{{"kind", "summary"},
              {"input_slides", result.input_slide_count},
              {"accepted_slides", result.accepted_slide_count()},
              {"rejected_slides", result.rejected_slides.size()},
              {"input_annotations", result.input_annotation_count},
              {"accepted_annotations", result.accepted_annotation_count()},
              {"rejected_annotations", result.rejected_annotations.size()}}
             .dump()
      << '\n';
  for (const auto& r : result.rejected_slides) {
    out << json{{"kind", "slide"},
                {"record_id", r.record_id},
                {"reason", r.reason}}
               .dump()
        << '\n';
  }
  for (const auto& r : result.rejected_annotations) {
    out << json{{"kind", "annotation"},
                {"record_id", r.record_id},
                {"reason", r.reason}}
               .dump()
        << '\n';
  }
  write_file(path, out.str());
}

}  // namespace mito
