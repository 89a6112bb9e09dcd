// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/manifest.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mito/digest.hpp"
#include "mito/util.hpp"

namespace mito {

using nlohmann::json;

std::string to_string(Label label) {
  return label == Label::MITOTIC ? "mitotic" : "hard_negative";
}

Label label_from_string(std::string_view s) {
  if (s == "mitotic") return Label::MITOTIC;
  if (s == "hard_negative") return Label::HARD_NEGATIVE;
  throw Error("unknown label: " + std::string(s));
}

Manifest::Manifest(std::vector<SlideInfo> slides,
                   std::vector<AnnotationRecord> annotations,
                   Provenance provenance)
    : slides_(std::move(slides)),
      annotations_(std::move(annotations)),
      provenance_(std::move(provenance)) {
  std::sort(slides_.begin(), slides_.end(),
            [](const SlideInfo& a, const SlideInfo& b) {
              return a.slide_id < b.slide_id;
            });
  std::sort(annotations_.begin(), annotations_.end(),
            [](const AnnotationRecord& a, const AnnotationRecord& b) {
              return a.annotation_id < b.annotation_id;
            });
  for (size_t i = 0; i < slides_.size(); ++i) {
    if (i > 0 && slides_[i].slide_id == slides_[i - 1].slide_id) {
      throw Error("duplicate slide_id: " + slides_[i].slide_id);
    }
    slide_index_[slides_[i].slide_id] = i;
  }
  for (size_t i = 0; i < annotations_.size(); ++i) {
    const auto& rec = annotations_[i];
    if (i > 0 && rec.annotation_id == annotations_[i - 1].annotation_id) {
      throw Error("duplicate annotation_id: " + rec.annotation_id);
    }
    if (!slide_index_.contains(rec.slide_id)) {
      throw Error("annotation " + rec.annotation_id +
                  " references unknown slide " + rec.slide_id);
    }
  }
}

const SlideInfo* Manifest::find_slide(const std::string& slide_id) const {
  auto it = slide_index_.find(slide_id);
  return it == slide_index_.end() ? nullptr : &slides_[it->second];
}

const SlideInfo& Manifest::slide_for(const AnnotationRecord& rec) const {
  const SlideInfo* slide = find_slide(rec.slide_id);
  if (slide == nullptr) {
    throw Error("annotation " + rec.annotation_id +
                " references unknown slide " + rec.slide_id);
  }
  return *slide;
}

std::vector<std::string> Manifest::patient_ids() const {
  std::set<std::string> ids;
  for (const auto& slide : slides_) ids.insert(slide.patient_id);
  return {ids.begin(), ids.end()};
}

Manifest Manifest::restricted_to_patients(
    const std::vector<std::string>& patients) const {
  std::set<std::string> keep(patients.begin(), patients.end());
  std::vector<SlideInfo> slides;
  std::set<std::string> kept_slides;
  for (const auto& slide : slides_) {
    if (keep.contains(slide.patient_id)) {
      slides.push_back(slide);
      kept_slides.insert(slide.slide_id);
    }
  }
  std::vector<AnnotationRecord> annotations;
  for (const auto& rec : annotations_) {
    if (kept_slides.contains(rec.slide_id)) annotations.push_back(rec);
  }
  return Manifest(std::move(slides), std::move(annotations), provenance_);
}

namespace {

json slide_to_json(const SlideInfo& s) {
  return json{{"kind", "slide"},
              {"slide_id", s.slide_id},
              {"patient_id", s.patient_id},
              {"width_px", s.width_px},
              {"height_px", s.height_px},
              {"image_path", s.image_path.string()},
              {"tumor_type", s.tumor_type},
              {"species", s.species},
              {"scanner", s.scanner}};
}

json annotation_to_json(const AnnotationRecord& a) {
  return json{{"kind", "annotation"},
              {"annotation_id", a.annotation_id},
              {"slide_id", a.slide_id},
              {"box", {a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max}},
              {"label", to_string(a.label)}};
}

}  // namespace

std::string Manifest::content_digest() const {
  Fnv1a h;
  for (const auto& slide : slides_) h.update(slide_to_json(slide).dump());
  for (const auto& rec : annotations_) h.update(annotation_to_json(rec).dump());
  return h.hex();
}

std::string manifest_to_string(const Manifest& m) {
  std::ostringstream out;
  out << json{{"kind", "provenance"},
              {"annotations_digest", m.provenance().annotations_digest},
              {"metadata_digest", m.provenance().metadata_digest},
              {"parsed_at", m.provenance().parsed_at}}
             .dump()
      << '\n';
  for (const auto& slide : m.slides()) out << slide_to_json(slide).dump() << '\n';
  for (const auto& rec : m.annotations()) {
    out << annotation_to_json(rec).dump() << '\n';
  }
  return out.str();
}

Manifest manifest_from_string(std::string_view text) {
  Provenance provenance;
  std::vector<SlideInfo> slides;
  std::vector<AnnotationRecord> annotations;
  size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("manifest line " + std::to_string(line_no) +
                  " is not valid JSON: " + e.what());
    }
    const std::string kind = rec.at("kind").get<std::string>();
    if (kind == "provenance") {
      provenance.annotations_digest =
          rec.at("annotations_digest").get<std::string>();
      provenance.metadata_digest = rec.at("metadata_digest").get<std::string>();
      provenance.parsed_at = rec.at("parsed_at").get<std::string>();
    } else if (kind == "slide") {
      SlideInfo s;
      s.slide_id = rec.at("slide_id").get<std::string>();
      s.patient_id = rec.at("patient_id").get<std::string>();
      s.width_px = rec.at("width_px").get<int>();
      s.height_px = rec.at("height_px").get<int>();
      s.image_path = rec.at("image_path").get<std::string>();
      s.tumor_type = rec.at("tumor_type").get<std::string>();
      s.species = rec.at("species").get<std::string>();
      s.scanner = rec.at("scanner").get<std::string>();
      slides.push_back(std::move(s));
    } else if (kind == "annotation") {
      AnnotationRecord a;
      a.annotation_id = rec.at("annotation_id").get<std::string>();
      a.slide_id = rec.at("slide_id").get<std::string>();
      const auto& box = rec.at("box");
      a.box = Box{box.at(0).get<int>(), box.at(1).get<int>(),
                  box.at(2).get<int>(), box.at(3).get<int>()};
      a.label = label_from_string(rec.at("label").get<std::string>());
      annotations.push_back(std::move(a));
    } else {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": unknown record kind '" + kind + "'");
    }
  }
  return Manifest(std::move(slides), std::move(annotations),
                  std::move(provenance));
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  write_file(path, manifest_to_string(m));
}

Manifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_string(read_file(path));
}

}  // namespace mito
