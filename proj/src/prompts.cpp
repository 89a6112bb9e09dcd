// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#include "mito/prompts.hpp"

#include <algorithm>

#include "mito/util.hpp"

namespace mito {

std::string to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::CLIP_LABEL: return "clip_label";
    case PromptMode::BLIP_BINARY_CAPTION: return "blip_binary_caption";
    case PromptMode::BLIP_COMPLETE_CAPTION: return "blip_complete_caption";
    case PromptMode::BLIP_VQA: return "blip_vqa";
  }
  throw Error("invalid prompt mode value");
}

PromptMode prompt_mode_from_string(std::string_view s) {
  if (s == "clip_label") return PromptMode::CLIP_LABEL;
  if (s == "blip_binary_caption") return PromptMode::BLIP_BINARY_CAPTION;
  if (s == "blip_complete_caption") return PromptMode::BLIP_COMPLETE_CAPTION;
  if (s == "blip_vqa") return PromptMode::BLIP_VQA;
  throw Error("unknown prompt mode: " + std::string(s));
}

namespace {

void require_metadata(PromptMode mode, const TileMetadata& metadata) {
  if (metadata.tumor_type.empty() || metadata.species.empty() ||
      metadata.scanner.empty()) {
    throw Error("prompt mode " + to_string(mode) +
                " needs tumor_type, species and scanner");
  }
}

std::vector<std::pair<std::string, std::string>> metadata_fields(
    Label label, const TileMetadata& metadata,
    const PromptTemplates& templates) {
  const std::string& word = label == Label::MITOTIC ? templates.label_positive
                                                    : templates.label_negative;
  return {{"label", word},
          {"tumor_type", metadata.tumor_type},
          {"species", metadata.species},
          {"scanner", metadata.scanner}};
}

}  // namespace

PromptBundle build_prompt(PromptMode mode, Label label,
                          const TileMetadata& metadata,
                          const PromptTemplates& templates) {
  PromptBundle bundle;
  bundle.mode = mode;
  bundle.label = label;
  const std::string& word = label == Label::MITOTIC ? templates.label_positive
                                                    : templates.label_negative;
  switch (mode) {
    case PromptMode::CLIP_LABEL:
    case PromptMode::BLIP_BINARY_CAPTION:
      bundle.target_text = word;
      break;
    case PromptMode::BLIP_COMPLETE_CAPTION:
      require_metadata(mode, metadata);
      bundle.target_text = substitute_placeholders(
          templates.complete_caption,
          metadata_fields(label, metadata, templates));
      break;
    case PromptMode::BLIP_VQA:
      require_metadata(mode, metadata);
      bundle.question = substitute_placeholders(
          templates.vqa_question, metadata_fields(label, metadata, templates));
      bundle.target_text =
          label == Label::MITOTIC ? templates.vqa_yes : templates.vqa_no;
      break;
  }
  return bundle;
}

ParsedPrediction parse_prediction(PromptMode mode, std::string_view generated,
                                  const PromptTemplates& templates) {
  const std::string text = trim(generated);
  std::string head = text;
  // Captions carry the label in the first comma-separated field; question
  // answers and bare labels are read whole.
  if (mode == PromptMode::BLIP_COMPLETE_CAPTION) {
    head = trim(split(text, ',').empty() ? "" : split(text, ',').front());
  }
  // Generated answers sometimes end with punctuation; drop one trailing mark.
  while (!head.empty() && (head.back() == '.' || head.back() == '!')) {
    head.pop_back();
  }
  head = trim(head);
  if (mode == PromptMode::BLIP_VQA) {
    if (casefold_equal(head, templates.vqa_yes)) {
      return {Label::MITOTIC, true};
    }
    if (casefold_equal(head, templates.vqa_no)) {
      return {Label::HARD_NEGATIVE, true};
    }
    return {Label::HARD_NEGATIVE, false};
  }
  if (casefold_equal(head, templates.label_positive)) {
    return {Label::MITOTIC, true};
  }
  if (casefold_equal(head, templates.label_negative)) {
    return {Label::HARD_NEGATIVE, true};
  }
  return {Label::HARD_NEGATIVE, false};
}

bool caption_exact_match(std::string_view generated, std::string_view target) {
  return casefold_equal(trim(generated), trim(target));
}

std::vector<bool> caption_field_matches(std::string_view generated,
                                        std::string_view target) {
  const auto generated_fields = split(generated, ',');
  const auto target_fields = split(target, ',');
  std::vector<bool> matches(target_fields.size(), false);
  for (size_t i = 0; i < target_fields.size(); ++i) {
    if (i < generated_fields.size()) {
      matches[i] =
          casefold_equal(trim(generated_fields[i]), trim(target_fields[i]));
    }
  }
  return matches;
}

}  // namespace mito
