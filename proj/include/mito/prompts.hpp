// Copyright (c) 2026 mitotile contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mito/manifest.hpp"

namespace mito {

enum class PromptMode {
  CLIP_LABEL,
  BLIP_BINARY_CAPTION,
  BLIP_COMPLETE_CAPTION,
  BLIP_VQA,
};

std::string to_string(PromptMode mode);
PromptMode prompt_mode_from_string(std::string_view s);

struct TileMetadata {
  std::string tumor_type;
  std::string species;
  std::string scanner;
};

// Text templates with {species} / {tumor_type} / {scanner} / {label}
// placeholders. Stored in the experiment config so prompt ablations are
// declarative. defaults() carries the standard templates.
struct PromptTemplates {
  std::string vqa_question =
      "This is an image of {species} {tumor_type} taken using scanner "
      "{scanner}. Is there mitosis in the image?";
  std::string complete_caption = "{label}, {tumor_type}, {species}, {scanner}";
  std::string label_positive = "mitotic";
  std::string label_negative = "nonmitotic";
  std::string vqa_yes = "yes";
  std::string vqa_no = "no";

  static PromptTemplates defaults() { return {}; }
  bool operator==(const PromptTemplates&) const = default;
};

// The text side of one sample: a class text or caption, or a
// (question, answer) pair for question answering.
struct PromptBundle {
  PromptMode mode = PromptMode::CLIP_LABEL;
  std::optional<std::string> question;
  std::string target_text;
  Label label = Label::HARD_NEGATIVE;

  bool operator==(const PromptBundle&) const = default;
};

// Exact template instantiation for the given mode and label. Metadata fields
// must be non-empty for COMPLETE_CAPTION and VQA; other modes ignore them.
PromptBundle build_prompt(PromptMode mode, Label label,
                          const TileMetadata& metadata,
                          const PromptTemplates& templates =
                              PromptTemplates::defaults());

struct ParsedPrediction {
  Label label = Label::HARD_NEGATIVE;
  bool parse_ok = false;
};

// Total function mapping generated text back to a label. Case-insensitive and
// whitespace-trimmed; VQA wants a leading yes/no, captions want the first
// comma-separated field to be a label word. Anything else parses as
// HARD_NEGATIVE with parse_ok=false.
ParsedPrediction parse_prediction(PromptMode mode, std::string_view generated,
                                  const PromptTemplates& templates =
                                      PromptTemplates::defaults());

// True iff the strings are equal after trimming and case-folding.
bool caption_exact_match(std::string_view generated, std::string_view target);

// Per-field diagnostic: comma-split both strings and compare field-wise.
// Missing fields count as mismatches.
std::vector<bool> caption_field_matches(std::string_view generated,
                                        std::string_view target);

}  // namespace mito
