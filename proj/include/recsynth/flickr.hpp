// Copyright 2026 The recsynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Ingestion of Flickr30k-Entities-style sources: bracket-markup sentences
//   "[/EN#7/people A boy] eats [/EN#9/food an apple]"
// plus per-image box records keyed by chain id.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recsynth/color.hpp"
#include "recsynth/core.hpp"

namespace recsynth::flickr {

struct RawSentence {
  std::string image_ref;
  std::string markup;
};

struct EntityChunk {
  std::int64_t chain_id = 0;
  std::vector<std::string> types;
  Tokens words;

  friend bool operator==(const EntityChunk&, const EntityChunk&) = default;
};

struct ChunkSpan {
  EntityChunk chunk;
  Span span;  // into ParsedSentence::caption
};

struct ParsedSentence {
  Caption caption;
  std::vector<ChunkSpan> chunks;
};

// Grammar: a chunk is `[/EN#<digits>(/<label>)+ <word> (<word>)*]`; chunks
// do not nest; everything outside chunks is plain whitespace-separated
// tokens. Chunk brackets also end the neighbouring plain token.
// Throws ParseError carrying the byte offset of the problem.
ParsedSentence parse_sentence(const RawSentence& raw);

// Inverse of parse_sentence up to whitespace normalization: rebuilds markup
// from the caption and chunk spans.
std::string reconstruct_markup(const ParsedSentence& parsed);

// image_ref -> chain_id -> boxes, in file order.
using BoxIndex = std::map<std::string, std::map<std::int64_t, std::vector<BBox>>>;

// Box records JSONL: {image_ref, chain_id, box: [x_min, y_min, x_max, y_max]}.
// Degenerate or negative boxes are rejected with the line number.
BoxIndex load_box_records(const std::filesystem::path& path);

// Image dimensions JSONL: {image_ref, width, height}.
using DimsIndex = std::map<std::string, std::pair<int, int>>;
DimsIndex load_dims(const std::filesystem::path& path);

struct AttachResult {
  Annotation annotation;
  std::size_t dropped_boxless = 0;

  // False when no chunk had a box: the record cannot be used.
  bool eligible() const { return !annotation.entities.empty(); }
};

// Turns every chunk with at least one box into an entity. Several boxes for
// one chain collapse into their rectangular union; boxless chunks are
// dropped and counted.
AttachResult attach_boxes(const ParsedSentence& parsed, const std::string& annotation_id,
                          const std::map<std::int64_t, std::vector<BBox>>& chain_boxes,
                          std::optional<ImageRef> image = std::nullopt);

// True if some entity's query holds a vocabulary token (whole-token,
// case-insensitive).
bool has_color_entity(const Annotation& annotation, const ColorVocabulary& vocab);

// Order-preserving filter on has_color_entity.
std::vector<Annotation> select_color_seeds(const std::vector<Annotation>& corpus,
                                           const ColorVocabulary& vocab);

struct IngestOptions {
  bool only_color_seeds = false;
  std::size_t jobs = 1;
};

struct IngestStats {
  std::size_t files = 0;
  std::size_t sentences = 0;
  std::size_t chunks = 0;
  std::size_t dropped_boxless = 0;
  std::size_t ineligible = 0;
  std::size_t non_color = 0;
  std::size_t emitted = 0;
};

struct IngestResult {
  std::vector<Annotation> annotations;
  IngestStats stats;
};

// Reads every regular file in `sentences_dir` (sorted by name; image_ref is
// the file stem). Annotation ids are "<image_ref>_<line index>" with 0-based
// line indices.
IngestResult ingest_directory(const std::filesystem::path& sentences_dir, const BoxIndex& boxes,
                              const DimsIndex& dims, const ColorVocabulary& vocab,
                              const IngestOptions& options);

}  // namespace recsynth::flickr
