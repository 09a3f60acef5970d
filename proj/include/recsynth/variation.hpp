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

// Color-driven annotation variation: find the color attribute in one
// referring expression, swap it for sampled vocabulary colors and re-splice
// the caption. Boxes and every other entity are carried over untouched.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "recsynth/color.hpp"
#include "recsynth/core.hpp"
#include "recsynth/json_io.hpp"

namespace recsynth {

struct VariationRecord {
  std::string seed_id;
  std::size_t variant_index = 0;   // 1..kVariantsPerEntity
  std::size_t varied_entity = 0;   // 0-based; written 1-based
  std::size_t edited_token = 0;    // absolute caption position of the edit
  std::string original_color;      // lowercase vocabulary word
  std::string new_color;           // lowercase vocabulary word
  std::uint64_t rng_seed = 0;      // per-variant seed handed to image generation
  Annotation annotation;

  friend bool operator==(const VariationRecord&, const VariationRecord&) = default;
};

// Stable 64-bit hash of (global_seed, annotation id, entity index). Same value
// on every platform and independent of processing order.
std::uint64_t derive_entity_seed(std::uint64_t global_seed, std::string_view annotation_id,
                                 std::size_t entity_index);

// Seed for one variant, masked to 53 bits so it survives any JSON reader.
std::uint64_t derive_variant_seed(std::uint64_t entity_seed, std::size_t variant_index);

// Draws `count` pairwise-distinct colors uniformly without replacement from
// the vocabulary minus `original`. Deterministic in `rng_seed`.
std::vector<std::string> sample_colors(std::string_view original, std::size_t count,
                                       std::uint64_t rng_seed,
                                       const ColorVocabulary& vocab = ColorVocabulary::standard());

// Replaces query token `position` of entity `entity_index` with `replacement`.
// The replacement may hold any number of tokens (at least one); spans
// starting after the edit shift by the change in length and spans covering
// it grow or shrink with it.
Annotation replace_in_span(const Annotation& annotation, std::size_t entity_index,
                           std::size_t position, const Tokens& replacement);

// Single-token form of replace_in_span.
Annotation resplice(const Annotation& annotation, std::size_t entity_index,
                    std::size_t color_position, std::string_view new_token);

// Writes `color` with the capitalization pattern of `original`
// ("Red" -> "Blue", "RED" -> "BLUE", otherwise lowercase).
std::string match_case(std::string_view original, std::string_view color);

// All variants of one annotation: kVariantsPerEntity records for every entity
// whose query carries a vocabulary color, ordered by (entity, variant).
// Empty when no entity carries a color.
std::vector<VariationRecord> vary(const Annotation& annotation, const ColorVocabulary& vocab,
                                  std::uint64_t global_seed);

Json variation_to_json(const VariationRecord& r);
VariationRecord variation_from_json(const Json& j);

// Sort order used for every serialized variation stream.
bool variation_order(const VariationRecord& a, const VariationRecord& b);

}  // namespace recsynth
