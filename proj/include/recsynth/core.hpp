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

// Annotation formalism shared by every pipeline stage: a caption made of
// tokens, and a non-empty list of entities, each one a contiguous token span
// of the caption paired with the pixel box of the object it refers to.
//
// Token spans are stored 0-based and half-open. Serialized forms use
// 1-based inclusive [j, k]; conversion happens only in the JSON layer.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recsynth {

using Tokens = std::vector<std::string>;

// Splits on Unicode whitespace after trimming. Punctuation stays attached.
// Input is UTF-8; invalid sequences are treated as ordinary bytes.
Tokens tokenize(std::string_view text);

// Plain single-space join.
std::string detokenize(std::span<const std::string> tokens);

// True if the token contains any Unicode whitespace code point.
bool contains_whitespace(std::string_view token);

std::string to_lower_ascii(std::string_view s);

struct BBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Coordinate-wise min/max hull of two boxes.
BBox box_union(const BBox& a, const BBox& b);

// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  bool contains(std::size_t index) const { return index >= begin && index < end; }

  // 1-based inclusive (j, k) as written in documentation and files.
  static Span from_inclusive(std::size_t j, std::size_t k) { return Span{j - 1, k}; }
  std::size_t first_inclusive() const { return begin + 1; }
  std::size_t last_inclusive() const { return end; }

  friend bool operator==(const Span&, const Span&) = default;
};

struct Caption {
  Tokens tokens;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Caption&, const Caption&) = default;
};

struct Entity {
  Span span;
  BBox box;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct ImageRef {
  std::string ref;
  std::optional<int> width;
  std::optional<int> height;

  bool has_dims() const { return width.has_value() && height.has_value(); }
  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct Annotation {
  std::string id;
  Caption caption;
  std::vector<Entity> entities;
  std::optional<ImageRef> image;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Caption tokens covered by entity `entity_index` (0-based).
// Throws ContractError if the index or the entity's span is out of range.
Tokens query_text(const Annotation& annotation, std::size_t entity_index);

struct Violation {
  std::string field;  // e.g. "entities[2].span"
  std::string rule;   // stable rule key, e.g. "span-out-of-bounds"
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace rules {
inline constexpr std::string_view kEmptyId = "empty-id";
inline constexpr std::string_view kEmptyCaption = "empty-caption";
inline constexpr std::string_view kEmptyToken = "empty-token";
inline constexpr std::string_view kTokenWhitespace = "token-whitespace";
inline constexpr std::string_view kNoEntities = "no-entities";
inline constexpr std::string_view kEmptySpan = "empty-span";
inline constexpr std::string_view kSpanOutOfBounds = "span-out-of-bounds";
inline constexpr std::string_view kNonFiniteBox = "non-finite-box";
inline constexpr std::string_view kDegenerateBox = "degenerate-box";
inline constexpr std::string_view kNegativeCoordinate = "negative-coordinate";
inline constexpr std::string_view kBoxOutsideImage = "box-outside-image";
inline constexpr std::string_view kBadImageDims = "bad-image-dims";
}  // namespace rules

// Box-only checks, reused by other record types.
std::vector<Violation> validate_box(const BBox& box, const std::string& field,
                                    const std::optional<ImageRef>& image = std::nullopt);

// Reports every broken invariant. Never throws.
std::vector<Violation> validate(const Annotation& annotation);

std::string describe(const std::vector<Violation>& violations);

}  // namespace recsynth
