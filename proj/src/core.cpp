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

#include "recsynth/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "recsynth/errors.hpp"

namespace recsynth {

namespace {

// Decodes one UTF-8 code point starting at `i`. Returns the code point and
// sets `len`. Malformed sequences decode as a single byte.
char32_t decode_utf8(std::string_view s, std::size_t i, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) {
      len = 2;
      return (static_cast<char32_t>(b0 & 0x1F) << 6) | static_cast<char32_t>(c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1);
    const int c2 = c1 >= 0 ? cont(2) : -1;
    if (c2 >= 0) {
      len = 3;
      return (static_cast<char32_t>(b0 & 0x0F) << 12) | (static_cast<char32_t>(c1) << 6) |
             static_cast<char32_t>(c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1);
    const int c2 = c1 >= 0 ? cont(2) : -1;
    const int c3 = c2 >= 0 ? cont(3) : -1;
    if (c3 >= 0) {
      len = 4;
      return (static_cast<char32_t>(b0 & 0x07) << 18) | (static_cast<char32_t>(c1) << 12) |
             (static_cast<char32_t>(c2) << 6) | static_cast<char32_t>(c3);
    }
  }
  len = 1;
  return b0;
}

// White_Space property from the Unicode character database.
bool is_unicode_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

std::string format_box(const BBox& b) {
  std::ostringstream os;
  os << "[" << b.x_min << ", " << b.y_min << ", " << b.x_max << ", " << b.y_max << "]";
  return os.str();
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    const char32_t c = decode_utf8(text, i, len);
    if (is_unicode_space(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(i, len));
    }
    i += len;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool contains_whitespace(std::string_view token) {
  std::size_t i = 0;
  while (i < token.size()) {
    std::size_t len = 1;
    if (is_unicode_space(decode_utf8(token, i, len))) return true;
    i += len;
  }
  return false;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

BBox box_union(const BBox& a, const BBox& b) {
  return BBox{std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min),
              std::max(a.x_max, b.x_max), std::max(a.y_max, b.y_max)};
}

Tokens query_text(const Annotation& annotation, std::size_t entity_index) {
  if (entity_index >= annotation.entities.size()) {
    throw ContractError("entity index " + std::to_string(entity_index) + " out of range for " +
                        std::to_string(annotation.entities.size()) + " entities in '" +
                        annotation.id + "'");
  }
  const Span& span = annotation.entities[entity_index].span;
  const auto& tokens = annotation.caption.tokens;
  if (span.begin >= span.end || span.end > tokens.size()) {
    throw ContractError("entity " + std::to_string(entity_index) + " of '" + annotation.id +
                        "' has an invalid span");
  }
  return Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(span.begin),
                tokens.begin() + static_cast<std::ptrdiff_t>(span.end));
}

std::vector<Violation> validate_box(const BBox& box, const std::string& field,
                                    const std::optional<ImageRef>& image) {
  std::vector<Violation> out;
  const double coords[] = {box.x_min, box.y_min, box.x_max, box.y_max};
  if (!std::all_of(std::begin(coords), std::end(coords),
                   [](double v) { return std::isfinite(v); })) {
    out.push_back({field, std::string(rules::kNonFiniteBox), format_box(box)});
    return out;
  }
  if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max)) {
    out.push_back({field, std::string(rules::kDegenerateBox), format_box(box)});
  }
  if (std::any_of(std::begin(coords), std::end(coords), [](double v) { return v < 0; })) {
    out.push_back({field, std::string(rules::kNegativeCoordinate), format_box(box)});
  }
  if (image && image->has_dims() && *image->width > 0 && *image->height > 0 &&
      (box.x_max > *image->width || box.y_max > *image->height)) {
    out.push_back({field, std::string(rules::kBoxOutsideImage),
                   format_box(box) + " exceeds " + std::to_string(*image->width) + "x" +
                       std::to_string(*image->height)});
  }
  return out;
}

std::vector<Violation> validate(const Annotation& annotation) {
  std::vector<Violation> out;
  const auto& tokens = annotation.caption.tokens;
  if (annotation.id.empty()) {
    out.push_back({"id", std::string(rules::kEmptyId), ""});
  }
  if (tokens.empty()) {
    out.push_back({"caption", std::string(rules::kEmptyCaption), ""});
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string field = "caption[" + std::to_string(i) + "]";
    if (tokens[i].empty()) {
      out.push_back({field, std::string(rules::kEmptyToken), ""});
    } else if (contains_whitespace(tokens[i])) {
      out.push_back({field, std::string(rules::kTokenWhitespace), tokens[i]});
    }
  }
  if (annotation.image && annotation.image->has_dims() &&
      (*annotation.image->width <= 0 || *annotation.image->height <= 0)) {
    out.push_back({"image", std::string(rules::kBadImageDims),
                   std::to_string(*annotation.image->width) + "x" +
                       std::to_string(*annotation.image->height)});
  }
  if (annotation.entities.empty()) {
    out.push_back({"entities", std::string(rules::kNoEntities), ""});
  }
  for (std::size_t e = 0; e < annotation.entities.size(); ++e) {
    const Entity& entity = annotation.entities[e];
    const std::string prefix = "entities[" + std::to_string(e) + "]";
    const Span& span = entity.span;
    if (span.begin >= span.end) {
      out.push_back({prefix + ".span", std::string(rules::kEmptySpan),
                     std::to_string(span.first_inclusive()) + ".." +
                         std::to_string(span.last_inclusive())});
    } else if (span.end > tokens.size()) {
      out.push_back({prefix + ".span", std::string(rules::kSpanOutOfBounds),
                     "k=" + std::to_string(span.last_inclusive()) +
                         " > L=" + std::to_string(tokens.size())});
    }
    auto box_issues = validate_box(entity.box, prefix + ".box", annotation.image);
    out.insert(out.end(), box_issues.begin(), box_issues.end());
  }
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.field + ": " + v.rule;
    if (!v.detail.empty()) out += " (" + v.detail + ")";
  }
  return out;
}

}  // namespace recsynth
