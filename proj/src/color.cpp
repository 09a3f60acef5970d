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

#include "recsynth/color.hpp"

#include <algorithm>
#include <set>

#include "recsynth/core.hpp"
#include "recsynth/errors.hpp"
#include "recsynth/json_io.hpp"

namespace recsynth {

const ColorVocabulary& ColorVocabulary::standard() {
  static const ColorVocabulary vocab({"black", "gray", "white", "red", "orange", "yellow",
                                      "green", "cyan", "blue", "purple", "pink", "brown"});
  return vocab;
}

ColorVocabulary ColorVocabulary::from_words(std::vector<std::string> words) {
  if (words.size() <= kVariantsPerEntity) {
    throw ContractError("color vocabulary needs more than " + std::to_string(kVariantsPerEntity) +
                        " colors, got " + std::to_string(words.size()));
  }
  std::set<std::string> seen;
  for (const auto& w : words) {
    if (w.empty() || contains_whitespace(w) || to_lower_ascii(w) != w) {
      throw ContractError("invalid color word '" + w + "'");
    }
    if (!seen.insert(w).second) throw ContractError("duplicate color word '" + w + "'");
  }
  return ColorVocabulary(std::move(words));
}

ColorVocabulary ColorVocabulary::from_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  if (!j.is_array()) throw ParseError(path.string() + ": expected a JSON array of color words");
  std::vector<std::string> words;
  for (const auto& w : j) {
    if (!w.is_string()) throw ParseError(path.string() + ": color words must be strings");
    words.push_back(w.get<std::string>());
  }
  return from_words(std::move(words));
}

std::optional<std::size_t> ColorVocabulary::index_of(std::string_view token) const {
  const std::string lower = to_lower_ascii(token);
  auto it = std::find(colors_.begin(), colors_.end(), lower);
  if (it == colors_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - colors_.begin());
}

bool ColorVocabulary::contains(std::string_view token) const {
  return index_of(token).has_value();
}

std::optional<std::size_t> detect_color(std::span<const std::string> query,
                                        const ColorVocabulary& vocab) {
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (vocab.contains(query[i])) return i;
  }
  return std::nullopt;
}

}  // namespace recsynth
