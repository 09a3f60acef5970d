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

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace recsynth {

// Ordered set of single-token, lowercase color words used both to detect a
// color attribute in a referring expression and to sample replacements.
class ColorVocabulary {
 public:
  // black, gray, white, red, orange, yellow, green, cyan, blue, purple,
  // pink, brown.
  static const ColorVocabulary& standard();

  // Loads a JSON array of color words. Words must be lowercase, unique,
  // whitespace-free, and there must be more of them than
  // kVariantsPerEntity so every color has enough distinct replacements.
  static ColorVocabulary from_file(const std::filesystem::path& path);
  static ColorVocabulary from_words(std::vector<std::string> words);

  const std::vector<std::string>& colors() const { return colors_; }
  std::size_t size() const { return colors_.size(); }

  // Case-insensitive (ASCII) membership.
  bool contains(std::string_view token) const;
  std::optional<std::size_t> index_of(std::string_view token) const;

 private:
  explicit ColorVocabulary(std::vector<std::string> colors) : colors_(std::move(colors)) {}
  std::vector<std::string> colors_;
};

inline constexpr std::size_t kVariantsPerEntity = 6;

// Position of the first token in `query` that belongs to the vocabulary.
std::optional<std::size_t> detect_color(std::span<const std::string> query,
                                        const ColorVocabulary& vocab);

}  // namespace recsynth
