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

// Desk-scale stand-in for a diffusion backend. Each manifest becomes a flat
// gray canvas with every entity box painted in the color its phrase names,
// so box recovery can be checked pixel-exactly.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "recsynth/color.hpp"
#include "recsynth/generation.hpp"
#include "recsynth/image.hpp"
#include "recsynth/json_io.hpp"

namespace recsynth {

struct ColorMap {
  int version = 1;
  std::map<std::string, Rgb> colors;
  Rgb uncolored;
  Rgb background;

  // Version 1 assignments, identical to config/colormap.json.
  static ColorMap standard();
  static ColorMap from_json(const Json& j);
  static ColorMap from_file(const std::filesystem::path& path);
  Json to_json() const;

  // Totality over the vocabulary and pairwise distinctness of every fill,
  // including background and uncolored.
  std::vector<std::string> check(const ColorVocabulary& vocab) const;

  // "mock-renderer/colormap-v<version>"
  std::string backend_tag() const;
};

// Pixel range [lo, hi) covered by normalized interval [a, b] on an axis of
// `size` pixels: round-half-up of a*size and b*size, clipped.
std::pair<int, int> pixel_range(double a, double b, int size);

// Fill color for a phrase: first vocabulary color it mentions, else
// `uncolored`.
Rgb phrase_color(const std::string& phrase, const ColorMap& colormap, const ColorVocabulary& vocab);

// Paints entities in list order (later ones overpaint earlier ones).
RgbImage render(const GenerationManifest& manifest, const ColorMap& colormap,
                const ColorVocabulary& vocab = ColorVocabulary::standard());

// Renders to `<out_dir>/<manifest_id>.png`. I/O failures yield a failed
// receipt instead of throwing. `image_path` is the bare file name.
GenerationReceipt render_to_file(const GenerationManifest& manifest, const ColorMap& colormap,
                                 const std::filesystem::path& out_dir,
                                 const ColorVocabulary& vocab = ColorVocabulary::standard());

// Batch form; receipts come back in manifest order whatever `jobs` is.
std::vector<GenerationReceipt> render_all(const std::vector<GenerationManifest>& manifests,
                                          const ColorMap& colormap,
                                          const std::filesystem::path& out_dir, std::size_t jobs,
                                          const ColorVocabulary& vocab = ColorVocabulary::standard());

}  // namespace recsynth
