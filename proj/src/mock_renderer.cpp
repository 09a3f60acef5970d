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

#include "recsynth/mock_renderer.hpp"

#include <cmath>
#include <set>

#include "recsynth/errors.hpp"
#include "recsynth/parallel.hpp"

namespace recsynth {

namespace {

Rgb rgb_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("RGB value must be [r, g, b]");
  auto channel = [](const Json& v) {
    const int c = v.get<int>();
    if (c < 0 || c > 255) throw ParseError("RGB channel out of range");
    return static_cast<std::uint8_t>(c);
  };
  return Rgb{channel(j[0]), channel(j[1]), channel(j[2])};
}

Json rgb_to_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

}  // namespace

ColorMap ColorMap::standard() {
  ColorMap m;
  m.version = 1;
  m.background = {100, 100, 100};
  m.uncolored = {255, 0, 255};
  m.colors = {
      {"black", {0, 0, 0}},       {"gray", {128, 128, 128}}, {"white", {255, 255, 255}},
      {"red", {255, 0, 0}},       {"orange", {255, 165, 0}}, {"yellow", {255, 255, 0}},
      {"green", {0, 160, 0}},     {"cyan", {0, 255, 255}},   {"blue", {0, 0, 255}},
      {"purple", {128, 0, 128}},  {"pink", {255, 192, 203}}, {"brown", {139, 69, 19}},
  };
  return m;
}

ColorMap ColorMap::from_json(const Json& j) {
  ColorMap m;
  m.version = j.at("version").get<int>();
  m.background = rgb_from_json(j.at("background"));
  m.uncolored = rgb_from_json(j.at("uncolored"));
  for (const auto& [name, value] : j.at("colors").items()) m.colors[name] = rgb_from_json(value);
  return m;
}

ColorMap ColorMap::from_file(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Json ColorMap::to_json() const {
  Json j;
  j["version"] = version;
  j["background"] = rgb_to_json(background);
  j["uncolored"] = rgb_to_json(uncolored);
  Json c = Json::object();
  for (const auto& [name, value] : colors) c[name] = rgb_to_json(value);
  j["colors"] = std::move(c);
  return j;
}

std::vector<std::string> ColorMap::check(const ColorVocabulary& vocab) const {
  std::vector<std::string> problems;
  std::set<Rgb> seen{background};
  if (!seen.insert(uncolored).second) problems.push_back("uncolored equals background");
  for (const auto& name : vocab.colors()) {
    auto it = colors.find(name);
    if (it == colors.end()) {
      problems.push_back("no RGB for '" + name + "'");
    } else if (!seen.insert(it->second).second) {
      problems.push_back("RGB for '" + name + "' is not unique");
    }
  }
  return problems;
}

std::string ColorMap::backend_tag() const {
  return "mock-renderer/colormap-v" + std::to_string(version);
}

std::pair<int, int> pixel_range(double a, double b, int size) {
  auto edge = [size](double v) {
    const double px = std::floor(v * size + 0.5);
    return static_cast<int>(std::clamp(px, 0.0, static_cast<double>(size)));
  };
  return {edge(a), edge(b)};
}

Rgb phrase_color(const std::string& phrase, const ColorMap& colormap,
                 const ColorVocabulary& vocab) {
  const Tokens words = tokenize(phrase);
  if (auto pos = detect_color(words, vocab)) {
    auto it = colormap.colors.find(to_lower_ascii(words[*pos]));
    if (it == colormap.colors.end()) {
      throw ContractError("colormap has no entry for '" + words[*pos] + "'");
    }
    return it->second;
  }
  return colormap.uncolored;
}

RgbImage render(const GenerationManifest& manifest, const ColorMap& colormap,
                const ColorVocabulary& vocab) {
  if (auto issues = validate_manifest(manifest); !issues.empty()) {
    throw ContractError("cannot render invalid manifest '" + manifest.manifest_id +
                        "': " + describe(issues));
  }
  RgbImage image(manifest.width, manifest.height, colormap.background);
  for (const auto& e : manifest.entities) {
    const auto [x0, x1] = pixel_range(e.box.x0, e.box.x1, manifest.width);
    const auto [y0, y1] = pixel_range(e.box.y0, e.box.y1, manifest.height);
    image.fill_rect(x0, y0, x1, y1, phrase_color(e.phrase, colormap, vocab));
  }
  return image;
}

GenerationReceipt render_to_file(const GenerationManifest& manifest, const ColorMap& colormap,
                                 const std::filesystem::path& out_dir,
                                 const ColorVocabulary& vocab) {
  GenerationReceipt r;
  r.manifest_id = manifest.manifest_id;
  r.backend_tag = colormap.backend_tag();
  r.width = manifest.width;
  r.height = manifest.height;
  r.image_path = manifest.manifest_id + ".png";
  try {
    write_png(out_dir / r.image_path, render(manifest, colormap, vocab));
    r.status = ReceiptStatus::kOk;
  } catch (const std::exception& e) {
    r.status = ReceiptStatus::kFailed;
    r.message = e.what();
  }
  return r;
}

std::vector<GenerationReceipt> render_all(const std::vector<GenerationManifest>& manifests,
                                          const ColorMap& colormap,
                                          const std::filesystem::path& out_dir, std::size_t jobs,
                                          const ColorVocabulary& vocab) {
  return parallel_map(manifests.size(), jobs, [&](std::size_t i) {
    return render_to_file(manifests[i], colormap, out_dir, vocab);
  });
}

}  // namespace recsynth
