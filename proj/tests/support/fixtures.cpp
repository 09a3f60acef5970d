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

#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "recsynth/color.hpp"
#include "recsynth/generation.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/variation.hpp"

namespace recsynth::testing {

namespace {

const std::vector<std::string> kPlainWords = {
    "a",     "man",   "woman",  "dog",    "in",     "on",     "with",  "the",
    "shirt", "hat",   "car",    "ball",   "runs",   "near",   "tall",  "small",
    "street", "park", "holding", "and",   "jacket", "boy",    "girl",  "bike",
    "sits",  "under", "bench",  "water",  "grass",  "playing", "two",  "young"};

const std::vector<std::string> kColors = {"black", "gray",  "white", "red",    "orange", "yellow",
                                          "green", "cyan",  "blue",  "purple", "pink",   "brown"};

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

bool chance(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() % 1000000) < p * 1000000.0;
}

std::string styled_color(std::mt19937_64& rng) {
  std::string c = kColors[below(rng, kColors.size())];
  const auto style = below(rng, 10);
  if (style < 2) {
    c[0] = static_cast<char>(c[0] - 'a' + 'A');
  } else if (style < 3) {
    for (char& ch : c) ch = static_cast<char>(ch - 'a' + 'A');
  }
  return c;
}

BBox random_box(std::mt19937_64& rng, int w, int h) {
  const bool fractional = chance(rng, 0.3);
  auto coord = [&](int limit) {
    double v = static_cast<double>(below(rng, static_cast<std::size_t>(limit)));
    if (fractional) v += static_cast<double>(below(rng, 4)) * 0.25;
    return std::min(v, static_cast<double>(limit - 1));
  };
  double x0 = coord(w - 1);
  double y0 = coord(h - 1);
  double x1 = x0 + 1 + static_cast<double>(below(rng, static_cast<std::size_t>(w) - static_cast<std::size_t>(x0)));
  double y1 = y0 + 1 + static_cast<double>(below(rng, static_cast<std::size_t>(h) - static_cast<std::size_t>(y0)));
  x1 = std::min(x1, static_cast<double>(w));
  y1 = std::min(y1, static_cast<double>(h));
  return BBox{x0, y0, x1, y1};
}

}  // namespace

Annotation random_annotation(std::mt19937_64& rng, const std::string& id,
                             const AnnotationGenOptions& options) {
  Annotation a;
  a.id = id;
  const std::size_t length = 3 + below(rng, 18);
  for (std::size_t i = 0; i < length; ++i) a.caption.tokens.push_back(kPlainWords[below(rng, kPlainWords.size())]);
  const int w = 100 + static_cast<int>(below(rng, 900));
  const int h = 100 + static_cast<int>(below(rng, 900));
  if (options.with_dims) a.image = ImageRef{"img_" + id, w, h};

  const std::size_t n = 1 + below(rng, 4);
  std::vector<bool> covered(length, false);
  if (options.allow_overlap) {
    for (std::size_t e = 0; e < n; ++e) {
      const std::size_t begin = below(rng, length);
      const std::size_t size = 1 + below(rng, std::min<std::size_t>(4, length - begin));
      a.entities.push_back(Entity{Span{begin, begin + size}, random_box(rng, w, h)});
    }
  } else {
    // Disjoint spans laid out left to right.
    std::size_t cursor = 0;
    for (std::size_t e = 0; e < n && cursor < length; ++e) {
      const std::size_t gap = below(rng, 2);
      const std::size_t begin = std::min(cursor + gap, length - 1);
      if (begin < cursor) break;
      const std::size_t size = 1 + below(rng, std::min<std::size_t>(4, length - begin));
      a.entities.push_back(Entity{Span{begin, begin + size}, random_box(rng, w, h)});
      cursor = begin + size;
    }
  }
  for (const auto& e : a.entities) {
    for (std::size_t k = e.span.begin; k < e.span.end; ++k) covered[k] = true;
  }

  for (const auto& e : a.entities) {
    if (!chance(rng, options.color_probability)) continue;
    const std::size_t at = e.span.begin + below(rng, e.span.size());
    a.caption.tokens[at] = styled_color(rng);
    if (e.span.size() > 1 && chance(rng, 0.2)) {
      const std::size_t at2 = e.span.begin + below(rng, e.span.size());
      if (at2 != at) a.caption.tokens[at2] = styled_color(rng);
    }
  }
  if (chance(rng, options.stray_color_probability)) {
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < length; ++k) {
      if (!covered[k]) free.push_back(k);
    }
    if (!free.empty()) a.caption.tokens[free[below(rng, free.size())]] = styled_color(rng);
  }
  return a;
}

std::vector<Annotation> color_corpus(std::size_t total, std::size_t colored, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::set<std::size_t> colored_set(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(colored));
  std::vector<Annotation> out;
  for (std::size_t i = 0; i < total; ++i) {
    AnnotationGenOptions opt;
    opt.color_probability = colored_set.contains(i) ? 1.0 : 0.0;
    opt.stray_color_probability = 0.3;
    out.push_back(random_annotation(rng, "rec" + std::to_string(1000 + i), opt));
  }
  return out;
}

MarkupFixture markup_fixture(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> types = {"people", "clothing", "bodyparts", "animals",
                                          "vehicles", "instruments", "other", "scene"};
  const std::vector<std::string> spacers = {" ", " ", " ", "  ", "\t", " \t "};
  MarkupFixture fx;
  std::map<std::string, std::set<std::int64_t>> chains_with_boxes;
  for (std::size_t i = 0; i < count; ++i) {
    const std::string image_ref = std::to_string(400000 + i / 5);
    std::string markup;
    auto sep = [&] { return spacers[below(rng, spacers.size())]; };
    const bool no_chunks = chance(rng, 0.1);
    const std::size_t pieces = 2 + below(rng, 6);
    std::int64_t next_chain = 100 + static_cast<std::int64_t>((i / 5) * 50 + (i % 5) * 8);
    for (std::size_t p = 0; p < pieces; ++p) {
      if (!markup.empty()) markup += sep();
      if (!no_chunks && chance(rng, 0.5)) {
        const std::size_t words = 1 + below(rng, 4);
        const bool notvisual = chance(rng, 0.15);
        std::int64_t chain = next_chain++;
        if (p > 1 && chance(rng, 0.1)) chain = next_chain - 2;  // coreference
        std::string chunk = "[/EN#" + std::to_string(chain);
        chunk += notvisual ? "/notvisual" : "/" + types[below(rng, types.size())];
        if (!notvisual && chance(rng, 0.1)) chunk += "/other";
        for (std::size_t w = 0; w < words; ++w) {
          chunk += sep();
          if (w + 1 == words || !chance(rng, 0.25)) {
            chunk += kPlainWords[below(rng, kPlainWords.size())];
          } else {
            chunk += styled_color(rng);
          }
        }
        chunk += "]";
        markup += chunk;
        if (!notvisual && !chance(rng, 0.1) && !chains_with_boxes[image_ref].contains(chain)) {
          chains_with_boxes[image_ref].insert(chain);
          const std::size_t nboxes = chance(rng, 0.25) ? 2 + below(rng, 2) : 1;
          for (std::size_t b = 0; b < nboxes; ++b) {
            fx.boxes[image_ref][chain].push_back(random_box(rng, 500, 375));
          }
        }
      } else {
        const std::size_t words = 1 + below(rng, 3);
        for (std::size_t w = 0; w < words; ++w) {
          if (w > 0) markup += sep();
          std::string word = kPlainWords[below(rng, kPlainWords.size())];
          if (chance(rng, 0.1)) word += ",";
          markup += word;
        }
      }
    }
    if (chance(rng, 0.5)) markup += " .";
    fx.sentences.push_back({image_ref, markup});
  }
  return fx;
}

PipelineFixture write_pipeline_fixture(const std::filesystem::path& root, std::size_t seeds,
                                       std::uint64_t seed) {
  namespace fs = std::filesystem;
  std::mt19937_64 rng(seed);
  PipelineFixture fx;
  fx.root = root;
  fx.sentences = root / "sentences";
  fx.boxes = root / "boxes.jsonl";
  fx.dims = root / "dims.jsonl";
  fx.splits = root / "splits.json";
  fx.seeds = seeds;
  fs::create_directories(fx.sentences);

  const std::vector<std::string> nouns = {"shirt", "dog", "car", "hat", "ball", "bike", "jacket", "umbrella"};
  std::string boxes_text;
  std::string dims_text;
  Json splits = {{"train", Json::array()}, {"val", Json::array()}, {"test", Json::array()}};
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::string ref = "img" + std::to_string(7000 + s);
    const int w = 300 + static_cast<int>(below(rng, 341));
    const int h = 300 + static_cast<int>(below(rng, 341));
    dims_text += to_jsonl_line(Json{{"image_ref", ref}, {"width", w}, {"height", h}});

    // One colored entity, optionally one colorless context entity; the two
    // sit in disjoint halves of the image.
    const bool with_context = chance(rng, 0.5);
    const std::string color = kColors[below(rng, kColors.size())];
    const std::string noun = nouns[below(rng, nouns.size())];
    const std::string other = nouns[below(rng, nouns.size())];
    auto box_in = [&](int x_lo, int x_hi) {
      const int bw = std::max(20, (x_hi - x_lo) / 2 + static_cast<int>(below(rng, static_cast<std::size_t>((x_hi - x_lo) / 3))));
      const int x0 = x_lo + static_cast<int>(below(rng, static_cast<std::size_t>(std::max(1, x_hi - x_lo - bw))));
      const int bh = h / 3 + static_cast<int>(below(rng, static_cast<std::size_t>(h / 3)));
      const int y0 = static_cast<int>(below(rng, static_cast<std::size_t>(h - bh)));
      return BBox{static_cast<double>(x0), static_cast<double>(y0),
                  static_cast<double>(std::min(x0 + bw, x_hi)), static_cast<double>(y0 + bh)};
    };
    const BBox colored_box = with_context ? box_in(0, w / 2 - 4) : box_in(0, w);
    std::string sentence = "A person holds [/EN#" + std::to_string(10 * s + 1) + "/clothing a " +
                           color + " " + noun + "]";
    boxes_text += to_jsonl_line(Json{{"image_ref", ref}, {"chain_id", 10 * s + 1}, {"box", box_to_json(colored_box)}});
    if (with_context) {
      const BBox context_box = box_in(w / 2 + 4, w);
      sentence += " near [/EN#" + std::to_string(10 * s + 2) + "/other the " + other + "]";
      boxes_text += to_jsonl_line(Json{{"image_ref", ref}, {"chain_id", 10 * s + 2}, {"box", box_to_json(context_box)}});
    }
    sentence += " [/EN#" + std::to_string(10 * s + 3) + "/notvisual outside] .";
    std::string file_text = sentence + "\n";
    if (chance(rng, 0.4)) {
      file_text += "[/EN#" + std::to_string(10 * s + 4) + "/people Someone] waits .\n";
      const BBox b = box_in(0, w);
      boxes_text += to_jsonl_line(Json{{"image_ref", ref}, {"chain_id", 10 * s + 4}, {"box", box_to_json(b)}});
    }
    write_text_file(fx.sentences / (ref + ".txt"), file_text);
    const char* split = (s % 5 < 3) ? "train" : (s % 5 == 3 ? "val" : "test");
    splits[split].push_back(ref);
  }
  write_text_file(fx.boxes, boxes_text);
  write_text_file(fx.dims, dims_text);
  write_text_file(fx.splits, splits.dump(2) + "\n");
  return fx;
}

BuildInputs in_memory_build(const std::vector<Annotation>& seeds, std::uint64_t global_seed,
                            const std::function<Split(std::size_t)>& split_of) {
  BuildInputs in;
  std::vector<std::string> ids;
  std::vector<GenerationReceipt> receipts;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    in.splits.assign(seeds[i].image->ref, split_of(i));
    for (auto& r : vary(seeds[i], ColorVocabulary::standard(), global_seed)) {
      GenerationManifest m = to_manifest(r, std::nullopt);
      ids.push_back(m.manifest_id);
      receipts.push_back(GenerationReceipt{m.manifest_id, m.manifest_id + ".png", m.width, m.height,
                                           "fixture", ReceiptStatus::kOk, ""});
      in.manifests.emplace(m.manifest_id, std::move(m));
      in.records.push_back(std::move(r));
    }
  }
  in.ledger = ingest_receipts(ids, receipts);
  return in;
}

std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("recsynth_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace recsynth::testing
