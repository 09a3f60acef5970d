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

// Deterministic fixture generators shared by unit and acceptance tests.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "recsynth/core.hpp"
#include "recsynth/dataset.hpp"
#include "recsynth/flickr.hpp"

namespace recsynth::testing {

struct AnnotationGenOptions {
  bool allow_overlap = true;
  double color_probability = 0.5;  // per entity
  double stray_color_probability = 0.2;  // color word outside every span
  bool with_dims = true;
};

// Random caption of plain words with 1..4 entity spans; entities flagged
// colored carry one or two vocabulary colors (sometimes capitalized).
Annotation random_annotation(std::mt19937_64& rng, const std::string& id,
                             const AnnotationGenOptions& options = {});

// `total` annotations of which exactly `colored` have a color-bearing
// entity; colored ones are scattered deterministically.
std::vector<Annotation> color_corpus(std::size_t total, std::size_t colored, std::uint64_t seed);

struct MarkupFixture {
  std::vector<flickr::RawSentence> sentences;
  flickr::BoxIndex boxes;
};

// Bracket-markup sentences mixing single and multi-chunk sentences, boxless
// /notvisual chunks, chains with several boxes and chunk-free sentences.
MarkupFixture markup_fixture(std::size_t count, std::uint64_t seed);

struct PipelineFixture {
  std::filesystem::path root;
  std::filesystem::path sentences;
  std::filesystem::path boxes;
  std::filesystem::path dims;
  std::filesystem::path splits;
  std::size_t seeds = 0;
};

// Writes a Flickr-style source tree under `root`: one image per seed with a
// single sentence containing 1..3 color-bearing chunks whose boxes do not
// overlap, plus a few colorless distractor sentences. Splits are assigned
// round-robin train/train/train/val/test.
PipelineFixture write_pipeline_fixture(const std::filesystem::path& root, std::size_t seeds,
                                       std::uint64_t seed);

// Fresh empty directory under the system temp dir.
// Varies `seeds`, emits manifests on the default canvas, marks every
// manifest completed and assigns seed i to split_of(i). No files touched.
BuildInputs in_memory_build(const std::vector<Annotation>& seeds, std::uint64_t global_seed,
                            const std::function<Split(std::size_t)>& split_of);

std::filesystem::path make_temp_dir(const std::string& tag);

}  // namespace recsynth::testing
