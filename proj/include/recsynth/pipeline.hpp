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

// Pipeline stages behind the command-line tool. Each stage reads its inputs,
// writes its outputs and returns a report; none of them modify their inputs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "recsynth/generation.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/metrics.hpp"

namespace recsynth::pipeline {

namespace fs = std::filesystem;

struct StageReport {
  std::string stage;
  Json config = Json::object();  // resolved options snapshot
  Json counts = Json::object();
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
  std::string summary;  // one human-readable line
  Json details = Json::object();
  double duration_ms = 0;

  Json to_json() const;
};

// Writes report JSON to `path`.
void write_report(const StageReport& report, const fs::path& path);

struct IngestArgs {
  fs::path sentences;
  fs::path boxes;
  fs::path out;
  std::optional<fs::path> dims;
  std::optional<fs::path> vocab;
  bool only_color_seeds = false;
  std::size_t jobs = 1;
};
StageReport run_ingest(const IngestArgs& args);

struct VaryArgs {
  fs::path in;
  fs::path out;
  std::uint64_t seed = 0;
  std::optional<fs::path> vocab;
  std::size_t jobs = 1;
};
StageReport run_vary(const VaryArgs& args);

struct EmitArgs {
  fs::path in;
  fs::path out;
  std::optional<fs::path> dims;
  Dims canvas = kDefaultCanvas;
};
StageReport run_emit_manifests(const EmitArgs& args);

struct RenderArgs {
  fs::path manifests;
  fs::path out_dir;
  fs::path receipts;
  std::optional<fs::path> colormap;
  std::optional<fs::path> vocab;
  bool append = false;
  std::size_t jobs = 1;
};
StageReport run_render_mock(const RenderArgs& args);

struct StatusArgs {
  fs::path manifests;
  fs::path receipts;
};
StageReport run_status(const StatusArgs& args);

struct BuildArgs {
  fs::path records;
  fs::path manifests;
  fs::path receipts;
  fs::path splits;
  std::optional<fs::path> images;
  fs::path out;
  std::optional<std::size_t> expected_annotations;
  std::optional<std::size_t> expected_images;
};
StageReport run_build(const BuildArgs& args);

struct StatsArgs {
  std::vector<fs::path> in;
  std::optional<fs::path> vocab;
  std::optional<std::size_t> expected_annotations;
  std::optional<std::size_t> expected_images;
};
StageReport run_stats(const StatsArgs& args);

struct EvalArgs {
  fs::path gt;
  fs::path pred;
  bool color_subset = false;
  std::string threshold = "0.5";
  std::optional<fs::path> vocab;
};
StageReport run_eval(const EvalArgs& args);

// Split name for a COCO file: "harlequin_val.json" -> "val", else the stem.
std::string dataset_name_for(const fs::path& path);

}  // namespace recsynth::pipeline
