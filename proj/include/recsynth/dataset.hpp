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

// Final dataset assembly: pair completed generations with their rewritten
// annotations, route each variant to its seed image's split and serialize
// COCO-style JSON with the referring expression stored per annotation.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recsynth/generation.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/variation.hpp"

namespace recsynth {

enum class Split { kTrain, kVal, kTest };

inline constexpr std::array<Split, 3> kAllSplits{Split::kTrain, Split::kVal, Split::kTest};

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

// Output file name for a split, e.g. "harlequin_train.json".
std::string split_file_name(Split s);

class SplitAssignment {
 public:
  SplitAssignment() = default;

  // {"train": [refs...], "val": [...], "test": [...]}. A ref listed in more
  // than one split is a ParseError.
  static SplitAssignment from_json(const Json& j);
  static SplitAssignment from_file(const std::filesystem::path& path);

  void assign(const std::string& image_ref, Split split);
  std::optional<Split> find(const std::string& image_ref) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, Split> map_;
};

// Split of the record's seed image. Unknown or missing image refs are a
// StageError: guessing would leak images across splits.
Split assign_split(const VariationRecord& record, const SplitAssignment& splits);

struct CocoImage {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::string caption;
  std::string seed_id;
  std::size_t variant_index = 0;
  friend bool operator==(const CocoImage&, const CocoImage&) = default;
};

struct CocoAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::array<double, 4> bbox{};  // x, y, w, h
  double area = 0;
  int category_id = 1;
  int iscrowd = 0;
  std::string query;
  bool is_varied = false;
  friend bool operator==(const CocoAnnotation&, const CocoAnnotation&) = default;
};

struct CocoCategory {
  int id = 1;
  std::string name = "object";
  friend bool operator==(const CocoCategory&, const CocoCategory&) = default;
};

struct CocoExport {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;
  std::vector<CocoCategory> categories{CocoCategory{}};
  friend bool operator==(const CocoExport&, const CocoExport&) = default;
};

// Corner box to [x, y, w, h].
std::array<double, 4> to_coco_bbox(const BBox& box);
BBox from_coco_bbox(const std::array<double, 4>& bbox);

Json coco_to_json(const CocoExport& coco);
CocoExport coco_from_json(const Json& j);
CocoExport load_coco(const std::filesystem::path& path);
// Pretty-printed with stable key order; trailing newline.
std::string coco_to_string(const CocoExport& coco);

// Structural checks: unique dense ids, resolvable image ids, positive sizes,
// area = w * h.
std::vector<std::string> check_coco(const CocoExport& coco);

struct BuildInputs {
  std::vector<VariationRecord> records;
  std::map<std::string, GenerationManifest> manifests;  // by manifest_id
  ReceiptLedger ledger;
  SplitAssignment splits;
  // When set, each completed image must exist here (unless its receipt path
  // is absolute) as a PNG of the declared size.
  std::optional<std::filesystem::path> images_dir;
};

struct SplitCounts {
  std::size_t images = 0;
  std::size_t annotations = 0;
};

struct BuildResult {
  std::map<Split, CocoExport> splits;
  std::map<Split, SplitCounts> counts;
  std::size_t not_completed = 0;  // pending or failed generations
  std::size_t skipped = 0;        // completed but rejected (see warnings)
  std::vector<std::string> warnings;
};

// Builds all three splits. Ids are dense per file, assigned in
// (seed_id, entity, variant, entity index) order.
BuildResult build_dataset(const BuildInputs& inputs);

// One split only.
CocoExport export_coco(const BuildInputs& inputs, Split split,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace recsynth
