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

// Protocol between the pipeline and any grounded text-to-image backend.
// A manifest asks for one image conditioned on a prompt and on
// (phrase, normalized box) pairs; a receipt reports what the backend did.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recsynth/core.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/variation.hpp"

namespace recsynth {

struct Dims {
  int width = 0;
  int height = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

inline constexpr Dims kDefaultCanvas{512, 512};

// Box in [0, 1] image-relative coordinates.
struct NormBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  friend bool operator==(const NormBox&, const NormBox&) = default;
};

struct ManifestEntity {
  std::string phrase;
  NormBox box;
  friend bool operator==(const ManifestEntity&, const ManifestEntity&) = default;
};

struct GenerationManifest {
  std::string manifest_id;
  std::string prompt;
  std::vector<ManifestEntity> entities;
  std::uint64_t rng_seed = 0;
  int width = 0;
  int height = 0;
  friend bool operator==(const GenerationManifest&, const GenerationManifest&) = default;
};

// "<seed id>-e<entity>-v<variant>" with 1-based entity index. Characters
// outside [A-Za-z0-9._-] in the seed id become '_' so the id is a safe file
// stem.
std::string manifest_id_for(const VariationRecord& record);

NormBox normalize_box(const BBox& box, Dims source);
BBox denormalize_box(const NormBox& box, Dims canvas);

// Builds the request for one variant. `source` overrides the dimensions
// carried by the record's annotation; one of the two must be present.
// Throws StageError on missing dimensions or a box that clamps to zero area.
GenerationManifest to_manifest(const VariationRecord& record, std::optional<Dims> source,
                               Dims canvas = kDefaultCanvas);

std::vector<Violation> validate_manifest(const GenerationManifest& m);

Json manifest_to_json(const GenerationManifest& m);
GenerationManifest manifest_from_json(const Json& j);
std::vector<GenerationManifest> load_manifests(const std::filesystem::path& path);

enum class ReceiptStatus { kOk, kFailed };

struct GenerationReceipt {
  std::string manifest_id;
  std::string image_path;
  int width = 0;
  int height = 0;
  std::string backend_tag;
  ReceiptStatus status = ReceiptStatus::kOk;
  std::string message;  // set for failed receipts

  bool ok() const { return status == ReceiptStatus::kOk; }
  friend bool operator==(const GenerationReceipt&, const GenerationReceipt&) = default;
};

Json receipt_to_json(const GenerationReceipt& r);
GenerationReceipt receipt_from_json(const Json& j);

struct ReceiptLoad {
  std::vector<GenerationReceipt> receipts;
  std::vector<std::string> warnings;  // malformed or torn lines
};

// Tolerates lines that are malformed or still being appended.
ReceiptLoad load_receipts(const std::filesystem::path& path);

struct ReceiptLedger {
  std::map<std::string, GenerationReceipt> completed;
  std::map<std::string, GenerationReceipt> failed;
  std::vector<std::string> pending;                // manifest order
  std::vector<GenerationReceipt> quarantined;      // unknown manifest ids
  std::vector<GenerationReceipt> superseded;       // duplicates not kept
  std::vector<std::string> warnings;
};

// Classifies every manifest id exactly once: completed if any ok receipt
// arrived (the first one is kept), failed if only failures arrived (the
// first failure is kept), pending otherwise.
ReceiptLedger ingest_receipts(const std::vector<std::string>& manifest_ids,
                              const std::vector<GenerationReceipt>& receipts);

}  // namespace recsynth
