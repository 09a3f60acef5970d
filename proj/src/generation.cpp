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

#include "recsynth/generation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "recsynth/errors.hpp"

namespace recsynth {

std::string manifest_id_for(const VariationRecord& record) {
  std::string stem = record.seed_id;
  for (char& c : stem) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '_' || c == '-';
    if (!safe) c = '_';
  }
  return stem + "-e" + std::to_string(record.varied_entity + 1) + "-v" +
         std::to_string(record.variant_index);
}

NormBox normalize_box(const BBox& box, Dims source) {
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const double w = source.width;
  const double h = source.height;
  return NormBox{clamp01(box.x_min / w), clamp01(box.y_min / h), clamp01(box.x_max / w),
                 clamp01(box.y_max / h)};
}

BBox denormalize_box(const NormBox& box, Dims canvas) {
  return BBox{box.x0 * canvas.width, box.y0 * canvas.height, box.x1 * canvas.width,
              box.y1 * canvas.height};
}

GenerationManifest to_manifest(const VariationRecord& record, std::optional<Dims> source,
                               Dims canvas) {
  const Annotation& a = record.annotation;
  const std::string id = manifest_id_for(record);
  if (!source && a.image && a.image->has_dims()) source = Dims{*a.image->width, *a.image->height};
  if (!source) throw StageError("record '" + id + "' has no source image dimensions");
  if (source->width <= 0 || source->height <= 0) {
    throw StageError("record '" + id + "' has non-positive source dimensions");
  }
  if (canvas.width <= 0 || canvas.height <= 0) throw ContractError("canvas must be non-empty");

  GenerationManifest m;
  m.manifest_id = id;
  m.prompt = detokenize(a.caption.tokens);
  m.rng_seed = record.rng_seed;
  m.width = canvas.width;
  m.height = canvas.height;
  for (std::size_t e = 0; e < a.entities.size(); ++e) {
    const NormBox nb = normalize_box(a.entities[e].box, *source);
    if (!(nb.x0 < nb.x1) || !(nb.y0 < nb.y1)) {
      throw StageError("record '" + id + "' entity " + std::to_string(e + 1) +
                       " has zero area after clamping to the image");
    }
    m.entities.push_back(ManifestEntity{detokenize(query_text(a, e)), nb});
  }
  if (m.entities.empty()) throw StageError("record '" + id + "' has no entities");
  return m;
}

std::vector<Violation> validate_manifest(const GenerationManifest& m) {
  std::vector<Violation> out;
  if (m.manifest_id.empty()) out.push_back({"manifest_id", "empty-id", ""});
  if (m.prompt.empty()) out.push_back({"prompt", "empty-prompt", ""});
  if (m.width <= 0 || m.height <= 0) out.push_back({"width/height", "bad-dims", ""});
  if (m.entities.empty()) out.push_back({"entities", std::string(rules::kNoEntities), ""});
  for (std::size_t i = 0; i < m.entities.size(); ++i) {
    const NormBox& b = m.entities[i].box;
    const std::string field = "entities[" + std::to_string(i) + "]";
    if (m.entities[i].phrase.empty()) out.push_back({field + ".phrase", "empty-phrase", ""});
    const bool in_range = b.x0 >= 0 && b.y0 >= 0 && b.x1 <= 1 && b.y1 <= 1;
    if (!in_range || !(b.x0 < b.x1) || !(b.y0 < b.y1)) {
      out.push_back({field + ".box", "bad-normalized-box", ""});
    }
  }
  return out;
}

Json manifest_to_json(const GenerationManifest& m) {
  Json j;
  j["manifest_id"] = m.manifest_id;
  j["prompt"] = m.prompt;
  Json ents = Json::array();
  for (const auto& e : m.entities) {
    Json ej;
    ej["phrase"] = e.phrase;
    ej["box"] = Json::array({json_number(e.box.x0), json_number(e.box.y0), json_number(e.box.x1),
                             json_number(e.box.y1)});
    ents.push_back(std::move(ej));
  }
  j["entities"] = std::move(ents);
  j["rng_seed"] = m.rng_seed;
  j["width"] = m.width;
  j["height"] = m.height;
  return j;
}

GenerationManifest manifest_from_json(const Json& j) {
  GenerationManifest m;
  m.manifest_id = j.at("manifest_id").get<std::string>();
  m.prompt = j.at("prompt").get<std::string>();
  for (const auto& ej : j.at("entities")) {
    const BBox b = box_from_json(ej.at("box"));
    m.entities.push_back({ej.at("phrase").get<std::string>(), {b.x_min, b.y_min, b.x_max, b.y_max}});
  }
  m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  if (auto issues = validate_manifest(m); !issues.empty()) {
    throw ParseError("invalid manifest '" + m.manifest_id + "': " + describe(issues));
  }
  return m;
}

std::vector<GenerationManifest> load_manifests(const std::filesystem::path& path) {
  std::vector<GenerationManifest> out;
  std::set<std::string> seen;
  read_jsonl(path, [&](std::size_t, const Json& j) {
    GenerationManifest m = manifest_from_json(j);
    if (!seen.insert(m.manifest_id).second) {
      throw ParseError("duplicate manifest_id '" + m.manifest_id + "'");
    }
    out.push_back(std::move(m));
  });
  return out;
}

Json receipt_to_json(const GenerationReceipt& r) {
  Json j;
  j["manifest_id"] = r.manifest_id;
  j["image_path"] = r.image_path;
  j["width"] = r.width;
  j["height"] = r.height;
  j["backend_tag"] = r.backend_tag;
  j["status"] = r.ok() ? "ok" : "failed";
  if (!r.ok()) j["message"] = r.message;
  return j;
}

GenerationReceipt receipt_from_json(const Json& j) {
  GenerationReceipt r;
  r.manifest_id = j.at("manifest_id").get<std::string>();
  const std::string status = j.at("status").get<std::string>();
  if (status == "ok") {
    r.status = ReceiptStatus::kOk;
  } else if (status == "failed") {
    r.status = ReceiptStatus::kFailed;
  } else {
    throw ParseError("unknown receipt status '" + status + "'");
  }
  auto str_or_empty = [&](const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? std::string() : it->get<std::string>();
  };
  auto int_or_zero = [&](const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? 0 : it->get<int>();
  };
  r.image_path = str_or_empty("image_path");
  r.backend_tag = str_or_empty("backend_tag");
  r.message = str_or_empty("message");
  r.width = int_or_zero("width");
  r.height = int_or_zero("height");
  if (r.ok() && (r.image_path.empty() || r.width <= 0 || r.height <= 0)) {
    throw ParseError("ok receipt for '" + r.manifest_id + "' lacks image_path or dimensions");
  }
  return r;
}

ReceiptLoad load_receipts(const std::filesystem::path& path) {
  ReceiptLoad load;
  read_jsonl_tolerant(
      path, [&](std::size_t, const Json& j) { load.receipts.push_back(receipt_from_json(j)); },
      [&](std::size_t line_no, const std::string& error) {
        load.warnings.push_back(path.string() + ":" + std::to_string(line_no) +
                                ": skipped receipt line: " + error);
      });
  return load;
}

ReceiptLedger ingest_receipts(const std::vector<std::string>& manifest_ids,
                              const std::vector<GenerationReceipt>& receipts) {
  ReceiptLedger ledger;
  const std::set<std::string> known(manifest_ids.begin(), manifest_ids.end());
  for (const auto& r : receipts) {
    if (!known.contains(r.manifest_id)) {
      ledger.quarantined.push_back(r);
      ledger.warnings.push_back("receipt for unknown manifest '" + r.manifest_id + "'");
      continue;
    }
    if (ledger.completed.contains(r.manifest_id)) {
      ledger.superseded.push_back(r);
      ledger.warnings.push_back("duplicate receipt for '" + r.manifest_id + "' ignored");
      continue;
    }
    if (r.ok()) {
      if (auto it = ledger.failed.find(r.manifest_id); it != ledger.failed.end()) {
        ledger.superseded.push_back(it->second);
        ledger.failed.erase(it);
      }
      ledger.completed.emplace(r.manifest_id, r);
    } else if (!ledger.failed.emplace(r.manifest_id, r).second) {
      ledger.superseded.push_back(r);
      ledger.warnings.push_back("duplicate failure for '" + r.manifest_id + "' ignored");
    }
  }
  for (const auto& id : manifest_ids) {
    if (!ledger.completed.contains(id) && !ledger.failed.contains(id)) ledger.pending.push_back(id);
  }
  return ledger;
}

}  // namespace recsynth
