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

#include "recsynth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "recsynth/errors.hpp"
#include "recsynth/image.hpp"

namespace recsynth {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split split_from_name(std::string_view name) {
  for (Split s : kAllSplits) {
    if (split_name(s) == name) return s;
  }
  throw ParseError("unknown split '" + std::string(name) + "'");
}

std::string split_file_name(Split s) { return "harlequin_" + std::string(split_name(s)) + ".json"; }

SplitAssignment SplitAssignment::from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("split file must be an object of split -> image refs");
  SplitAssignment out;
  for (const auto& [name, refs] : j.items()) {
    const Split split = split_from_name(name);
    if (!refs.is_array()) throw ParseError("split '" + name + "' must list image refs");
    for (const auto& r : refs) {
      const std::string ref = r.is_string() ? r.get<std::string>() : r.dump();
      if (out.find(ref)) throw ParseError("image ref '" + ref + "' appears in more than one split");
      out.assign(ref, split);
    }
  }
  return out;
}

SplitAssignment SplitAssignment::from_file(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void SplitAssignment::assign(const std::string& image_ref, Split split) { map_[image_ref] = split; }

std::optional<Split> SplitAssignment::find(const std::string& image_ref) const {
  auto it = map_.find(image_ref);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Split assign_split(const VariationRecord& record, const SplitAssignment& splits) {
  const auto& image = record.annotation.image;
  if (!image || image->ref.empty()) {
    throw StageError("record '" + record.seed_id + "' carries no source image ref");
  }
  auto split = splits.find(image->ref);
  if (!split) {
    throw StageError("image ref '" + image->ref + "' of record '" + record.seed_id +
                     "' is not in the split map");
  }
  return *split;
}

std::array<double, 4> to_coco_bbox(const BBox& box) {
  return {box.x_min, box.y_min, box.width(), box.height()};
}

BBox from_coco_bbox(const std::array<double, 4>& b) {
  return BBox{b[0], b[1], b[0] + b[2], b[1] + b[3]};
}

Json coco_to_json(const CocoExport& coco) {
  Json j;
  Json images = Json::array();
  for (const auto& im : coco.images) {
    Json ij;
    ij["id"] = im.id;
    ij["file_name"] = im.file_name;
    ij["width"] = im.width;
    ij["height"] = im.height;
    ij["caption"] = im.caption;
    ij["seed_id"] = im.seed_id;
    ij["variant_index"] = im.variant_index;
    images.push_back(std::move(ij));
  }
  Json anns = Json::array();
  for (const auto& a : coco.annotations) {
    Json aj;
    aj["id"] = a.id;
    aj["image_id"] = a.image_id;
    aj["bbox"] = Json::array({json_number(a.bbox[0]), json_number(a.bbox[1]),
                              json_number(a.bbox[2]), json_number(a.bbox[3])});
    aj["area"] = json_number(a.area);
    aj["category_id"] = a.category_id;
    aj["iscrowd"] = a.iscrowd;
    aj["query"] = a.query;
    aj["is_varied"] = a.is_varied;
    anns.push_back(std::move(aj));
  }
  Json cats = Json::array();
  for (const auto& c : coco.categories) cats.push_back(Json{{"id", c.id}, {"name", c.name}});
  j["images"] = std::move(images);
  j["annotations"] = std::move(anns);
  j["categories"] = std::move(cats);
  return j;
}

CocoExport coco_from_json(const Json& j) {
  CocoExport coco;
  coco.categories.clear();
  try {
    for (const auto& ij : j.at("images")) {
      CocoImage im;
      im.id = ij.at("id").get<std::int64_t>();
      im.file_name = ij.at("file_name").get<std::string>();
      im.width = ij.at("width").get<int>();
      im.height = ij.at("height").get<int>();
      im.caption = ij.value("caption", std::string());
      im.seed_id = ij.value("seed_id", std::string());
      im.variant_index = ij.value("variant_index", std::size_t{0});
      coco.images.push_back(std::move(im));
    }
    for (const auto& aj : j.at("annotations")) {
      CocoAnnotation a;
      a.id = aj.at("id").get<std::int64_t>();
      a.image_id = aj.at("image_id").get<std::int64_t>();
      const auto& b = aj.at("bbox");
      if (!b.is_array() || b.size() != 4) throw ParseError("bbox must have 4 numbers");
      for (std::size_t i = 0; i < 4; ++i) a.bbox[i] = b[i].get<double>();
      a.area = aj.contains("area") ? aj.at("area").get<double>() : a.bbox[2] * a.bbox[3];
      a.category_id = aj.value("category_id", 1);
      a.iscrowd = aj.value("iscrowd", 0);
      a.query = aj.value("query", std::string());
      a.is_varied = aj.value("is_varied", false);
      coco.annotations.push_back(std::move(a));
    }
    if (auto it = j.find("categories"); it != j.end()) {
      for (const auto& cj : *it) {
        coco.categories.push_back({cj.at("id").get<int>(), cj.at("name").get<std::string>()});
      }
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed COCO document: ") + e.what());
  }
  return coco;
}

CocoExport load_coco(const std::filesystem::path& path) {
  try {
    return coco_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string coco_to_string(const CocoExport& coco) { return coco_to_json(coco).dump(1) + "\n"; }

std::vector<std::string> check_coco(const CocoExport& coco) {
  std::vector<std::string> problems;
  std::set<std::int64_t> image_ids;
  for (std::size_t i = 0; i < coco.images.size(); ++i) {
    const auto& im = coco.images[i];
    if (im.id != static_cast<std::int64_t>(i + 1)) {
      problems.push_back("image ids are not dense at position " + std::to_string(i));
    }
    if (!image_ids.insert(im.id).second) problems.push_back("duplicate image id " + std::to_string(im.id));
    if (im.width <= 0 || im.height <= 0) problems.push_back("image " + std::to_string(im.id) + " has bad size");
  }
  for (std::size_t i = 0; i < coco.annotations.size(); ++i) {
    const auto& a = coco.annotations[i];
    const std::string tag = "annotation " + std::to_string(a.id);
    if (a.id != static_cast<std::int64_t>(i + 1)) {
      problems.push_back("annotation ids are not dense at position " + std::to_string(i));
    }
    if (!image_ids.contains(a.image_id)) problems.push_back(tag + " references a missing image");
    if (!(a.bbox[2] > 0) || !(a.bbox[3] > 0)) problems.push_back(tag + " has a non-positive size");
    if (a.area != a.bbox[2] * a.bbox[3]) problems.push_back(tag + " area != w*h");
  }
  return problems;
}

namespace {

// Removes float noise from denormalization (e.g. 30.000000000000004).
double snap(double v) { return std::round(v * 1e4) / 1e4; }

struct Candidate {
  const VariationRecord* record;
  const GenerationManifest* manifest;
  const GenerationReceipt* receipt;
};

std::optional<Candidate> check_candidate(const BuildInputs& in, const VariationRecord& r,
                                         std::vector<std::string>& warnings, bool& not_completed) {
  const std::string id = manifest_id_for(r);
  auto rc = in.ledger.completed.find(id);
  if (rc == in.ledger.completed.end()) {
    not_completed = true;
    return std::nullopt;
  }
  auto mf = in.manifests.find(id);
  if (mf == in.manifests.end()) {
    warnings.push_back("'" + id + "': completed but no manifest found; skipped");
    return std::nullopt;
  }
  const GenerationManifest& m = mf->second;
  const GenerationReceipt& receipt = rc->second;
  if (receipt.width != m.width || receipt.height != m.height) {
    warnings.push_back("'" + id + "': receipt is " + std::to_string(receipt.width) + "x" +
                       std::to_string(receipt.height) + " but manifest asked for " +
                       std::to_string(m.width) + "x" + std::to_string(m.height) + "; skipped");
    return std::nullopt;
  }
  if (m.entities.size() != r.annotation.entities.size()) {
    warnings.push_back("'" + id + "': manifest and record disagree on entity count; skipped");
    return std::nullopt;
  }
  if (in.images_dir) {
    const std::filesystem::path p(receipt.image_path);
    const std::filesystem::path full = p.is_absolute() ? p : *in.images_dir / p;
    try {
      const PngHeader h = read_png_header(full);
      if (h.width != m.width || h.height != m.height) {
        warnings.push_back("'" + id + "': image on disk has the wrong size; skipped");
        return std::nullopt;
      }
    } catch (const StageError& e) {
      warnings.push_back("'" + id + "': " + e.what() + "; skipped");
      return std::nullopt;
    }
  }
  return Candidate{&r, &m, &receipt};
}

void append_image(CocoExport& coco, const Candidate& c) {
  const VariationRecord& r = *c.record;
  const GenerationManifest& m = *c.manifest;
  CocoImage im;
  im.id = static_cast<std::int64_t>(coco.images.size() + 1);
  im.file_name = std::filesystem::path(c.receipt->image_path).filename().string();
  im.width = m.width;
  im.height = m.height;
  im.caption = detokenize(r.annotation.caption.tokens);
  im.seed_id = r.seed_id;
  im.variant_index = r.variant_index;
  for (std::size_t e = 0; e < r.annotation.entities.size(); ++e) {
    const BBox px = denormalize_box(m.entities[e].box, Dims{m.width, m.height});
    CocoAnnotation a;
    a.id = static_cast<std::int64_t>(coco.annotations.size() + 1);
    a.image_id = im.id;
    a.bbox = {snap(px.x_min), snap(px.y_min), snap(px.x_max - px.x_min), snap(px.y_max - px.y_min)};
    a.area = a.bbox[2] * a.bbox[3];
    a.query = detokenize(query_text(r.annotation, e));
    a.is_varied = e == r.varied_entity;
    coco.annotations.push_back(std::move(a));
  }
  coco.images.push_back(std::move(im));
}

std::vector<const VariationRecord*> sorted_records(const std::vector<VariationRecord>& records) {
  std::vector<const VariationRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return variation_order(*a, *b); });
  return out;
}

}  // namespace

BuildResult build_dataset(const BuildInputs& inputs) {
  BuildResult result;
  for (Split s : kAllSplits) {
    result.splits[s];
    result.counts[s];
  }
  for (const VariationRecord* r : sorted_records(inputs.records)) {
    const Split split = assign_split(*r, inputs.splits);
    bool not_completed = false;
    auto candidate = check_candidate(inputs, *r, result.warnings, not_completed);
    if (!candidate) {
      if (not_completed) {
        ++result.not_completed;
      } else {
        ++result.skipped;
      }
      continue;
    }
    append_image(result.splits[split], *candidate);
  }
  for (Split s : kAllSplits) {
    result.counts[s] = {result.splits[s].images.size(), result.splits[s].annotations.size()};
  }
  return result;
}

CocoExport export_coco(const BuildInputs& inputs, Split split, std::vector<std::string>* warnings) {
  CocoExport coco;
  std::vector<std::string> local;
  for (const VariationRecord* r : sorted_records(inputs.records)) {
    if (assign_split(*r, inputs.splits) != split) continue;
    bool not_completed = false;
    if (auto c = check_candidate(inputs, *r, local, not_completed)) append_image(coco, *c);
  }
  if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
  return coco;
}

}  // namespace recsynth
