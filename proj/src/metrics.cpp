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

#include "recsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "recsynth/errors.hpp"

namespace recsynth {

namespace {

using i128 = __int128;

bool small_integer(double v) {
  return std::floor(v) == v && std::fabs(v) < 2147483648.0;
}

struct Overlap {
  i128 inter;
  i128 uni;
};

Overlap integer_overlap(const BBox& a, const BBox& b) {
  auto L = [](double v) { return static_cast<std::int64_t>(v); };
  const std::int64_t iw = std::max<std::int64_t>(
      0, std::min(L(a.x_max), L(b.x_max)) - std::max(L(a.x_min), L(b.x_min)));
  const std::int64_t ih = std::max<std::int64_t>(
      0, std::min(L(a.y_max), L(b.y_max)) - std::max(L(a.y_min), L(b.y_min)));
  const i128 inter = static_cast<i128>(iw) * ih;
  const i128 area_a = static_cast<i128>(L(a.x_max) - L(a.x_min)) * (L(a.y_max) - L(a.y_min));
  const i128 area_b = static_cast<i128>(L(b.x_max) - L(b.x_min)) * (L(b.y_max) - L(b.y_min));
  return {inter, area_a + area_b - inter};
}

bool all_small_integers(const BBox& a, const BBox& b) {
  return small_integer(a.x_min) && small_integer(a.y_min) && small_integer(a.x_max) &&
         small_integer(a.y_max) && small_integer(b.x_min) && small_integer(b.y_min) &&
         small_integer(b.x_max) && small_integer(b.y_max);
}

long double float_iou(const BBox& a, const BBox& b) {
  using ld = long double;
  const ld iw = std::max<ld>(0, std::min<ld>(a.x_max, b.x_max) - std::max<ld>(a.x_min, b.x_min));
  const ld ih = std::max<ld>(0, std::min<ld>(a.y_max, b.y_max) - std::max<ld>(a.y_min, b.y_min));
  const ld inter = iw * ih;
  const ld uni = static_cast<ld>(a.width()) * a.height() + static_cast<ld>(b.width()) * b.height() - inter;
  return uni > 0 ? inter / uni : 0;
}

}  // namespace

Ratio Ratio::parse(const std::string& text) {
  auto fail = [&] { return ParseError("invalid threshold '" + text + "'"); };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string::npos) {
    try {
      std::size_t used = 0;
      const auto num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw fail();
      const std::string rest = text.substr(slash + 1);
      const auto den = std::stoll(rest, &used);
      if (used != rest.size() || den <= 0 || num < 0) throw fail();
      return Ratio{num, den};
    } catch (const std::logic_error&) {
      throw fail();
    }
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_dot = false;
  bool any_digit = false;
  for (char c : text) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      if (num > 100000000000000LL || den > 100000000000000LL) throw fail();
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      any_digit = true;
    } else {
      throw fail();
    }
  }
  if (!any_digit) throw fail();
  return Ratio{num, den};
}

double iou(const BBox& a, const BBox& b) {
  if (all_small_integers(a, b)) {
    const Overlap o = integer_overlap(a, b);
    if (o.uni <= 0) return 0;
    return static_cast<double>(static_cast<long double>(o.inter) / static_cast<long double>(o.uni));
  }
  return static_cast<double>(float_iou(a, b));
}

bool iou_at_least(const BBox& a, const BBox& b, Ratio threshold) {
  if (all_small_integers(a, b)) {
    const Overlap o = integer_overlap(a, b);
    if (o.uni <= 0) return threshold.num <= 0;
    return o.inter * threshold.den >= static_cast<i128>(threshold.num) * o.uni;
  }
  return float_iou(a, b) * threshold.den >= static_cast<long double>(threshold.num);
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  read_jsonl(path, [&](std::size_t, const Json& j) {
    Prediction p;
    p.annotation_id = j.at("annotation_id").get<std::int64_t>();
    p.box = box_from_json(j.at("box"));
    if (auto issues = validate_box(p.box, "box"); !issues.empty()) {
      throw ParseError("prediction for annotation " + std::to_string(p.annotation_id) +
                       " has an invalid box: " + describe(issues));
    }
    out.push_back(p);
  });
  return out;
}

Json prediction_to_json(const Prediction& p) {
  Json j;
  j["annotation_id"] = p.annotation_id;
  j["box"] = box_to_json(p.box);
  return j;
}

AccuracyResult accuracy(const std::vector<Prediction>& predictions, const CocoExport& ground_truth,
                        Ratio threshold) {
  std::map<std::int64_t, const CocoAnnotation*> gts;
  for (const auto& a : ground_truth.annotations) gts.emplace(a.id, &a);
  std::map<std::int64_t, const Prediction*> by_id;
  for (const auto& p : predictions) {
    if (!gts.contains(p.annotation_id)) {
      throw StageError("prediction for unknown annotation id " + std::to_string(p.annotation_id));
    }
    if (!by_id.emplace(p.annotation_id, &p).second) {
      throw StageError("duplicate prediction for annotation id " + std::to_string(p.annotation_id));
    }
  }
  AccuracyResult r;
  r.total = gts.size();
  for (const auto& [id, gt] : gts) {
    auto it = by_id.find(id);
    bool hit = false;
    if (it == by_id.end()) {
      ++r.missing;
    } else {
      hit = iou_at_least(it->second->box, from_coco_bbox(gt->bbox), threshold);
    }
    r.hits[id] = hit;
    if (hit) ++r.correct;
  }
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

ColorSubset color_subset(const CocoExport& dataset, const ColorVocabulary& vocab) {
  ColorSubset out;
  out.dataset.categories = dataset.categories;
  std::set<std::int64_t> kept_images;
  for (const auto& a : dataset.annotations) {
    if (detect_color(tokenize(a.query), vocab)) {
      out.dataset.annotations.push_back(a);
      kept_images.insert(a.image_id);
    }
  }
  for (const auto& im : dataset.images) {
    if (kept_images.contains(im.id)) out.dataset.images.push_back(im);
  }
  out.kept = out.dataset.annotations.size();
  out.total = dataset.annotations.size();
  out.coverage_percent =
      out.total == 0 ? 0.0 : 100.0 * static_cast<double>(out.kept) / static_cast<double>(out.total);
  return out;
}

LengthStats length_stats(std::span<const std::size_t> lengths) {
  if (lengths.empty()) throw StageError("no referring expressions to summarize");
  LengthStats s;
  s.count = lengths.size();
  i128 sum = 0;
  i128 sum_sq = 0;
  for (std::size_t v : lengths) {
    sum += v;
    sum_sq += static_cast<i128>(v) * v;
    s.max = std::max(s.max, v);
  }
  const auto n = static_cast<i128>(s.count);
  s.mean = static_cast<double>(static_cast<long double>(sum) / static_cast<long double>(n));
  // n^2 * variance = n * sum_sq - sum^2, exact in integers.
  const i128 scaled_var = n * sum_sq - sum * sum;
  s.stddev = static_cast<double>(
      std::sqrt(static_cast<long double>(scaled_var)) / static_cast<long double>(n));
  std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  s.median = sorted[mid];
  return s;
}

DatasetStats compute_stats(const std::vector<NamedDataset>& datasets, const ColorVocabulary& vocab) {
  DatasetStats stats;
  std::vector<std::size_t> lengths;
  for (const auto& d : datasets) {
    SplitCounts c{d.dataset->images.size(), d.dataset->annotations.size()};
    stats.splits.emplace_back(d.name, c);
    stats.total.images += c.images;
    stats.total.annotations += c.annotations;
    for (const auto& a : d.dataset->annotations) {
      const Tokens words = tokenize(a.query);
      lengths.push_back(words.size());
      const auto pos = detect_color(words, vocab);
      ++stats.color_histogram[pos ? to_lower_ascii(words[*pos]) : "none"];
    }
  }
  stats.words_per_query = length_stats(lengths);
  return stats;
}

Reconciliation reconcile(std::span<const std::size_t> split_counts,
                         std::optional<std::size_t> expected_total) {
  Reconciliation r;
  for (std::size_t c : split_counts) r.split_sum += c;
  r.expected_total = expected_total;
  if (expected_total) {
    r.delta = static_cast<std::int64_t>(r.split_sum) - static_cast<std::int64_t>(*expected_total);
    r.mismatch = r.delta != 0;
  }
  return r;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

namespace {

Json reconciliation_json(const Reconciliation& r) {
  Json j;
  j["split_sum"] = r.split_sum;
  j["expected_total"] = r.expected_total ? Json(*r.expected_total) : Json(nullptr);
  j["delta"] = r.delta;
  j["mismatch"] = r.mismatch;
  return j;
}

}  // namespace

Json stats_to_json(const DatasetStats& stats, const std::optional<Reconciliation>& annotations_check,
                   const std::optional<Reconciliation>& images_check) {
  Json j;
  Json splits = Json::object();
  for (const auto& [name, c] : stats.splits) {
    splits[name] = Json{{"images", c.images}, {"annotations", c.annotations}};
  }
  j["splits"] = std::move(splits);
  j["total"] = Json{{"images", stats.total.images}, {"annotations", stats.total.annotations}};
  const LengthStats& w = stats.words_per_query;
  j["words_per_query"] = Json{{"count", w.count},
                              {"mean", w.mean},
                              {"std", w.stddev},
                              {"mean_rounded", round2(w.mean)},
                              {"std_rounded", round2(w.stddev)},
                              {"median", w.median},
                              {"max", w.max}};
  Json hist = Json::object();
  for (const auto& [k, v] : stats.color_histogram) hist[k] = v;
  j["color_histogram"] = std::move(hist);
  if (annotations_check) j["annotations_reconciliation"] = reconciliation_json(*annotations_check);
  if (images_check) j["images_reconciliation"] = reconciliation_json(*images_check);
  return j;
}

std::string stats_table(const DatasetStats& stats,
                        const std::optional<Reconciliation>& annotations_check,
                        const std::optional<Reconciliation>& images_check) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "split" << std::right << std::setw(14) << "images"
     << std::setw(14) << "annotations" << "\n";
  for (const auto& [name, c] : stats.splits) {
    os << std::left << std::setw(10) << name << std::right << std::setw(14) << c.images
       << std::setw(14) << c.annotations << "\n";
  }
  os << std::left << std::setw(10) << "total" << std::right << std::setw(14) << stats.total.images
     << std::setw(14) << stats.total.annotations << "\n\n";
  const LengthStats& w = stats.words_per_query;
  os << std::fixed << std::setprecision(2) << "words per query: " << w.mean << " +- " << w.stddev
     << " (median " << w.median << ", max " << w.max << ", n=" << w.count << ")\n";
  os << "colors:";
  for (const auto& [k, v] : stats.color_histogram) os << " " << k << "=" << v;
  os << "\n";
  auto line = [&](const char* what, const Reconciliation& r) {
    os << what << " split sum " << r.split_sum;
    if (r.expected_total) {
      os << " vs expected " << *r.expected_total;
      if (r.mismatch) {
        os << "  MISMATCH (" << (r.delta > 0 ? "+" : "") << r.delta << ")";
      } else {
        os << "  ok";
      }
    }
    os << "\n";
  };
  if (annotations_check) line("annotations:", *annotations_check);
  if (images_check) line("images:", *images_check);
  return os.str();
}

}  // namespace recsynth
