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

// Evaluation and statistics: IoU, accuracy at an IoU threshold, the
// color-attribute subset filter and dataset summary statistics.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recsynth/color.hpp"
#include "recsynth/core.hpp"
#include "recsynth/dataset.hpp"
#include "recsynth/json_io.hpp"

namespace recsynth {

// Exact rational threshold, so "IoU >= 0.5" has no rounding at the boundary.
struct Ratio {
  std::int64_t num = 1;
  std::int64_t den = 2;

  // Accepts "0.5", "1/2" or "1". Throws ParseError otherwise.
  static Ratio parse(const std::string& text);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline constexpr Ratio kDefaultIouThreshold{1, 2};

// area(a ∩ b) / area(a ∪ b); 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

// iou(a, b) >= threshold. Exact when all eight coordinates are integers of
// magnitude below 2^31; otherwise evaluated in long double.
bool iou_at_least(const BBox& a, const BBox& b, Ratio threshold = kDefaultIouThreshold);

struct Prediction {
  std::int64_t annotation_id = 0;
  BBox box;
};

// JSONL: {annotation_id, box: [x_min, y_min, x_max, y_max]}.
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
Json prediction_to_json(const Prediction& p);

struct AccuracyResult {
  std::size_t correct = 0;
  std::size_t total = 0;    // ground-truth annotations
  std::size_t missing = 0;  // ground truths without a prediction
  double accuracy = 0;
  std::map<std::int64_t, bool> hits;  // per ground-truth annotation id
};

// Fraction of ground-truth annotations whose prediction reaches the
// threshold; missing predictions count as wrong. Duplicate predictions and
// predictions for unknown ids throw StageError.
AccuracyResult accuracy(const std::vector<Prediction>& predictions, const CocoExport& ground_truth,
                        Ratio threshold = kDefaultIouThreshold);

struct ColorSubset {
  CocoExport dataset;  // ids kept as-is so predictions still resolve
  std::size_t kept = 0;
  std::size_t total = 0;
  double coverage_percent = 0;
};

// Annotations whose query holds at least one vocabulary color; images
// without any kept annotation are dropped.
ColorSubset color_subset(const CocoExport& dataset, const ColorVocabulary& vocab);

struct LengthStats {
  std::size_t count = 0;
  double mean = 0;
  double stddev = 0;  // population
  std::size_t median = 0;  // lower middle element for even counts
  std::size_t max = 0;
};

// Throws StageError on an empty input.
LengthStats length_stats(std::span<const std::size_t> lengths);

struct DatasetStats {
  std::vector<std::pair<std::string, SplitCounts>> splits;  // input order
  SplitCounts total;
  LengthStats words_per_query;
  std::map<std::string, std::size_t> color_histogram;  // first color per query, or "none"
};

struct NamedDataset {
  std::string name;
  const CocoExport* dataset;
};

DatasetStats compute_stats(const std::vector<NamedDataset>& datasets,
                           const ColorVocabulary& vocab = ColorVocabulary::standard());

struct Reconciliation {
  std::size_t split_sum = 0;
  std::optional<std::size_t> expected_total;
  std::int64_t delta = 0;  // split_sum - expected_total
  bool mismatch = false;
};

Reconciliation reconcile(std::span<const std::size_t> split_counts,
                         std::optional<std::size_t> expected_total);

double round2(double v);

Json stats_to_json(const DatasetStats& stats, const std::optional<Reconciliation>& annotations_check,
                   const std::optional<Reconciliation>& images_check);
std::string stats_table(const DatasetStats& stats,
                        const std::optional<Reconciliation>& annotations_check,
                        const std::optional<Reconciliation>& images_check);

}  // namespace recsynth
