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

#include "recsynth/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "recsynth/color.hpp"
#include "recsynth/dataset.hpp"
#include "recsynth/errors.hpp"
#include "recsynth/flickr.hpp"
#include "recsynth/mock_renderer.hpp"
#include "recsynth/parallel.hpp"
#include "recsynth/variation.hpp"

namespace recsynth::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

void require_file(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(std::string("missing required option ") + flag);
  if (!fs::is_regular_file(p)) {
    throw UsageError(std::string(flag) + ": '" + p.string() + "' is not a readable file");
  }
}

void require_dir(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(std::string("missing required option ") + flag);
  if (!fs::is_directory(p)) {
    throw UsageError(std::string(flag) + ": '" + p.string() + "' is not a directory");
  }
}

void require_output(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(std::string("missing required option ") + flag);
}

Json opt_path(const std::optional<fs::path>& p) { return p ? Json(p->string()) : Json(nullptr); }

ColorVocabulary load_vocab(const std::optional<fs::path>& path) {
  if (!path) return ColorVocabulary::standard();
  require_file(*path, "--vocab");
  return ColorVocabulary::from_file(*path);
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

fs::path report_path_for(const fs::path& output) {
  return fs::path(output.string() + ".report.json");
}

void write_lines(const fs::path& path, const std::vector<Json>& values) {
  std::string text;
  for (const auto& v : values) text += to_jsonl_line(v);
  write_text_file(path, text);
}

}  // namespace

Json StageReport::to_json() const {
  Json j;
  j["stage"] = stage;
  j["summary"] = summary;
  j["counts"] = counts;
  j["warnings"] = warnings;
  j["outputs"] = outputs;
  if (!details.empty()) j["details"] = details;
  j["config"] = config;
  j["duration_ms"] = duration_ms;
  return j;
}

void write_report(const StageReport& report, const fs::path& path) {
  write_text_file(path, report.to_json().dump(2) + "\n");
}

StageReport run_ingest(const IngestArgs& args) {
  const auto start = Clock::now();
  require_dir(args.sentences, "--sentences");
  require_file(args.boxes, "--boxes");
  require_output(args.out, "--out");
  if (args.dims) require_file(*args.dims, "--dims");
  const ColorVocabulary vocab = load_vocab(args.vocab);

  const flickr::BoxIndex boxes = flickr::load_box_records(args.boxes);
  const flickr::DimsIndex dims = args.dims ? flickr::load_dims(*args.dims) : flickr::DimsIndex{};
  flickr::IngestOptions options;
  options.only_color_seeds = args.only_color_seeds;
  options.jobs = args.jobs;
  const auto result = flickr::ingest_directory(args.sentences, boxes, dims, vocab, options);

  std::vector<Json> lines;
  lines.reserve(result.annotations.size());
  for (const auto& a : result.annotations) lines.push_back(annotation_to_json(a));
  write_lines(args.out, lines);

  StageReport r;
  r.stage = "ingest";
  r.config = {{"sentences", args.sentences.string()}, {"boxes", args.boxes.string()},
              {"dims", opt_path(args.dims)},          {"out", args.out.string()},
              {"vocab", opt_path(args.vocab)},        {"only_color_seeds", args.only_color_seeds},
              {"jobs", args.jobs}};
  const auto& s = result.stats;
  r.counts = {{"files", s.files},
              {"sentences", s.sentences},
              {"chunks", s.chunks},
              {"dropped_boxless_chunks", s.dropped_boxless},
              {"ineligible_sentences", s.ineligible},
              {"non_color_sentences", s.non_color},
              {"annotations", s.emitted}};
  if (s.dropped_boxless > 0) {
    r.warnings.push_back(std::to_string(s.dropped_boxless) + " chunks without boxes were dropped");
  }
  r.outputs = {args.out.string()};
  r.summary = std::to_string(s.emitted) + " annotations";
  r.duration_ms = elapsed_ms(start);
  write_report(r, report_path_for(args.out));
  return r;
}

StageReport run_vary(const VaryArgs& args) {
  const auto start = Clock::now();
  require_file(args.in, "--in");
  require_output(args.out, "--out");
  const ColorVocabulary vocab = load_vocab(args.vocab);

  std::vector<Annotation> annotations;
  std::set<std::string> ids;
  read_jsonl(args.in, [&](std::size_t, const Json& j) {
    Annotation a = annotation_from_json(j);
    if (auto issues = validate(a); !issues.empty()) {
      throw StageError("annotation '" + a.id + "' is invalid: " + describe(issues));
    }
    if (!ids.insert(a.id).second) throw StageError("duplicate annotation id '" + a.id + "'");
    annotations.push_back(std::move(a));
  });

  auto per_annotation = parallel_map(annotations.size(), args.jobs, [&](std::size_t i) {
    return vary(annotations[i], vocab, args.seed);
  });
  std::vector<VariationRecord> records;
  std::size_t eligible = 0;
  std::size_t varied_entities = 0;
  for (auto& batch : per_annotation) {
    if (!batch.empty()) ++eligible;
    varied_entities += batch.size() / kVariantsPerEntity;
    for (auto& rec : batch) records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(), variation_order);

  std::vector<Json> lines;
  lines.reserve(records.size());
  for (const auto& rec : records) lines.push_back(variation_to_json(rec));
  write_lines(args.out, lines);

  StageReport r;
  r.stage = "vary";
  r.config = {{"in", args.in.string()}, {"out", args.out.string()}, {"seed", args.seed},
              {"vocab", opt_path(args.vocab)}, {"jobs", args.jobs}};
  r.counts = {{"annotations", annotations.size()},
              {"eligible_annotations", eligible},
              {"varied_entities", varied_entities},
              {"records", records.size()}};
  r.outputs = {args.out.string()};
  r.summary = std::to_string(records.size()) + " records";
  r.duration_ms = elapsed_ms(start);
  write_report(r, report_path_for(args.out));
  return r;
}

StageReport run_emit_manifests(const EmitArgs& args) {
  const auto start = Clock::now();
  require_file(args.in, "--in");
  require_output(args.out, "--out");
  if (args.dims) require_file(*args.dims, "--dims");
  if (args.canvas.width <= 0 || args.canvas.height <= 0) {
    throw UsageError("canvas dimensions must be positive");
  }
  const flickr::DimsIndex dims = args.dims ? flickr::load_dims(*args.dims) : flickr::DimsIndex{};

  std::vector<Json> lines;
  std::set<std::string> ids;
  std::size_t count = 0;
  read_jsonl(args.in, [&](std::size_t, const Json& j) {
    const VariationRecord rec = variation_from_json(j);
    std::optional<Dims> source;
    if (rec.annotation.image) {
      if (auto it = dims.find(rec.annotation.image->ref); it != dims.end()) {
        source = Dims{it->second.first, it->second.second};
      }
    }
    GenerationManifest m = to_manifest(rec, source, args.canvas);
    if (!ids.insert(m.manifest_id).second) {
      throw StageError("manifest id collision on '" + m.manifest_id + "'");
    }
    lines.push_back(manifest_to_json(m));
    ++count;
  });
  write_lines(args.out, lines);

  StageReport r;
  r.stage = "emit-manifests";
  r.config = {{"in", args.in.string()},
              {"out", args.out.string()},
              {"dims", opt_path(args.dims)},
              {"canvas", Json::array({args.canvas.width, args.canvas.height})}};
  r.counts = {{"manifests", count}};
  r.outputs = {args.out.string()};
  r.summary = std::to_string(count) + " manifests";
  r.duration_ms = elapsed_ms(start);
  write_report(r, report_path_for(args.out));
  return r;
}

StageReport run_render_mock(const RenderArgs& args) {
  const auto start = Clock::now();
  require_file(args.manifests, "--manifests");
  require_output(args.out_dir, "--out-dir");
  require_output(args.receipts, "--receipts");
  const ColorVocabulary vocab = load_vocab(args.vocab);
  ColorMap colormap = ColorMap::standard();
  if (args.colormap) {
    require_file(*args.colormap, "--colormap");
    colormap = ColorMap::from_file(*args.colormap);
  }
  if (auto problems = colormap.check(vocab); !problems.empty()) {
    std::string msg = "colormap is unusable:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw StageError(msg);
  }

  const auto manifests = load_manifests(args.manifests);
  fs::create_directories(args.out_dir);
  const auto receipts = render_all(manifests, colormap, args.out_dir, args.jobs, vocab);

  std::string text;
  std::size_t ok = 0;
  for (const auto& rc : receipts) {
    text += to_jsonl_line(receipt_to_json(rc));
    if (rc.ok()) ++ok;
  }
  if (args.append) {
    if (args.receipts.has_parent_path()) fs::create_directories(args.receipts.parent_path());
    std::ofstream out(args.receipts, std::ios::binary | std::ios::app);
    if (!out) throw StageError("cannot append to '" + args.receipts.string() + "'");
    out << text;
  } else {
    write_text_file(args.receipts, text);
  }

  StageReport r;
  r.stage = "render-mock";
  r.config = {{"manifests", args.manifests.string()}, {"out_dir", args.out_dir.string()},
              {"receipts", args.receipts.string()},   {"colormap", opt_path(args.colormap)},
              {"vocab", opt_path(args.vocab)},        {"append", args.append},
              {"jobs", args.jobs}};
  r.counts = {{"manifests", manifests.size()}, {"ok", ok}, {"failed", receipts.size() - ok}};
  for (const auto& rc : receipts) {
    if (!rc.ok()) r.warnings.push_back("'" + rc.manifest_id + "': " + rc.message);
  }
  r.outputs = {args.out_dir.string(), args.receipts.string()};
  r.summary = std::to_string(ok) + "/" + std::to_string(manifests.size()) + " rendered";
  r.duration_ms = elapsed_ms(start);
  write_report(r, report_path_for(args.receipts));
  return r;
}

namespace {

ReceiptLedger ledger_for(const std::vector<GenerationManifest>& manifests, const fs::path& receipts,
                         std::vector<std::string>& warnings) {
  std::vector<std::string> ids;
  ids.reserve(manifests.size());
  for (const auto& m : manifests) ids.push_back(m.manifest_id);
  ReceiptLoad load = load_receipts(receipts);
  warnings.insert(warnings.end(), load.warnings.begin(), load.warnings.end());
  ReceiptLedger ledger = ingest_receipts(ids, load.receipts);
  warnings.insert(warnings.end(), ledger.warnings.begin(), ledger.warnings.end());
  return ledger;
}

}  // namespace

StageReport run_status(const StatusArgs& args) {
  const auto start = Clock::now();
  require_file(args.manifests, "--manifests");
  require_file(args.receipts, "--receipts");
  const auto manifests = load_manifests(args.manifests);
  StageReport r;
  r.stage = "status";
  const ReceiptLedger ledger = ledger_for(manifests, args.receipts, r.warnings);
  r.config = {{"manifests", args.manifests.string()}, {"receipts", args.receipts.string()}};
  r.counts = {{"manifests", manifests.size()},
              {"completed", ledger.completed.size()},
              {"failed", ledger.failed.size()},
              {"pending", ledger.pending.size()},
              {"quarantined", ledger.quarantined.size()},
              {"superseded", ledger.superseded.size()}};
  Json failed = Json::object();
  for (const auto& [id, rc] : ledger.failed) failed[id] = rc.message;
  r.details = {{"pending", ledger.pending}, {"failed", failed}};
  r.summary = std::to_string(ledger.completed.size()) + " completed, " +
              std::to_string(ledger.failed.size()) + " failed, " +
              std::to_string(ledger.pending.size()) + " pending";
  r.duration_ms = elapsed_ms(start);
  return r;
}

StageReport run_build(const BuildArgs& args) {
  const auto start = Clock::now();
  require_file(args.records, "--records");
  require_file(args.manifests, "--manifests");
  require_file(args.receipts, "--receipts");
  require_file(args.splits, "--splits");
  if (args.images) require_dir(*args.images, "--images");
  require_output(args.out, "--out");

  StageReport r;
  r.stage = "build";
  BuildInputs in;
  read_jsonl(args.records, [&](std::size_t, const Json& j) {
    in.records.push_back(variation_from_json(j));
  });
  const auto manifests = load_manifests(args.manifests);
  in.ledger = ledger_for(manifests, args.receipts, r.warnings);
  for (const auto& m : manifests) in.manifests.emplace(m.manifest_id, m);
  in.splits = SplitAssignment::from_file(args.splits);
  in.images_dir = args.images;

  BuildResult built = build_dataset(in);
  r.warnings.insert(r.warnings.end(), built.warnings.begin(), built.warnings.end());

  fs::create_directories(args.out);
  std::vector<std::size_t> ann_counts;
  std::vector<std::size_t> img_counts;
  Json per_split = Json::object();
  for (Split s : kAllSplits) {
    const fs::path file = args.out / split_file_name(s);
    write_text_file(file, coco_to_string(built.splits[s]));
    r.outputs.push_back(file.string());
    const SplitCounts& c = built.counts[s];
    ann_counts.push_back(c.annotations);
    img_counts.push_back(c.images);
    per_split[std::string(split_name(s))] = {{"images", c.images}, {"annotations", c.annotations}};
  }
  const Reconciliation anns = reconcile(ann_counts, args.expected_annotations);
  const Reconciliation imgs = reconcile(img_counts, args.expected_images);
  if (anns.mismatch) {
    r.warnings.push_back("annotation split sum " + std::to_string(anns.split_sum) +
                         " differs from expected total " + std::to_string(*anns.expected_total));
  }
  if (imgs.mismatch) {
    r.warnings.push_back("image split sum " + std::to_string(imgs.split_sum) +
                         " differs from expected total " + std::to_string(*imgs.expected_total));
  }

  r.config = {{"records", args.records.string()},
              {"manifests", args.manifests.string()},
              {"receipts", args.receipts.string()},
              {"splits", args.splits.string()},
              {"images", opt_path(args.images)},
              {"out", args.out.string()},
              {"expected_annotations", args.expected_annotations ? Json(*args.expected_annotations) : Json(nullptr)},
              {"expected_images", args.expected_images ? Json(*args.expected_images) : Json(nullptr)}};
  r.counts = {{"records", in.records.size()},
              {"not_completed", built.not_completed},
              {"skipped", built.skipped},
              {"images", imgs.split_sum},
              {"annotations", anns.split_sum},
              {"splits", per_split}};
  r.details = {{"annotations_reconciliation",
                {{"split_sum", anns.split_sum},
                 {"expected_total", anns.expected_total ? Json(*anns.expected_total) : Json(nullptr)},
                 {"delta", anns.delta},
                 {"mismatch", anns.mismatch}}},
               {"images_reconciliation",
                {{"split_sum", imgs.split_sum},
                 {"expected_total", imgs.expected_total ? Json(*imgs.expected_total) : Json(nullptr)},
                 {"delta", imgs.delta},
                 {"mismatch", imgs.mismatch}}}};
  r.summary = std::to_string(imgs.split_sum) + " images, " + std::to_string(anns.split_sum) +
              " annotations";
  r.duration_ms = elapsed_ms(start);
  write_report(r, args.out / "build_report.json");
  return r;
}

std::string dataset_name_for(const fs::path& path) {
  const std::string stem = path.stem().string();
  for (Split s : kAllSplits) {
    const std::string suffix = "_" + std::string(split_name(s));
    if (stem.size() >= suffix.size() &&
        stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return std::string(split_name(s));
    }
  }
  return stem;
}

StageReport run_stats(const StatsArgs& args) {
  const auto start = Clock::now();
  if (args.in.empty()) throw UsageError("missing required option --in");
  for (const auto& p : args.in) require_file(p, "--in");
  const ColorVocabulary vocab = load_vocab(args.vocab);

  std::vector<CocoExport> loaded;
  loaded.reserve(args.in.size());
  for (const auto& p : args.in) loaded.push_back(load_coco(p));
  std::vector<NamedDataset> named;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    named.push_back({dataset_name_for(args.in[i]), &loaded[i]});
  }
  const DatasetStats stats = compute_stats(named, vocab);
  std::vector<std::size_t> ann_counts;
  std::vector<std::size_t> img_counts;
  for (const auto& [name, c] : stats.splits) {
    ann_counts.push_back(c.annotations);
    img_counts.push_back(c.images);
  }
  const Reconciliation anns = reconcile(ann_counts, args.expected_annotations);
  const Reconciliation imgs = reconcile(img_counts, args.expected_images);

  StageReport r;
  r.stage = "stats";
  Json inputs = Json::array();
  for (const auto& p : args.in) inputs.push_back(p.string());
  r.config = {{"in", inputs}, {"vocab", opt_path(args.vocab)}};
  r.details = stats_to_json(stats, anns, imgs);
  r.counts = {{"images", stats.total.images}, {"annotations", stats.total.annotations}};
  if (anns.mismatch) {
    r.warnings.push_back("annotation split sum " + std::to_string(anns.split_sum) +
                         " differs from expected total " + std::to_string(*anns.expected_total) +
                         " by " + std::to_string(anns.delta));
  }
  if (imgs.mismatch) {
    r.warnings.push_back("image split sum " + std::to_string(imgs.split_sum) +
                         " differs from expected total " + std::to_string(*imgs.expected_total) +
                         " by " + std::to_string(imgs.delta));
  }
  r.summary = stats_table(stats, anns, imgs);
  r.duration_ms = elapsed_ms(start);
  return r;
}

StageReport run_eval(const EvalArgs& args) {
  const auto start = Clock::now();
  require_file(args.gt, "--gt");
  require_file(args.pred, "--pred");
  Ratio threshold;
  try {
    threshold = Ratio::parse(args.threshold);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  const ColorVocabulary vocab = load_vocab(args.vocab);
  CocoExport gt = load_coco(args.gt);
  const auto preds = load_predictions(args.pred);

  StageReport r;
  r.stage = "eval";
  r.config = {{"gt", args.gt.string()},
              {"pred", args.pred.string()},
              {"color_subset", args.color_subset},
              {"threshold", args.threshold},
              {"vocab", opt_path(args.vocab)}};
  std::vector<Prediction> used = preds;
  if (args.color_subset) {
    ColorSubset subset = color_subset(gt, vocab);
    std::set<std::int64_t> kept;
    for (const auto& a : subset.dataset.annotations) kept.insert(a.id);
    // Predictions for filtered-out annotations are irrelevant, not errors.
    std::set<std::int64_t> all_ids;
    for (const auto& a : gt.annotations) all_ids.insert(a.id);
    used.clear();
    for (const auto& p : preds) {
      if (!all_ids.contains(p.annotation_id)) {
        throw StageError("prediction for unknown annotation id " + std::to_string(p.annotation_id));
      }
      if (kept.contains(p.annotation_id)) used.push_back(p);
    }
    r.counts["subset_kept"] = subset.kept;
    r.counts["subset_total"] = subset.total;
    r.counts["subset_coverage_percent"] = subset.coverage_percent;
    gt = std::move(subset.dataset);
  }
  const AccuracyResult acc = accuracy(used, gt, threshold);
  r.counts["correct"] = acc.correct;
  r.counts["total"] = acc.total;
  r.counts["missing"] = acc.missing;
  r.counts["accuracy"] = acc.accuracy;
  if (acc.missing > 0) {
    r.warnings.push_back(std::to_string(acc.missing) + " ground truths have no prediction");
  }
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "accuracy@IoU>=" << args.threshold << ": " << acc.accuracy << " (" << acc.correct << "/"
     << acc.total << ")";
  if (args.color_subset) {
    os.precision(1);
    os << " on color subset, coverage " << r.counts["subset_coverage_percent"].get<double>() << "%";
  }
  r.summary = os.str();
  r.duration_ms = elapsed_ms(start);
  return r;
}

}  // namespace recsynth::pipeline
