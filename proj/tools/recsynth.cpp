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

// Command-line entry point for the synthetic REC data pipeline:
//   ingest -> vary -> emit-manifests -> render-mock | external worker
//          -> status -> build -> stats / eval
//
// Options may also come from a JSON file given with --config. Top-level keys
// apply to every subcommand, an object keyed by the subcommand name applies
// to that subcommand only, and flags given on the command line always win.
//
// Exit status: 0 success, 1 runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recsynth/errors.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/pipeline.hpp"

namespace fs = std::filesystem;
using recsynth::Json;
namespace pl = recsynth::pipeline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

const std::set<std::string> kSubcommands = {"ingest", "vary",  "emit-manifests", "render-mock",
                                            "status", "build", "stats",          "eval"};

// Appends "--key value" for every config entry the subcommand understands and
// whose flag is absent from argv.
void append_config_flags(const Json& section, const CLI::App& sub, std::vector<std::string>& args,
                         std::set<std::string>& present) {
  if (!section.is_object()) return;
  for (const auto& [key, value] : section.items()) {
    if (kSubcommands.contains(key) || key == "config") continue;
    std::string flag = "--" + key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    if (present.contains(flag) || sub.get_option_no_throw(flag) == nullptr) continue;
    present.insert(flag);
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array() && key != "canvas") {
      for (const auto& v : value) {
        args.push_back(flag);
        args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else if (key == "canvas" && value.is_array() && value.size() == 2) {
      args.push_back(flag);
      args.push_back(value[0].dump() + "x" + value[1].dump());
    } else if (!value.is_null()) {
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
}

// Returns argv with config-derived flags merged in.
std::vector<std::string> expand_config(int argc, char** argv, const CLI::App& app) {
  std::vector<std::string> args(argv, argv + argc);
  std::optional<std::string> config_path;
  std::string subcommand;
  std::set<std::string> present;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else if (subcommand.empty() && kSubcommands.contains(a)) {
      subcommand = a;
    } else if (a.rfind("--", 0) == 0) {
      present.insert(a.substr(0, a.find('=')));
    }
  }
  if (!config_path || subcommand.empty()) return args;
  const Json config = recsynth::read_json_file(*config_path);
  if (!config.is_object()) throw recsynth::UsageError("--config must hold a JSON object");
  const CLI::App* sub = app.get_subcommand(subcommand);
  std::vector<std::string> extra;
  if (auto it = config.find(subcommand); it != config.end()) {
    append_config_flags(*it, *sub, extra, present);
  }
  append_config_flags(config, *sub, extra, present);
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

recsynth::Dims parse_canvas(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int w = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    const int h = std::stoi(rest, &used);
    if (used != rest.size() || w <= 0 || h <= 0) throw std::invalid_argument(text);
    return {w, h};
  } catch (const std::logic_error&) {
    throw recsynth::UsageError("--canvas expects WIDTHxHEIGHT, got '" + text + "'");
  }
}

std::optional<fs::path> opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

void print_report(const pl::StageReport& r, const std::string& report_path) {
  std::cout << r.summary;
  if (r.summary.empty() || r.summary.back() != '\n') std::cout << "\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (!report_path.empty()) pl::write_report(r, report_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Color-driven synthetic data pipeline for referring expression comprehension"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default option values");

  std::size_t jobs = 1;
  std::string vocab;

  // ingest
  pl::IngestArgs ingest;
  std::string ingest_dims;
  auto* c_ingest = app.add_subcommand("ingest", "Parse bracket-markup sentences and box records");
  c_ingest->add_option("--sentences", ingest.sentences, "Directory of sentence files")->required();
  c_ingest->add_option("--boxes", ingest.boxes, "Box records JSONL")->required();
  c_ingest->add_option("--out", ingest.out, "Output annotations JSONL")->required();
  c_ingest->add_option("--dims", ingest_dims, "Image dimensions JSONL {image_ref,width,height}");
  c_ingest->add_flag("--only-color-seeds", ingest.only_color_seeds,
                     "Keep only annotations with a color-bearing entity");
  c_ingest->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_ingest->add_option("--vocab", vocab, "Color vocabulary JSON (array of words)");

  // vary
  pl::VaryArgs vary;
  auto* c_vary = app.add_subcommand("vary", "Generate color variations of annotations");
  c_vary->add_option("--in", vary.in, "Annotations JSONL")->required();
  c_vary->add_option("--out", vary.out, "Output variations JSONL")->required();
  c_vary->add_option("--seed", vary.seed, "Global seed (unsigned 64-bit)")->required();
  c_vary->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_vary->add_option("--vocab", vocab, "Color vocabulary JSON (array of words)");

  // emit-manifests
  pl::EmitArgs emit;
  std::string emit_dims;
  std::string canvas = "512x512";
  auto* c_emit = app.add_subcommand("emit-manifests", "Write grounded-generation manifests");
  c_emit->add_option("--in", emit.in, "Variations JSONL")->required();
  c_emit->add_option("--out", emit.out, "Output manifests JSONL")->required();
  c_emit->add_option("--dims", emit_dims,
                     "Source image dimensions JSONL; falls back to dims stored in records");
  c_emit->add_option("--canvas", canvas, "Output canvas WIDTHxHEIGHT")->capture_default_str();

  // render-mock
  pl::RenderArgs render;
  std::string colormap;
  auto* c_render = app.add_subcommand("render-mock", "Render manifests with the flat-color mock backend");
  c_render->add_option("--manifests", render.manifests, "Manifests JSONL")->required();
  c_render->add_option("--out-dir", render.out_dir, "Directory for <manifest_id>.png")->required();
  c_render->add_option("--receipts", render.receipts, "Receipts JSONL to write")->required();
  c_render->add_option("--colormap", colormap, "Colormap JSON (default: built-in v1)");
  c_render->add_flag("--append", render.append, "Append to the receipts file instead of replacing it");
  c_render->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_render->add_option("--vocab", vocab, "Color vocabulary JSON (array of words)");

  // status
  pl::StatusArgs status;
  std::string status_report;
  auto* c_status = app.add_subcommand("status", "Classify manifests as completed, failed or pending");
  c_status->add_option("--manifests", status.manifests, "Manifests JSONL")->required();
  c_status->add_option("--receipts", status.receipts, "Receipts JSONL")->required();
  c_status->add_option("--report", status_report, "Write the JSON report here");

  // build
  pl::BuildArgs build;
  std::string build_images;
  std::int64_t build_expected_anns = -1;
  std::int64_t build_expected_imgs = -1;
  auto* c_build = app.add_subcommand("build", "Assemble COCO-format train/val/test files");
  c_build->add_option("--records", build.records, "Variations JSONL")->required();
  c_build->add_option("--manifests", build.manifests, "Manifests JSONL")->required();
  c_build->add_option("--receipts", build.receipts, "Receipts JSONL")->required();
  c_build->add_option("--splits", build.splits, "Split map JSON {train:[...],val:[...],test:[...]}")
      ->required();
  c_build->add_option("--images", build_images, "Directory holding generated images");
  c_build->add_option("--out", build.out, "Output directory")->required();
  c_build->add_option("--expected-total", build_expected_anns,
                      "Expected total annotation count to reconcile against");
  c_build->add_option("--expected-images", build_expected_imgs,
                      "Expected total image count to reconcile against");

  // stats
  pl::StatsArgs stats;
  std::vector<std::string> stats_in;
  std::string stats_report;
  std::int64_t stats_expected_anns = -1;
  std::int64_t stats_expected_imgs = -1;
  auto* c_stats = app.add_subcommand("stats", "Dataset statistics");
  c_stats->add_option("--in", stats_in, "COCO JSON file(s); repeat for several splits")->required();
  c_stats->add_option("--expected-total", stats_expected_anns,
                      "Expected total annotation count to reconcile against");
  c_stats->add_option("--expected-images", stats_expected_imgs,
                      "Expected total image count to reconcile against");
  c_stats->add_option("--report", stats_report, "Write the JSON report here");
  c_stats->add_option("--vocab", vocab, "Color vocabulary JSON (array of words)");

  // eval
  pl::EvalArgs eval;
  std::string eval_report;
  auto* c_eval = app.add_subcommand("eval", "Accuracy at an IoU threshold");
  c_eval->add_option("--gt", eval.gt, "Ground-truth COCO JSON")->required();
  c_eval->add_option("--pred", eval.pred, "Predictions JSONL {annotation_id, box}")->required();
  c_eval->add_flag("--color-subset", eval.color_subset,
                   "Restrict to queries that mention a vocabulary color");
  c_eval->add_option("--threshold", eval.threshold, "IoU threshold, decimal or ratio")
      ->capture_default_str();
  c_eval->add_option("--report", eval_report, "Write the JSON report here");
  c_eval->add_option("--vocab", vocab, "Color vocabulary JSON (array of words)");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv, app);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (c_ingest->parsed()) {
      ingest.dims = opt(ingest_dims);
      ingest.vocab = opt(vocab);
      ingest.jobs = jobs;
      print_report(pl::run_ingest(ingest), "");
    } else if (c_vary->parsed()) {
      vary.vocab = opt(vocab);
      vary.jobs = jobs;
      print_report(pl::run_vary(vary), "");
    } else if (c_emit->parsed()) {
      emit.dims = opt(emit_dims);
      emit.canvas = parse_canvas(canvas);
      print_report(pl::run_emit_manifests(emit), "");
    } else if (c_render->parsed()) {
      render.colormap = opt(colormap);
      render.vocab = opt(vocab);
      render.jobs = jobs;
      print_report(pl::run_render_mock(render), "");
    } else if (c_status->parsed()) {
      print_report(pl::run_status(status), status_report);
    } else if (c_build->parsed()) {
      build.images = opt(build_images);
      if (build_expected_anns >= 0) build.expected_annotations = static_cast<std::size_t>(build_expected_anns);
      if (build_expected_imgs >= 0) build.expected_images = static_cast<std::size_t>(build_expected_imgs);
      print_report(pl::run_build(build), "");
    } else if (c_stats->parsed()) {
      for (const auto& s : stats_in) stats.in.emplace_back(s);
      stats.vocab = opt(vocab);
      if (stats_expected_anns >= 0) stats.expected_annotations = static_cast<std::size_t>(stats_expected_anns);
      if (stats_expected_imgs >= 0) stats.expected_images = static_cast<std::size_t>(stats_expected_imgs);
      print_report(pl::run_stats(stats), stats_report);
    } else if (c_eval->parsed()) {
      eval.vocab = opt(vocab);
      print_report(pl::run_eval(eval), eval_report);
    }
  } catch (const recsynth::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
