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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "recsynth/color.hpp"
#include "recsynth/errors.hpp"
#include "recsynth/generation.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/variation.hpp"

namespace recsynth {
namespace {

VariationRecord record_with_box(BBox box, std::optional<ImageRef> image) {
  VariationRecord r;
  r.seed_id = "img 9#0";
  r.variant_index = 2;
  r.varied_entity = 0;
  r.rng_seed = 77;
  r.annotation.id = r.seed_id;
  r.annotation.caption.tokens = {"a", "blue", "kite", "flies"};
  r.annotation.entities = {Entity{Span::from_inclusive(1, 3), box}};
  r.annotation.image = std::move(image);
  return r;
}

TEST(NormalizeBoxTest, FullFrameIsUnitBox) {
  EXPECT_EQ(normalize_box(BBox{0, 0, 640, 480}, Dims{640, 480}), (NormBox{0, 0, 1, 1}));
}

TEST(NormalizeBoxTest, Arithmetic) {
  const NormBox b = normalize_box(BBox{10, 20, 30, 40}, Dims{100, 200});
  EXPECT_DOUBLE_EQ(b.x0, 0.1);
  EXPECT_DOUBLE_EQ(b.y0, 0.1);
  EXPECT_DOUBLE_EQ(b.x1, 0.3);
  EXPECT_DOUBLE_EQ(b.y1, 0.2);
}

TEST(NormalizeBoxTest, ClampsOverhang) {
  EXPECT_EQ(normalize_box(BBox{50, 0, 150, 100}, Dims{100, 100}), (NormBox{0.5, 0, 1, 1}));
}

TEST(NormalizeBoxTest, RoundTripWithinHalfPixelUpToTenThousand) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5000; ++i) {
    const int w = 1 + static_cast<int>(rng() % 10000);
    const int h = 1 + static_cast<int>(rng() % 10000);
    const double x0 = static_cast<double>(rng() % static_cast<unsigned>(w));
    const double y0 = static_cast<double>(rng() % static_cast<unsigned>(h));
    const BBox b{x0, y0, x0 + 1 + static_cast<double>(rng() % static_cast<unsigned>(w - x0)),
                 y0 + 1 + static_cast<double>(rng() % static_cast<unsigned>(h - y0))};
    const BBox back = denormalize_box(normalize_box(b, {w, h}), {w, h});
    ASSERT_LE(std::abs(back.x_min - b.x_min), 0.5);
    ASSERT_LE(std::abs(back.y_min - b.y_min), 0.5);
    ASSERT_LE(std::abs(back.x_max - b.x_max), 0.5);
    ASSERT_LE(std::abs(back.y_max - b.y_max), 0.5);
  }
}

TEST(ManifestIdTest, SanitizesSeedId) {
  EXPECT_EQ(manifest_id_for(record_with_box({0, 0, 1, 1}, std::nullopt)), "img_9_0-e1-v2");
}

TEST(ToManifestTest, BuildsPromptPhrasesAndSeed) {
  const auto m = to_manifest(record_with_box({10, 20, 30, 40}, ImageRef{"i", 100, 200}), std::nullopt);
  EXPECT_EQ(m.prompt, "a blue kite flies");
  ASSERT_EQ(m.entities.size(), 1u);
  EXPECT_EQ(m.entities[0].phrase, "a blue kite");
  EXPECT_EQ(m.rng_seed, 77u);
  EXPECT_EQ(m.width, 512);
  EXPECT_EQ(m.height, 512);
  EXPECT_TRUE(validate_manifest(m).empty());
}

TEST(ToManifestTest, ExplicitDimsOverrideAndCanvas) {
  const auto m = to_manifest(record_with_box({10, 20, 30, 40}, ImageRef{"i", 1, 1}),
                             Dims{100, 200}, Dims{256, 128});
  EXPECT_DOUBLE_EQ(m.entities[0].box.x1, 0.3);
  EXPECT_EQ(m.width, 256);
  EXPECT_EQ(m.height, 128);
}

TEST(ToManifestTest, MissingDimensionsIsAnError) {
  EXPECT_THROW(to_manifest(record_with_box({1, 1, 5, 5}, std::nullopt), std::nullopt), StageError);
  EXPECT_THROW(to_manifest(record_with_box({1, 1, 5, 5}, ImageRef{"i", std::nullopt, 4}), std::nullopt),
               StageError);
}

TEST(ToManifestTest, ZeroAreaAfterClampIsAnError) {
  EXPECT_THROW(to_manifest(record_with_box({120, 10, 150, 20}, std::nullopt), Dims{100, 100}),
               StageError);
}

TEST(ToManifestTest, FiftyRecordsRoundTripToSourceBoxes) {
  std::mt19937_64 rng(50);
  testing::AnnotationGenOptions opts;
  opts.color_probability = 1.0;
  std::size_t manifests = 0;
  for (int i = 0; manifests < 50; ++i) {
    const Annotation a = testing::random_annotation(rng, "m" + std::to_string(i), opts);
    const auto recs = vary(a, ColorVocabulary::standard(), 3);
    if (recs.empty()) continue;
    const Dims src{*a.image->width, *a.image->height};
    const auto m = to_manifest(recs.front(), std::nullopt);
    ++manifests;
    ASSERT_EQ(m.entities.size(), a.entities.size());
    for (std::size_t e = 0; e < a.entities.size(); ++e) {
      const BBox back = denormalize_box(m.entities[e].box, src);
      const BBox& orig = a.entities[e].box;
      EXPECT_LE(std::abs(back.x_min - orig.x_min), 0.5);
      EXPECT_LE(std::abs(back.y_min - orig.y_min), 0.5);
      EXPECT_LE(std::abs(back.x_max - orig.x_max), 0.5);
      EXPECT_LE(std::abs(back.y_max - orig.y_max), 0.5);
    }
  }
}

TEST(ManifestJsonTest, RoundTripAndFieldNames) {
  const auto m = to_manifest(record_with_box({10, 20, 30, 40}, ImageRef{"i", 100, 200}), std::nullopt);
  const Json j = manifest_to_json(m);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"manifest_id", "prompt", "entities", "rng_seed", "width",
                                            "height"}));
  EXPECT_EQ(manifest_from_json(Json::parse(j.dump())), m);
}

TEST(ManifestJsonTest, RejectsInvalidBoxesAndDuplicates) {
  const auto m = to_manifest(record_with_box({10, 20, 30, 40}, ImageRef{"i", 100, 200}), std::nullopt);
  Json j = manifest_to_json(m);
  j["entities"][0]["box"] = Json::array({0.5, 0.1, 0.4, 0.2});
  EXPECT_THROW(manifest_from_json(j), ParseError);

  const auto dir = testing::make_temp_dir("manifests");
  const std::string line = to_jsonl_line(manifest_to_json(m));
  write_text_file(dir / "m.jsonl", line + line);
  EXPECT_THROW(load_manifests(dir / "m.jsonl"), ParseError);
  std::filesystem::remove_all(dir);
}

GenerationReceipt ok(const std::string& id) {
  return GenerationReceipt{id, id + ".png", 512, 512, "t", ReceiptStatus::kOk, ""};
}
GenerationReceipt failed(const std::string& id) {
  return GenerationReceipt{id, "", 0, 0, "t", ReceiptStatus::kFailed, "boom"};
}

TEST(LedgerTest, AllCompleted) {
  const auto l = ingest_receipts({"a", "b", "c"}, {ok("a"), ok("b"), ok("c")});
  EXPECT_EQ(l.completed.size(), 3u);
  EXPECT_TRUE(l.pending.empty());
}

TEST(LedgerTest, OneFailedTwoPending) {
  const auto l = ingest_receipts({"a", "b", "c"}, {failed("b")});
  EXPECT_EQ(l.failed.size(), 1u);
  EXPECT_EQ(l.pending, (std::vector<std::string>{"a", "c"}));
}

TEST(LedgerTest, OkWinsOverFailureInEitherOrder) {
  for (const auto& rs : {std::vector{ok("a"), failed("a")}, std::vector{failed("a"), ok("a")}}) {
    const auto l = ingest_receipts({"a"}, rs);
    EXPECT_EQ(l.completed.size(), 1u);
    EXPECT_TRUE(l.failed.empty());
    EXPECT_TRUE(l.pending.empty());
    EXPECT_EQ(l.superseded.size(), 1u);
  }
}

TEST(LedgerTest, FirstOkIsKept) {
  GenerationReceipt second = ok("a");
  second.image_path = "other.png";
  const auto l = ingest_receipts({"a"}, {ok("a"), second});
  EXPECT_EQ(l.completed.at("a").image_path, "a.png");
  EXPECT_EQ(l.superseded.size(), 1u);
}

TEST(LedgerTest, UnknownIdsAreQuarantined) {
  const auto l = ingest_receipts({"a"}, {ok("zzz"), ok("a")});
  ASSERT_EQ(l.quarantined.size(), 1u);
  EXPECT_EQ(l.quarantined[0].manifest_id, "zzz");
  EXPECT_FALSE(l.warnings.empty());
  EXPECT_EQ(l.completed.size(), 1u);
}

TEST(LedgerTest, EveryIdClassifiedExactlyOnce) {
  std::mt19937_64 rng(12);
  std::vector<std::string> ids;
  for (int i = 0; i < 40; ++i) ids.push_back("m" + std::to_string(i));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GenerationReceipt> rs;
    const auto n = rng() % 80;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string id = rng() % 10 ? ids[rng() % ids.size()] : "ghost";
      rs.push_back(rng() % 2 ? ok(id) : failed(id));
    }
    const auto l = ingest_receipts(ids, rs);
    for (const auto& id : ids) {
      const int hits = static_cast<int>(l.completed.count(id) + l.failed.count(id)) +
                       static_cast<int>(std::count(l.pending.begin(), l.pending.end(), id));
      ASSERT_EQ(hits, 1) << id;
    }
    ASSERT_EQ(l.completed.size() + l.failed.size() + l.superseded.size() + l.quarantined.size(),
              rs.size());
  }
}

TEST(ReceiptFileTest, TornLineIsSkippedWithWarning) {
  const auto dir = testing::make_temp_dir("receipts");
  std::string text = to_jsonl_line(receipt_to_json(ok("a"))) + to_jsonl_line(receipt_to_json(failed("b")));
  text += R"({"manifest_id":"c","image_pa)";
  write_text_file(dir / "r.jsonl", text);
  const auto load = load_receipts(dir / "r.jsonl");
  ASSERT_EQ(load.receipts.size(), 2u);
  EXPECT_EQ(load.receipts[0], ok("a"));
  EXPECT_EQ(load.receipts[1], failed("b"));
  ASSERT_EQ(load.warnings.size(), 1u);
  EXPECT_NE(load.warnings[0].find(":3:"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(ReceiptJsonTest, OkReceiptNeedsImageAndDims) {
  Json j = receipt_to_json(ok("a"));
  EXPECT_FALSE(j.contains("message"));
  j["width"] = 0;
  EXPECT_THROW(receipt_from_json(j), ParseError);
  Json f = receipt_to_json(failed("a"));
  EXPECT_EQ(f.at("message"), "boom");
  f["status"] = "maybe";
  EXPECT_THROW(receipt_from_json(f), ParseError);
}

}  // namespace
}  // namespace recsynth
