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

#include <random>

#include "oracles.hpp"
#include "fixtures.hpp"
#include "recsynth/core.hpp"
#include "recsynth/errors.hpp"
#include "recsynth/json_io.hpp"

namespace recsynth {
namespace {

Annotation shirt_annotation() {
  Annotation a;
  a.id = "a1";
  a.caption.tokens = {"a", "man", "in", "a", "red", "shirt"};
  a.entities = {Entity{Span::from_inclusive(4, 6), BBox{10, 10, 50, 80}}};
  a.image = ImageRef{"img1", 100, 100};
  return a;
}

TEST(TokenizeTest, SplitsOnUnicodeWhitespaceAndKeepsPunctuation) {
  EXPECT_EQ(tokenize("  A man ,  runs.\t"), (Tokens{"A", "man", ",", "runs."}));
  // U+00A0 no-break space and U+3000 ideographic space separate tokens.
  EXPECT_EQ(tokenize("red\xC2\xA0shirt\xE3\x80\x80hat"), (Tokens{"red", "shirt", "hat"}));
  EXPECT_TRUE(tokenize(" \n\t ").empty());
  // Non-space multibyte characters stay inside tokens.
  EXPECT_EQ(tokenize("caf\xC3\xA9 ok"), (Tokens{"caf\xC3\xA9", "ok"}));
}

TEST(QueryTextTest, SlicesSpan) {
  const Annotation a = shirt_annotation();
  EXPECT_EQ(query_text(a, 0), (Tokens{"a", "red", "shirt"}));
}

TEST(QueryTextTest, SingleTokenSpanIsFirstToken) {
  Annotation a = shirt_annotation();
  a.entities[0].span = Span::from_inclusive(1, 1);
  EXPECT_EQ(query_text(a, 0), (Tokens{"a"}));
}

TEST(QueryTextTest, OutOfRangeIndexIsContractViolation) {
  const Annotation a = shirt_annotation();
  EXPECT_THROW(query_text(a, 1), ContractError);
}

TEST(QueryTextTest, NestedSpansMatchSubstringOracle) {
  Annotation a = shirt_annotation();
  a.entities = {Entity{Span::from_inclusive(2, 6), BBox{0, 0, 90, 90}},
                Entity{Span::from_inclusive(4, 6), BBox{10, 10, 50, 80}}};
  EXPECT_EQ(query_text(a, 0), testing::substring_query_oracle(a.caption.tokens, 2, 6));
  EXPECT_EQ(query_text(a, 1), testing::substring_query_oracle(a.caption.tokens, 4, 6));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Annotation r = testing::random_annotation(rng, "q" + std::to_string(i));
    for (std::size_t e = 0; e < r.entities.size(); ++e) {
      const Span s = r.entities[e].span;
      ASSERT_EQ(query_text(r, e),
                testing::substring_query_oracle(r.caption.tokens, s.first_inclusive(), s.last_inclusive()));
    }
  }
}

TEST(ValidateTest, WellFormedHasNoViolations) {
  EXPECT_TRUE(validate(shirt_annotation()).empty());
}

TEST(ValidateTest, SpanBeyondCaption) {
  Annotation a = shirt_annotation();
  a.entities[0].span = Span::from_inclusive(4, 7);
  const auto v = validate(a);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kSpanOutOfBounds);
  EXPECT_EQ(v[0].field, "entities[0].span");
}

TEST(ValidateTest, DegenerateBox) {
  Annotation a = shirt_annotation();
  a.entities[0].box.x_max = a.entities[0].box.x_min;
  const auto v = validate(a);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, rules::kDegenerateBox);
}

TEST(ValidateTest, ReportsEveryBrokenRule) {
  Annotation a;
  a.caption.tokens = {"ok", "", "two words"};
  a.image = ImageRef{"x", 10, 10};
  a.entities = {Entity{Span{2, 1}, BBox{-1, 0, 20, 5}}};
  const auto v = validate(a);
  std::vector<std::string> got;
  for (const auto& x : v) got.push_back(x.rule);
  EXPECT_EQ(got, (std::vector<std::string>{"empty-id", "empty-token", "token-whitespace",
                                           "empty-span", "negative-coordinate",
                                           "box-outside-image"}));
  Annotation empty;
  empty.id = "e";
  const auto ve = validate(empty);
  ASSERT_EQ(ve.size(), 2u);
  EXPECT_EQ(ve[0].rule, rules::kEmptyCaption);
  EXPECT_EQ(ve[1].rule, rules::kNoEntities);
}

TEST(ValidateTest, IsTotalOnArbitraryInput) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Annotation a;
    a.id = i % 7 ? "x" : "";
    const auto n = rng() % 4;
    for (std::size_t t = 0; t < n; ++t) a.caption.tokens.push_back(rng() % 5 ? "w" : "");
    const auto ne = rng() % 3;
    for (std::size_t e = 0; e < ne; ++e) {
      a.entities.push_back(Entity{Span{rng() % 6, rng() % 6},
                                  BBox{double(rng() % 9) - 2, double(rng() % 9), double(rng() % 9),
                                       std::numeric_limits<double>::quiet_NaN()}});
    }
    EXPECT_NO_THROW(validate(a));
    // Accepted records always have non-empty, in-bounds queries.
    if (validate(a).empty()) {
      for (std::size_t e = 0; e < a.entities.size(); ++e) EXPECT_FALSE(query_text(a, e).empty());
    }
  }
}

TEST(AnnotationJsonTest, UsesOneBasedInclusiveSpans) {
  const Json j = annotation_to_json(shirt_annotation());
  EXPECT_EQ(j.dump(),
            R"({"id":"a1","image":{"ref":"img1","width":100,"height":100},)"
            R"("caption":["a","man","in","a","red","shirt"],)"
            R"("entities":[{"span":[4,6],"box":[10,10,50,80]}]})");
}

TEST(AnnotationJsonTest, RoundTripsRandomAnnotations) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Annotation a = testing::random_annotation(rng, "rt" + std::to_string(i));
    const Annotation back = annotation_from_json(Json::parse(annotation_to_json(a).dump()));
    ASSERT_EQ(a, back);
  }
}

TEST(AnnotationJsonTest, RejectsZeroBasedSpan) {
  Json j = annotation_to_json(shirt_annotation());
  j["entities"][0]["span"] = Json::array({0, 2});
  EXPECT_THROW(annotation_from_json(j), ParseError);
}

}  // namespace
}  // namespace recsynth
