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

#include "recsynth/variation.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <tuple>

#include "recsynth/errors.hpp"

namespace recsynth {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv_u64(std::uint64_t h, std::uint64_t v) {
  unsigned char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
  return fnv_bytes(h, le, sizeof le);
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Unbiased draw in [0, n). std::uniform_int_distribution is
// implementation-defined, so the reduction is done by hand.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

}  // namespace

std::uint64_t derive_entity_seed(std::uint64_t global_seed, std::string_view annotation_id,
                                 std::size_t entity_index) {
  std::uint64_t h = fnv_u64(kFnvOffset, global_seed);
  h = fnv_u64(h, annotation_id.size());
  h = fnv_bytes(h, annotation_id.data(), annotation_id.size());
  h = fnv_u64(h, entity_index);
  return splitmix64(h);
}

std::uint64_t derive_variant_seed(std::uint64_t entity_seed, std::size_t variant_index) {
  return splitmix64(entity_seed ^ splitmix64(variant_index)) & ((std::uint64_t{1} << 53) - 1);
}

std::vector<std::string> sample_colors(std::string_view original, std::size_t count,
                                       std::uint64_t rng_seed, const ColorVocabulary& vocab) {
  const auto orig_index = vocab.index_of(original);
  if (!orig_index) {
    throw ContractError("'" + std::string(original) + "' is not a vocabulary color");
  }
  std::vector<std::string> pool;
  pool.reserve(vocab.size() - 1);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (i != *orig_index) pool.push_back(vocab.colors()[i]);
  }
  if (count > pool.size()) {
    throw ContractError("cannot draw " + std::to_string(count) + " distinct colors from " +
                        std::to_string(pool.size()) + " candidates");
  }
  std::mt19937_64 rng(rng_seed);
  // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

Annotation replace_in_span(const Annotation& annotation, std::size_t entity_index,
                           std::size_t position, const Tokens& replacement) {
  if (entity_index >= annotation.entities.size()) {
    throw ContractError("entity index " + std::to_string(entity_index) + " out of range");
  }
  const Span target = annotation.entities[entity_index].span;
  if (target.begin >= target.end || target.end > annotation.caption.size()) {
    throw ContractError("entity " + std::to_string(entity_index) + " has an invalid span");
  }
  if (position >= target.size()) {
    throw ContractError("position " + std::to_string(position) + " outside entity span of " +
                        std::to_string(target.size()) + " tokens");
  }
  if (replacement.empty()) throw ContractError("replacement must hold at least one token");
  for (const auto& t : replacement) {
    if (t.empty() || contains_whitespace(t)) {
      throw ContractError("replacement token '" + t + "' is not a single word");
    }
  }

  const std::size_t edit = target.begin + position;
  Annotation out = annotation;
  auto& tokens = out.caption.tokens;
  tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(edit));
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(edit), replacement.begin(),
                replacement.end());

  const auto grow = static_cast<std::ptrdiff_t>(replacement.size()) - 1;
  if (grow != 0) {
    auto shift = [grow](std::size_t v) {
      return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(v) + grow);
    };
    for (auto& e : out.entities) {
      if (e.span.begin > edit) {
        e.span.begin = shift(e.span.begin);
        e.span.end = shift(e.span.end);
      } else if (e.span.contains(edit)) {
        e.span.end = shift(e.span.end);
      }
    }
  }
  return out;
}

Annotation resplice(const Annotation& annotation, std::size_t entity_index,
                    std::size_t color_position, std::string_view new_token) {
  return replace_in_span(annotation, entity_index, color_position, Tokens{std::string(new_token)});
}

std::string match_case(std::string_view original, std::string_view color) {
  auto is_upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto is_lower = [](char c) { return c >= 'a' && c <= 'z'; };
  std::string out(color);
  const bool all_upper = original.size() > 1 && std::none_of(original.begin(), original.end(), is_lower);
  if (all_upper) {
    for (char& c : out) {
      if (is_lower(c)) c = static_cast<char>(c - 'a' + 'A');
    }
  } else if (!original.empty() && is_upper(original.front()) && !out.empty() && is_lower(out[0])) {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  return out;
}

std::vector<VariationRecord> vary(const Annotation& annotation, const ColorVocabulary& vocab,
                                  std::uint64_t global_seed) {
  std::vector<VariationRecord> out;
  for (std::size_t p = 0; p < annotation.entities.size(); ++p) {
    const Tokens query = query_text(annotation, p);
    const auto pos = detect_color(query, vocab);
    if (!pos) continue;
    const std::string& source_token = query[*pos];
    const std::string original = to_lower_ascii(source_token);
    const std::uint64_t entity_seed = derive_entity_seed(global_seed, annotation.id, p);
    const auto colors = sample_colors(original, kVariantsPerEntity, entity_seed, vocab);
    for (std::size_t v = 0; v < colors.size(); ++v) {
      VariationRecord r;
      r.seed_id = annotation.id;
      r.variant_index = v + 1;
      r.varied_entity = p;
      r.edited_token = annotation.entities[p].span.begin + *pos;
      r.original_color = original;
      r.new_color = colors[v];
      r.rng_seed = derive_variant_seed(entity_seed, v + 1);
      r.annotation = resplice(annotation, p, *pos, match_case(source_token, colors[v]));
      out.push_back(std::move(r));
    }
  }
  return out;
}

Json variation_to_json(const VariationRecord& r) {
  Json j;
  j["seed_id"] = r.seed_id;
  j["variant_index"] = r.variant_index;
  j["varied_entity"] = r.varied_entity + 1;
  j["edited_token"] = r.edited_token + 1;
  j["original_color"] = r.original_color;
  j["new_color"] = r.new_color;
  j["rng_seed"] = r.rng_seed;
  j["annotation"] = annotation_to_json(r.annotation);
  return j;
}

VariationRecord variation_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("variation record must be a JSON object");
  auto positive = [&](const char* key) -> std::size_t {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer() || it->get<std::int64_t>() < 1) {
      throw ParseError(std::string("'") + key + "' must be a positive integer");
    }
    return it->get<std::size_t>();
  };
  VariationRecord r;
  r.seed_id = j.at("seed_id").get<std::string>();
  r.variant_index = positive("variant_index");
  r.varied_entity = positive("varied_entity") - 1;
  r.edited_token = positive("edited_token") - 1;
  r.original_color = j.at("original_color").get<std::string>();
  r.new_color = j.at("new_color").get<std::string>();
  r.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  r.annotation = annotation_from_json(j.at("annotation"));
  return r;
}

bool variation_order(const VariationRecord& a, const VariationRecord& b) {
  return std::tie(a.seed_id, a.varied_entity, a.variant_index) <
         std::tie(b.seed_id, b.varied_entity, b.variant_index);
}

}  // namespace recsynth
