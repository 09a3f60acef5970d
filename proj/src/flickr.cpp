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

#include "recsynth/flickr.hpp"

#include <algorithm>
#include <fstream>

#include "recsynth/errors.hpp"
#include "recsynth/json_io.hpp"
#include "recsynth/parallel.hpp"

namespace recsynth::flickr {

namespace {

constexpr std::string_view kChunkPrefix = "/EN#";

bool is_digit(char c) { return c >= '0' && c <= '9'; }

EntityChunk parse_chunk_header(std::string_view header, std::size_t base) {
  if (header.substr(0, kChunkPrefix.size()) != kChunkPrefix) {
    throw ParseError("entity chunk must start with '/EN#'", base);
  }
  std::size_t i = kChunkPrefix.size();
  const std::size_t digits_start = i;
  while (i < header.size() && is_digit(header[i])) ++i;
  if (i == digits_start) throw ParseError("entity chunk is missing its chain id", base + i);
  if (i - digits_start > 18) throw ParseError("chain id too long", base + digits_start);
  EntityChunk chunk;
  chunk.chain_id = std::stoll(std::string(header.substr(digits_start, i - digits_start)));
  while (i < header.size()) {
    if (header[i] != '/') {
      throw ParseError("unexpected character in entity chunk header", base + i);
    }
    ++i;
    const std::size_t start = i;
    while (i < header.size() && header[i] != '/') ++i;
    if (i == start) throw ParseError("empty type label in entity chunk", base + start);
    chunk.types.emplace_back(header.substr(start, i - start));
  }
  if (chunk.types.empty()) {
    throw ParseError("entity chunk needs at least one type label", base + i);
  }
  return chunk;
}

}  // namespace

ParsedSentence parse_sentence(const RawSentence& raw) {
  const std::string_view text = raw.markup;
  ParsedSentence out;
  auto& tokens = out.caption.tokens;
  auto flush_plain = [&](std::size_t from, std::size_t to) {
    for (auto& t : tokenize(text.substr(from, to - from))) tokens.push_back(std::move(t));
  };

  std::size_t plain_start = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ']') throw ParseError("unbalanced ']'", pos);
    if (c != '[') {
      ++pos;
      continue;
    }
    flush_plain(plain_start, pos);
    const std::size_t close = text.find(']', pos + 1);
    const std::size_t nested = text.find('[', pos + 1);
    if (nested != std::string_view::npos && (close == std::string_view::npos || nested < close)) {
      throw ParseError("nested or unterminated entity chunk", nested);
    }
    if (close == std::string_view::npos) throw ParseError("unterminated entity chunk", pos);

    const std::string_view inner = text.substr(pos + 1, close - pos - 1);
    if (inner.empty() || inner.front() != '/') {
      throw ParseError("entity chunk must start with '/EN#'", pos + 1);
    }
    Tokens parts = tokenize(inner);
    EntityChunk chunk = parse_chunk_header(parts.front(), pos + 1);
    if (parts.size() < 2) throw ParseError("entity chunk has an empty phrase", pos);
    chunk.words.assign(parts.begin() + 1, parts.end());

    Span span{tokens.size(), tokens.size() + chunk.words.size()};
    tokens.insert(tokens.end(), chunk.words.begin(), chunk.words.end());
    out.chunks.push_back(ChunkSpan{std::move(chunk), span});

    pos = close + 1;
    plain_start = pos;
  }
  flush_plain(plain_start, text.size());
  if (tokens.empty()) throw ParseError("sentence has no tokens", 0);
  return out;
}

std::string reconstruct_markup(const ParsedSentence& parsed) {
  const auto& tokens = parsed.caption.tokens;
  std::vector<const ChunkSpan*> starts(tokens.size(), nullptr);
  for (const auto& c : parsed.chunks) {
    if (c.span.begin < starts.size()) starts[c.span.begin] = &c;
  }
  std::string out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!out.empty()) out.push_back(' ');
    if (const ChunkSpan* c = starts[i]) {
      out += "[/EN#" + std::to_string(c->chunk.chain_id);
      for (const auto& t : c->chunk.types) out += "/" + t;
      for (std::size_t k = c->span.begin; k < c->span.end; ++k) out += " " + tokens[k];
      out += "]";
      i = c->span.end;
    } else {
      out += tokens[i++];
    }
  }
  return out;
}

BoxIndex load_box_records(const std::filesystem::path& path) {
  BoxIndex index;
  read_jsonl(path, [&](std::size_t, const Json& j) {
    if (!j.is_object()) throw ParseError("box record must be a JSON object");
    const std::string ref = j.at("image_ref").is_string() ? j.at("image_ref").get<std::string>()
                                                          : j.at("image_ref").dump();
    const auto chain = j.at("chain_id").get<std::int64_t>();
    if (chain < 0) throw ParseError("chain_id must be non-negative");
    const BBox box = box_from_json(j.at("box"));
    if (auto issues = validate_box(box, "box"); !issues.empty()) {
      throw ParseError("invalid box: " + describe(issues));
    }
    index[ref][chain].push_back(box);
  });
  return index;
}

DimsIndex load_dims(const std::filesystem::path& path) {
  DimsIndex dims;
  read_jsonl(path, [&](std::size_t, const Json& j) {
    const std::string ref = j.at("image_ref").is_string() ? j.at("image_ref").get<std::string>()
                                                          : j.at("image_ref").dump();
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    if (w <= 0 || h <= 0) throw ParseError("image dimensions must be positive");
    dims[ref] = {w, h};
  });
  return dims;
}

AttachResult attach_boxes(const ParsedSentence& parsed, const std::string& annotation_id,
                          const std::map<std::int64_t, std::vector<BBox>>& chain_boxes,
                          std::optional<ImageRef> image) {
  AttachResult result;
  result.annotation.id = annotation_id;
  result.annotation.caption = parsed.caption;
  result.annotation.image = std::move(image);
  for (const auto& c : parsed.chunks) {
    auto it = chain_boxes.find(c.chunk.chain_id);
    if (it == chain_boxes.end() || it->second.empty()) {
      ++result.dropped_boxless;
      continue;
    }
    BBox box = it->second.front();
    for (const auto& b : it->second) box = box_union(box, b);
    result.annotation.entities.push_back(Entity{c.span, box});
  }
  return result;
}

bool has_color_entity(const Annotation& annotation, const ColorVocabulary& vocab) {
  for (std::size_t e = 0; e < annotation.entities.size(); ++e) {
    if (detect_color(query_text(annotation, e), vocab)) return true;
  }
  return false;
}

std::vector<Annotation> select_color_seeds(const std::vector<Annotation>& corpus,
                                           const ColorVocabulary& vocab) {
  std::vector<Annotation> out;
  std::copy_if(corpus.begin(), corpus.end(), std::back_inserter(out),
               [&](const Annotation& a) { return has_color_entity(a, vocab); });
  return out;
}

namespace {

struct SentenceTask {
  std::string image_ref;
  std::filesystem::path file;
  std::size_t line_index = 0;
  std::string markup;
};

struct SentenceOutcome {
  std::optional<Annotation> annotation;
  std::size_t chunks = 0;
  std::size_t dropped = 0;
  bool ineligible = false;
  bool non_color = false;
};

}  // namespace

IngestResult ingest_directory(const std::filesystem::path& sentences_dir, const BoxIndex& boxes,
                              const DimsIndex& dims, const ColorVocabulary& vocab,
                              const IngestOptions& options) {
  if (!std::filesystem::is_directory(sentences_dir)) {
    throw StageError("'" + sentences_dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(sentences_dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  IngestResult result;
  result.stats.files = files.size();
  std::vector<SentenceTask> tasks;
  for (const auto& file : files) {
    const std::string text = read_text_file(file);
    std::size_t line_index = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      std::string line = text.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!tokenize(line).empty()) {
        tasks.push_back({file.stem().string(), file, line_index, std::move(line)});
      }
      ++line_index;
      pos = nl + 1;
    }
  }
  result.stats.sentences = tasks.size();

  static const std::map<std::int64_t, std::vector<BBox>> kNoBoxes;
  auto outcomes = parallel_map(tasks.size(), options.jobs, [&](std::size_t i) {
    const SentenceTask& t = tasks[i];
    const std::string where = t.file.string() + ":" + std::to_string(t.line_index + 1);
    ParsedSentence parsed;
    try {
      parsed = parse_sentence(RawSentence{t.image_ref, t.markup});
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    SentenceOutcome out;
    out.chunks = parsed.chunks.size();
    auto it = boxes.find(t.image_ref);
    ImageRef image{t.image_ref, std::nullopt, std::nullopt};
    if (auto d = dims.find(t.image_ref); d != dims.end()) {
      image.width = d->second.first;
      image.height = d->second.second;
    }
    const std::string id = t.image_ref + "_" + std::to_string(t.line_index);
    AttachResult attached =
        attach_boxes(parsed, id, it == boxes.end() ? kNoBoxes : it->second, image);
    out.dropped = attached.dropped_boxless;
    if (!attached.eligible()) {
      out.ineligible = true;
      return out;
    }
    if (auto issues = validate(attached.annotation); !issues.empty()) {
      throw StageError(where + ": record '" + id + "' is invalid: " + describe(issues));
    }
    if (options.only_color_seeds && !has_color_entity(attached.annotation, vocab)) {
      out.non_color = true;
      return out;
    }
    out.annotation = std::move(attached.annotation);
    return out;
  });

  for (auto& o : outcomes) {
    result.stats.chunks += o.chunks;
    result.stats.dropped_boxless += o.dropped;
    if (o.ineligible) ++result.stats.ineligible;
    if (o.non_color) ++result.stats.non_color;
    if (o.annotation) result.annotations.push_back(std::move(*o.annotation));
  }
  result.stats.emitted = result.annotations.size();
  return result;
}

}  // namespace recsynth::flickr
