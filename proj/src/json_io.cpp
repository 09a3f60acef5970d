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

#include "recsynth/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "recsynth/errors.hpp"

namespace recsynth {

Json json_number(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 9.0e15) {
    return Json(static_cast<std::int64_t>(v));
  }
  return Json(v);
}

Json box_to_json(const BBox& box) {
  return Json::array({json_number(box.x_min), json_number(box.y_min), json_number(box.x_max),
                      json_number(box.y_max)});
}

BBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("box must be an array of 4 numbers");
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("box must be an array of 4 numbers");
  }
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

namespace {

const Json& require(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

Json annotation_to_json(const Annotation& a) {
  Json j;
  j["id"] = a.id;
  if (a.image) {
    Json img;
    img["ref"] = a.image->ref;
    img["width"] = a.image->width ? Json(*a.image->width) : Json(nullptr);
    img["height"] = a.image->height ? Json(*a.image->height) : Json(nullptr);
    j["image"] = std::move(img);
  }
  j["caption"] = a.caption.tokens;
  Json ents = Json::array();
  for (const auto& e : a.entities) {
    Json ej;
    ej["span"] = Json::array({e.span.first_inclusive(), e.span.last_inclusive()});
    ej["box"] = box_to_json(e.box);
    ents.push_back(std::move(ej));
  }
  j["entities"] = std::move(ents);
  return j;
}

Annotation annotation_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("annotation must be a JSON object");
  Annotation a;
  const Json& id = require(j, "id");
  if (id.is_string()) {
    a.id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    a.id = id.dump();
  } else {
    throw ParseError("'id' must be a string or integer");
  }
  if (auto it = j.find("image"); it != j.end() && !it->is_null()) {
    ImageRef ref;
    ref.ref = require(*it, "ref").get<std::string>();
    if (auto w = it->find("width"); w != it->end() && !w->is_null()) ref.width = w->get<int>();
    if (auto h = it->find("height"); h != it->end() && !h->is_null()) ref.height = h->get<int>();
    a.image = std::move(ref);
  }
  const Json& caption = require(j, "caption");
  if (!caption.is_array()) throw ParseError("'caption' must be an array of tokens");
  for (const auto& t : caption) {
    if (!t.is_string()) throw ParseError("caption tokens must be strings");
    a.caption.tokens.push_back(t.get<std::string>());
  }
  const Json& entities = require(j, "entities");
  if (!entities.is_array()) throw ParseError("'entities' must be an array");
  for (const auto& ej : entities) {
    const Json& span = require(ej, "span");
    if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
        !span[1].is_number_integer()) {
      throw ParseError("entity span must be [j, k] integers");
    }
    const auto jj = span[0].get<std::int64_t>();
    const auto kk = span[1].get<std::int64_t>();
    if (jj < 1 || kk < 0) throw ParseError("entity span indices are 1-based");
    Entity e;
    e.span = Span::from_inclusive(static_cast<std::size_t>(jj), static_cast<std::size_t>(kk));
    e.box = box_from_json(require(ej, "box"));
    a.entities.push_back(e);
  }
  return a;
}

std::string to_jsonl_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::strict) + "\n";
}

namespace {

void read_lines(const std::filesystem::path& path,
                const std::function<void(std::size_t, const std::string&, bool)>& on_line) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError("cannot open '" + path.string() + "'");
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < contents.size()) {
    ++line_no;
    const std::size_t nl = contents.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::size_t end = terminated ? nl : contents.size();
    std::string line = contents.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = terminated ? nl + 1 : contents.size();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    on_line(line_no, line, terminated);
  }
}

}  // namespace

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(std::size_t, const Json&)>& on_record) {
  read_lines(path, [&](std::size_t line_no, const std::string& line, bool) {
    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      on_record(line_no, value);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  });
}

void read_jsonl_tolerant(const std::filesystem::path& path,
                         const std::function<void(std::size_t, const Json&)>& on_record,
                         const std::function<void(std::size_t, const std::string&)>& on_bad_line) {
  read_lines(path, [&](std::size_t line_no, const std::string& line, bool) {
    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::parse_error& e) {
      on_bad_line(line_no, e.what());
      return;
    }
    try {
      on_record(line_no, value);
    } catch (const std::exception& e) {
      on_bad_line(line_no, e.what());
    }
  });
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError("cannot open '" + path.string() + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StageError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw StageError("write failed for '" + path.string() + "'");
}

}  // namespace recsynth
