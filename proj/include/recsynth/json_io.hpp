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

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "recsynth/core.hpp"

namespace recsynth {

using Json = nlohmann::ordered_json;

// Integral doubles are emitted as JSON integers so files stay stable and
// readable ("10" rather than "10.0").
Json json_number(double v);

Json box_to_json(const BBox& box);
BBox box_from_json(const Json& j);

// Canonical annotation record:
// {id, image: {ref, width, height}, caption: [tokens],
//  entities: [{span: [j, k], box: [x_min, y_min, x_max, y_max]}]}
// with 1-based inclusive spans.
Json annotation_to_json(const Annotation& a);
Annotation annotation_from_json(const Json& j);

// Compact single-line dump with a trailing newline.
std::string to_jsonl_line(const Json& j);

// Reads a JSONL file line by line. Blank lines are skipped. Line numbers are
// 1-based. Parse failures throw ParseError naming the file and line.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(std::size_t line_no, const Json& value)>& on_record);

// Like read_jsonl, but malformed lines (including a torn final line left by a
// writer that is still appending) go to `on_bad_line` instead of throwing.
void read_jsonl_tolerant(const std::filesystem::path& path,
                         const std::function<void(std::size_t line_no, const Json& value)>& on_record,
                         const std::function<void(std::size_t line_no, const std::string& error)>& on_bad_line);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace recsynth
