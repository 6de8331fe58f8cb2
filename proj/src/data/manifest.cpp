// Copyright 2026 The SwinScan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <sstream>

#include "swinscan/data.hpp"
#include "swinscan/error.hpp"

namespace swinscan::data {

std::string_view task_name(Task task) {
  return task == Task::kDetection ? "detection" : "classification";
}

Task parse_task(std::string_view name) {
  if (name == "detection") return Task::kDetection;
  if (name == "classification") return Task::kClassification;
  throw InputError("unknown task '" + std::string(name) + "'");
}

std::size_t num_classes(Task task) { return class_names(task).size(); }

const std::vector<std::string>& class_names(Task task) {
  static const std::vector<std::string> detection{"No", "Yes"};
  static const std::vector<std::string> classification{"Meningioma Tumor", "Glioma Tumor", "Pituitary Tumor"};
  return task == Task::kDetection ? detection : classification;
}

std::size_t class_id(Task task, std::string_view name) {
  const auto& names = class_names(task);
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw InputError("class '" + std::string(name) + "' is not valid for task " + std::string(task_name(task)));
  return static_cast<std::size_t>(it - names.begin());
}

void DatasetManifest::validate() const {
  std::map<std::string, std::size_t> tally;
  for (const auto& e : entries) {
    if (e.task != task) throw InputError("manifest mixes tasks");
    if (class_id(task, e.class_name) != e.label) throw InputError("label does not match class '" + e.class_name + "'");
    ++tally[e.class_name];
  }
  if (tally != counts) throw InputError("manifest class counts do not match entries");
}

namespace {

// One CSV record. Returns false at end of input.
bool read_record(std::string_view text, std::size_t& pos, std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false, was_quoted = false;
  while (true) {
    if (pos >= text.size()) {
      if (quoted) throw ParseError("unterminated quoted field", pos);
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = text[pos];
    if (quoted) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          pos += 2;
        } else {
          quoted = false;
          ++pos;
        }
      } else {
        field += ch;
        ++pos;
      }
      continue;
    }
    if (ch == '"') {
      if (!field.empty() || was_quoted) throw ParseError("stray quote", pos);
      quoted = was_quoted = true;
      ++pos;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
      ++pos;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && (pos + 1 >= text.size() || text[pos + 1] != '\n')) throw ParseError("bare carriage return", pos);
      pos += ch == '\r' ? 2 : 1;
      fields.push_back(std::move(field));
      return true;
    } else {
      if (was_quoted) throw ParseError("text after closing quote", pos);
      field += ch;
      ++pos;
    }
  }
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  std::vector<std::string> fields;
  if (!read_record(text, pos, fields) || fields != std::vector<std::string>{"path", "task", "class"})
    throw ParseError("manifest header must be 'path,task,class'", 0);

  DatasetManifest m;
  bool have_task = false;
  std::size_t row = 0;
  while (true) {
    const std::size_t row_start = pos;
    if (!read_record(text, pos, fields)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), row_start);
    ManifestEntry e;
    if (fields[0].empty()) throw ParseError("empty path", row_start);
    std::filesystem::path p(fields[0]);
    e.path = (p.is_absolute() || base_dir.empty() ? p : base_dir / p).lexically_normal().string();
    try {
      e.task = parse_task(fields[1]);
    } catch (const InputError& err) {
      throw ParseError(err.what(), row_start);
    }
    if (!have_task) {
      m.task = e.task;
      have_task = true;
    } else if (e.task != m.task) {
      throw ParseError("manifest mixes tasks", row_start);
    }
    e.class_name = fields[2];
    try {
      e.label = class_id(e.task, e.class_name);
    } catch (const InputError& err) {
      throw LabelError(err.what(), row);
    }
    ++m.counts[e.class_name];
    m.entries.push_back(std::move(e));
    ++row;
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

std::vector<Sample> load_samples(const DatasetManifest& manifest, const PreprocessConfig& config) {
  std::vector<Sample> out;
  out.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    out.push_back(Sample{prepare(load_pnm_file(e.path), config), e.label, e.path, e.task});
  }
  return out;
}

}  // namespace swinscan::data
