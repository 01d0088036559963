// Copyright 2026 The PathForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pathforge/manifest.h"

#include <filesystem>

#include "json.hpp"
#include "pathforge/errors.h"
#include "pathforge/io.h"

namespace pathforge {

namespace {

using ojson = nlohmann::ordered_json;

std::vector<FileDigest> Digest(const std::vector<std::string> &paths) {
  std::vector<FileDigest> out;
  for (const std::string &p : paths) out.push_back({p, Sha256File(p)});
  return out;
}

ojson DigestJson(const std::vector<FileDigest> &files) {
  ojson out = ojson::array();
  for (const FileDigest &f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

}  // namespace

RunManifest::RunManifest(std::string config_text)
    : config_hash_(Sha256Hex(config_text)) {}

void RunManifest::SetField(const std::string &key, const std::string &json_value) {
  if (!ojson::accept(json_value)) {
    throw Error(ErrorCode::kInvalidInput, "manifest field " + key + " is not JSON");
  }
  fields_[key] = json_value;
}

void RunManifest::AddStage(const std::string &name, const std::vector<std::string> &inputs,
                           const std::vector<std::string> &outputs, double wall_seconds) {
  stages_.push_back({name, Digest(inputs), Digest(outputs), wall_seconds});
}

std::string RunManifest::ToJson() const {
  ojson stages = ojson::array();
  for (const StageRecord &s : stages_) {
    stages.push_back({{"name", s.name},
                      {"inputs", DigestJson(s.inputs)},
                      {"outputs", DigestJson(s.outputs)},
                      {"wall_seconds", s.wall_seconds}});
  }
  ojson j{{"tool", "pathforge"},
          {"tool_version", kToolVersion},
          {"config_sha256", config_hash_}};
  for (const auto &[key, value] : fields_) j[key] = ojson::parse(value);
  j["stages"] = std::move(stages);
  return j.dump(2);
}

void RunManifest::Write(const std::string &path) const {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  WriteFileAtomic(path, ToJson() + "\n");
}

std::vector<DigestMismatch> VerifyManifest(const std::string &path) {
  std::vector<DigestMismatch> out;
  ojson j;
  try {
    j = ojson::parse(ReadFile(path));
    for (const auto &stage : j.at("stages")) {
      for (const char *side : {"inputs", "outputs"}) {
        for (const auto &f : stage.at(side)) {
          std::string file = f.at("path").get<std::string>();
          std::string expected = f.at("sha256").get<std::string>();
          std::string actual =
              std::filesystem::exists(file) ? Sha256File(file) : std::string();
          if (actual != expected) out.push_back({file, expected, actual});
        }
      }
    }
  } catch (const ojson::exception &e) {
    throw Error(ErrorCode::kSchema, path + ": " + e.what());
  }
  return out;
}

}  // namespace pathforge
