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

#ifndef PATHFORGE_MANIFEST_H_
#define PATHFORGE_MANIFEST_H_

#include <map>
#include <string>
#include <vector>

namespace pathforge {

inline constexpr const char kToolVersion[] = "0.3.0";

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct StageRecord {
  std::string name;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  double wall_seconds = 0;
};

// Record of one CLI run: what went in, what came out, and the settings.
class RunManifest {
 public:
  explicit RunManifest(std::string config_text);

  const std::string &config_hash() const { return config_hash_; }
  // Stored verbatim as a JSON value; `json_value` must parse.
  void SetField(const std::string &key, const std::string &json_value);
  // Digests every listed file now. Throws Error(kIo) for a missing file.
  void AddStage(const std::string &name, const std::vector<std::string> &inputs,
                const std::vector<std::string> &outputs, double wall_seconds);
  const std::vector<StageRecord> &stages() const { return stages_; }

  std::string ToJson() const;
  void Write(const std::string &path) const;

 private:
  std::string config_hash_;
  std::map<std::string, std::string> fields_;
  std::vector<StageRecord> stages_;
};

struct DigestMismatch {
  std::string path;
  std::string expected;
  std::string actual;  // empty when the file is gone
};

// Re-digests every file named in the manifest.
std::vector<DigestMismatch> VerifyManifest(const std::string &path);

}  // namespace pathforge

#endif  // PATHFORGE_MANIFEST_H_
