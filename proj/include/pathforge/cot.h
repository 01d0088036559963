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

#ifndef PATHFORGE_COT_H_
#define PATHFORGE_COT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pathforge/graph.h"
#include "pathforge/qa_forge.h"

namespace pathforge {

enum class PromptRole { kGeneration, kPruning };
const char *PromptRoleName(PromptRole role);

// Plain text with {question}, {answer}, {paths} and {chain} placeholders.
// Generation templates need {question}, {answer} and {paths}; pruning
// templates need {question} and {chain}. Anything else of the form
// {lowercase_name} is rejected.
struct PromptTemplate {
  std::string name;
  PromptRole role = PromptRole::kGeneration;
  std::string body;
};

// Throws Error(kTemplate) on a missing or unknown placeholder.
void CheckPromptTemplate(const PromptTemplate &tmpl);

PromptTemplate DefaultGenerationTemplate();
PromptTemplate DefaultPruningTemplate();
// The template name is the file stem.
PromptTemplate LoadPromptTemplate(const std::string &path, PromptRole role);

// Substituted for {paths} when an item has no mined path.
inline constexpr std::string_view kNoPathsMarker =
    "(no KG reasoning paths available)";

// Single pass: substituted values are never rescanned.
std::string RenderTemplate(const PromptTemplate &tmpl,
                           const std::map<std::string, std::string> &values);

std::string BuildGenerationPrompt(std::string_view question,
                                  std::string_view answer,
                                  std::span<const std::string> path_lines,
                                  const PromptTemplate &tmpl);
std::string BuildGenerationPrompt(const QAItem &item, const Graph &graph,
                                  const PromptTemplate &tmpl);
// Throws Error(kTemplate) for a blank chain.
std::string BuildPruningPrompt(std::string_view question, std::string_view chain,
                               const PromptTemplate &tmpl);

struct DecodeOptions {
  int max_tokens = 1024;
  double temperature = 0.0;
};

class TextGenClient {
 public:
  virtual ~TextGenClient() = default;
  virtual std::string name() const = 0;
  // Implementations must be safe to call from several threads.
  virtual std::string Complete(const std::string &prompt,
                               const DecodeOptions &options) const = 0;
};

// Deterministic client. Looks the prompt up by SHA-256 first. On a miss it
// answers from the bracketed sections of the default templates: a
// generation prompt gets one step per path plus an "Additional knowledge:"
// line, and a pruning prompt gets its chain back, minus lines mentioning
// "Additional knowledge" when drop_additional is set.
class MockClient : public TextGenClient {
 public:
  struct Options {
    bool synthesize = true;
    bool drop_additional = true;
  };
  MockClient();
  explicit MockClient(Options options);

  void AddResponse(std::string_view prompt, std::string response);
  void AddResponseByHash(std::string sha256_hex, std::string response);
  // JSONL lines of {"prompt" or "prompt_sha256", "response"}.
  void LoadTable(const std::string &path);
  size_t table_size() const { return table_.size(); }

  std::string name() const override { return "mock"; }
  std::string Complete(const std::string &prompt,
                       const DecodeOptions &options) const override;

 private:
  Options options_;
  std::unordered_map<std::string, std::string> table_;
};

struct HttpClientConfig {
  std::string url;  // http[s]://host[:port]/path
  std::string token_env = "PATHFORGE_API_TOKEN";
  int max_attempts = 3;
  int backoff_ms = 250;  // doubled after each failed attempt
  int timeout_s = 60;
};

// POSTs {"prompt", "max_tokens", "temperature"} and reads "text" from the
// JSON reply. Connection failures, 429 and 5xx are retried; after the last
// attempt a retryable TransportError carries the attempt count.
class HttpClient : public TextGenClient {
 public:
  explicit HttpClient(HttpClientConfig config);
  std::string name() const override { return "http:" + config_.url; }
  std::string Complete(const std::string &prompt,
                       const DecodeOptions &options) const override;

 private:
  HttpClientConfig config_;
  std::string base_;
  std::string path_;
};

// Both throw Error(kContent) for a blank completion.
std::string GenerateCot(const TextGenClient &client, const std::string &prompt,
                        const DecodeOptions &options);
std::string PruneCot(const TextGenClient &client, const std::string &prompt,
                     const DecodeOptions &options);

struct Provenance {
  std::string client;
  DecodeOptions decode;
  std::string generation_template;
  std::string pruning_template;
  std::string started_at;
  std::string finished_at;
};

struct CoTRecord {
  std::string item_id;
  std::string question;
  std::string answer;
  std::string paths_text;
  std::string chain_raw;
  std::string chain_pruned;
  Provenance provenance;
};

// One JSON object per line; RecordLine(ParseRecordLine(s)) == s.
std::string RecordLine(const CoTRecord &record);
CoTRecord ParseRecordLine(std::string_view line);

// Writes atomically. Throws Error(kDomain) for a record with an empty
// pruned chain. Returns the number of lines written.
size_t ExportSftRecords(std::span<const CoTRecord> records,
                        const std::string &path);
std::vector<CoTRecord> ReadSftRecords(const std::string &path);

using Clock = std::function<std::string()>;
// UTC, ISO 8601 with seconds.
std::string WallClockNow();
// Always the epoch; used with the mock client so reruns are byte-identical.
std::string FixedClock();

struct CotBatchOptions {
  DecodeOptions decode;
  int jobs = 1;                 // in-flight client calls
  std::string checkpoint_path;  // empty: no checkpoint
  Clock clock = WallClockNow;
};

struct RecordFailure {
  std::string item_id;
  std::string message;
  int attempts = 1;
};

struct CotBatchResult {
  std::vector<CoTRecord> records;  // sorted by item id
  std::vector<RecordFailure> failures;
  size_t resumed = 0;  // records taken from the checkpoint
};

// Templates are checked before any client call. A failing record does not
// stop the batch. Completed records are appended to the checkpoint as they
// finish and items already present there are skipped.
CotBatchResult RunCotBatch(std::span<const QAItem> items, const Graph &graph,
                           const PromptTemplate &generation,
                           const PromptTemplate &pruning,
                           const TextGenClient &client,
                           const CotBatchOptions &options);

}  // namespace pathforge

#endif  // PATHFORGE_COT_H_
