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

#include "pathforge/cot.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "default_prompts.h"
#include "httplib.h"
#include "json.hpp"
#include "parallel.h"
#include "pathforge/errors.h"
#include "pathforge/io.h"

namespace pathforge {

namespace {

using ojson = nlohmann::ordered_json;

struct Placeholder {
  size_t start;
  size_t end;  // one past '}'
  std::string name;
};

std::vector<Placeholder> ScanPlaceholders(std::string_view body) {
  std::vector<Placeholder> out;
  for (size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    size_t j = i + 1;
    while (j < body.size() && (std::islower(static_cast<unsigned char>(body[j])) ||
                               body[j] == '_')) {
      ++j;
    }
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      out.push_back({i, j + 1, std::string(body.substr(i + 1, j - i - 1))});
      i = j;
    }
  }
  return out;
}

std::set<std::string> RequiredPlaceholders(PromptRole role) {
  if (role == PromptRole::kGeneration) return {"question", "answer", "paths"};
  return {"question", "chain"};
}

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

// Text between "[TAG]\n" and "\n[/TAG]", if both are present.
std::optional<std::string_view> Section(std::string_view prompt, std::string_view tag) {
  std::string open = "[" + std::string(tag) + "]\n";
  std::string close = "\n[/" + std::string(tag) + "]";
  size_t a = prompt.find(open);
  if (a == std::string_view::npos) return std::nullopt;
  a += open.size();
  size_t b = prompt.find(close, a);
  if (b == std::string_view::npos) return std::nullopt;
  return prompt.substr(a, b - a);
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string SynthesizeChain(std::string_view question, std::string_view answer,
                            std::string_view paths) {
  std::string chain = "Step 1: The question is \"" + std::string(question) + "\".\n";
  int step = 2;
  if (paths == kNoPathsMarker) {
    chain += "Step 2: The graph offers no path, so the answer rests on prior knowledge.\n";
    step = 3;
  } else {
    for (std::string_view line : Lines(paths)) {
      if (IsBlank(line)) continue;
      chain += "Step " + std::to_string(step++) + ": The graph links " +
               std::string(line) + ".\n";
    }
  }
  chain += "Additional knowledge: curated drug labels and literature back such links.\n";
  chain += "Step " + std::to_string(step) + ": Therefore the answer is " +
           std::string(answer) + ".";
  return chain;
}

std::string PruneChain(std::string_view chain, bool drop_additional) {
  std::string out;
  for (std::string_view line : Lines(chain)) {
    if (drop_additional && line.find("Additional knowledge") != std::string_view::npos) {
      continue;
    }
    if (!out.empty()) out.push_back('\n');
    out += line;
  }
  return out;
}

std::string CheckedCompletion(const TextGenClient &client, const std::string &prompt,
                              const DecodeOptions &options, const char *stage) {
  std::string text = client.Complete(prompt, options);
  if (IsBlank(text)) {
    throw Error(ErrorCode::kContent,
                std::string(stage) + ": " + client.name() + " returned an empty completion");
  }
  return text;
}

std::string PathsText(const QAItem &item, const Graph &graph) {
  std::string out;
  for (const ReasoningPath &p : item.paths) {
    if (!out.empty()) out.push_back('\n');
    out += SerializePath(p, graph);
  }
  return out;
}

}  // namespace

const char *PromptRoleName(PromptRole role) {
  return role == PromptRole::kGeneration ? "generation" : "pruning";
}

void CheckPromptTemplate(const PromptTemplate &tmpl) {
  std::set<std::string> required = RequiredPlaceholders(tmpl.role);
  std::set<std::string> seen;
  for (const Placeholder &p : ScanPlaceholders(tmpl.body)) {
    if (!required.count(p.name)) {
      throw Error(ErrorCode::kTemplate,
                  "template " + tmpl.name + ": placeholder {" + p.name +
                      "} is not valid for the " + PromptRoleName(tmpl.role) + " role");
    }
    seen.insert(p.name);
  }
  for (const std::string &name : required) {
    if (!seen.count(name)) {
      throw Error(ErrorCode::kTemplate,
                  "template " + tmpl.name + ": missing placeholder {" + name + "}");
    }
  }
}

PromptTemplate DefaultGenerationTemplate() {
  return {"generation", PromptRole::kGeneration, internal::kDefaultGenerationPrompt};
}

PromptTemplate DefaultPruningTemplate() {
  return {"pruning", PromptRole::kPruning, internal::kDefaultPruningPrompt};
}

PromptTemplate LoadPromptTemplate(const std::string &path, PromptRole role) {
  PromptTemplate tmpl{std::filesystem::path(path).stem().string(), role, ReadFile(path)};
  CheckPromptTemplate(tmpl);
  return tmpl;
}

std::string RenderTemplate(const PromptTemplate &tmpl,
                           const std::map<std::string, std::string> &values) {
  CheckPromptTemplate(tmpl);
  std::string out;
  size_t pos = 0;
  for (const Placeholder &p : ScanPlaceholders(tmpl.body)) {
    auto it = values.find(p.name);
    if (it == values.end()) {
      throw Error(ErrorCode::kTemplate,
                  "template " + tmpl.name + ": no value for {" + p.name + "}");
    }
    out.append(tmpl.body, pos, p.start - pos);
    out += it->second;
    pos = p.end;
  }
  out.append(tmpl.body, pos, std::string::npos);
  return out;
}

std::string BuildGenerationPrompt(std::string_view question, std::string_view answer,
                                  std::span<const std::string> path_lines,
                                  const PromptTemplate &tmpl) {
  if (tmpl.role != PromptRole::kGeneration) {
    throw Error(ErrorCode::kTemplate, "template " + tmpl.name + " is not a generation template");
  }
  std::string paths;
  for (const std::string &line : path_lines) {
    if (!paths.empty()) paths.push_back('\n');
    paths += line;
  }
  if (paths.empty()) paths = kNoPathsMarker;
  return RenderTemplate(tmpl, {{"question", std::string(question)},
                               {"answer", std::string(answer)},
                               {"paths", paths}});
}

std::string BuildGenerationPrompt(const QAItem &item, const Graph &graph,
                                  const PromptTemplate &tmpl) {
  std::vector<std::string> lines;
  for (const ReasoningPath &p : item.paths) lines.push_back(SerializePath(p, graph));
  return BuildGenerationPrompt(item.question, item.options[item.correct_index], lines, tmpl);
}

std::string BuildPruningPrompt(std::string_view question, std::string_view chain,
                               const PromptTemplate &tmpl) {
  if (tmpl.role != PromptRole::kPruning) {
    throw Error(ErrorCode::kTemplate, "template " + tmpl.name + " is not a pruning template");
  }
  if (IsBlank(chain)) throw Error(ErrorCode::kTemplate, "nothing to prune: empty chain");
  return RenderTemplate(tmpl, {{"question", std::string(question)},
                               {"chain", std::string(chain)}});
}

MockClient::MockClient() : MockClient(Options{}) {}
MockClient::MockClient(Options options) : options_(options) {}

void MockClient::AddResponse(std::string_view prompt, std::string response) {
  table_[Sha256Hex(prompt)] = std::move(response);
}

void MockClient::AddResponseByHash(std::string sha256_hex, std::string response) {
  table_[std::move(sha256_hex)] = std::move(response);
}

void MockClient::LoadTable(const std::string &path) {
  std::istringstream in(ReadFile(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    try {
      ojson j = ojson::parse(line);
      std::string response = j.at("response").get<std::string>();
      if (j.contains("prompt")) {
        AddResponse(j["prompt"].get<std::string>(), std::move(response));
      } else {
        AddResponseByHash(j.at("prompt_sha256").get<std::string>(), std::move(response));
      }
    } catch (const ojson::exception &e) {
      throw Error(ErrorCode::kSchema,
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string MockClient::Complete(const std::string &prompt, const DecodeOptions &) const {
  std::string hash = Sha256Hex(prompt);
  if (auto it = table_.find(hash); it != table_.end()) return it->second;
  if (options_.synthesize) {
    if (auto chain = Section(prompt, "CHAIN")) {
      return PruneChain(*chain, options_.drop_additional);
    }
    auto question = Section(prompt, "QUESTION");
    auto answer = Section(prompt, "ANSWER");
    auto paths = Section(prompt, "PATHS");
    if (question && answer && paths) return SynthesizeChain(*question, *answer, *paths);
  }
  throw Error(ErrorCode::kContent, "mock has no response for prompt " + hash.substr(0, 12));
}

HttpClient::HttpClient(HttpClientConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, kUrl)) {
    throw Error(ErrorCode::kInvalidInput, "bad endpoint url: " + config_.url);
  }
  base_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (config_.max_attempts < 1) config_.max_attempts = 1;
}

std::string HttpClient::Complete(const std::string &prompt,
                                 const DecodeOptions &options) const {
  httplib::Client cli(base_);
  cli.set_connection_timeout(config_.timeout_s);
  cli.set_read_timeout(config_.timeout_s);
  httplib::Headers headers;
  if (const char *token = std::getenv(config_.token_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  std::string body = ojson{{"prompt", prompt},
                           {"max_tokens", options.max_tokens},
                           {"temperature", options.temperature}}
                         .dump();
  std::string last_error;
  int delay_ms = config_.backoff_ms;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    auto res = cli.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "server returned HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw TransportError(config_.url + ": HTTP " + std::to_string(res->status),
                           attempt, false);
    } else {
      try {
        return ojson::parse(res->body).at("text").get<std::string>();
      } catch (const ojson::exception &e) {
        throw Error(ErrorCode::kContent,
                    config_.url + ": reply has no text field: " + e.what());
      }
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
  }
  throw TransportError(config_.url + ": " + last_error + " after " +
                           std::to_string(config_.max_attempts) + " attempts",
                       config_.max_attempts, true);
}

std::string GenerateCot(const TextGenClient &client, const std::string &prompt,
                        const DecodeOptions &options) {
  return CheckedCompletion(client, prompt, options, "generation");
}

std::string PruneCot(const TextGenClient &client, const std::string &prompt,
                     const DecodeOptions &options) {
  return CheckedCompletion(client, prompt, options, "pruning");
}

std::string RecordLine(const CoTRecord &r) {
  const Provenance &p = r.provenance;
  ojson j{{"item_id", r.item_id},
          {"question", r.question},
          {"answer", r.answer},
          {"paths_text", r.paths_text},
          {"chain_raw", r.chain_raw},
          {"chain_pruned", r.chain_pruned},
          {"provenance",
           {{"client", p.client},
            {"max_tokens", p.decode.max_tokens},
            {"temperature", p.decode.temperature},
            {"generation_template", p.generation_template},
            {"pruning_template", p.pruning_template},
            {"started_at", p.started_at},
            {"finished_at", p.finished_at}}}};
  return j.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

CoTRecord ParseRecordLine(std::string_view line) {
  try {
    ojson j = ojson::parse(line);
    CoTRecord r;
    r.item_id = j.at("item_id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    r.paths_text = j.at("paths_text").get<std::string>();
    r.chain_raw = j.at("chain_raw").get<std::string>();
    r.chain_pruned = j.at("chain_pruned").get<std::string>();
    const ojson &p = j.at("provenance");
    r.provenance.client = p.at("client").get<std::string>();
    r.provenance.decode.max_tokens = p.at("max_tokens").get<int>();
    r.provenance.decode.temperature = p.at("temperature").get<double>();
    r.provenance.generation_template = p.at("generation_template").get<std::string>();
    r.provenance.pruning_template = p.at("pruning_template").get<std::string>();
    r.provenance.started_at = p.at("started_at").get<std::string>();
    r.provenance.finished_at = p.at("finished_at").get<std::string>();
    return r;
  } catch (const ojson::exception &e) {
    throw Error(ErrorCode::kSchema, std::string("bad CoT record: ") + e.what());
  }
}

size_t ExportSftRecords(std::span<const CoTRecord> records, const std::string &path) {
  std::string out;
  for (const CoTRecord &r : records) {
    if (IsBlank(r.chain_pruned)) {
      throw Error(ErrorCode::kDomain, "record " + r.item_id + " has no pruned chain");
    }
    if (r.provenance.client.empty()) {
      throw Error(ErrorCode::kDomain, "record " + r.item_id + " has no provenance");
    }
    out += RecordLine(r);
    out.push_back('\n');
  }
  WriteFileAtomic(path, out);
  return records.size();
}

std::vector<CoTRecord> ReadSftRecords(const std::string &path) {
  std::istringstream in(ReadFile(path));
  std::vector<CoTRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(ParseRecordLine(line));
  }
  return out;
}

std::string WallClockNow() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string FixedClock() { return "1970-01-01T00:00:00Z"; }

CotBatchResult RunCotBatch(std::span<const QAItem> items, const Graph &graph,
                           const PromptTemplate &generation,
                           const PromptTemplate &pruning, const TextGenClient &client,
                           const CotBatchOptions &options) {
  CheckPromptTemplate(generation);
  CheckPromptTemplate(pruning);
  if (generation.role != PromptRole::kGeneration || pruning.role != PromptRole::kPruning) {
    throw Error(ErrorCode::kTemplate, "generation and pruning templates are swapped");
  }
  Clock clock = options.clock ? options.clock : Clock(WallClockNow);

  CotBatchResult result;
  std::unordered_set<std::string> done;
  if (!options.checkpoint_path.empty() &&
      std::filesystem::exists(options.checkpoint_path)) {
    std::string content = ReadFile(options.checkpoint_path);
    for (std::string_view line : Lines(content)) {
      if (IsBlank(line)) continue;
      try {
        CoTRecord r = ParseRecordLine(line);
        if (done.insert(r.item_id).second) result.records.push_back(std::move(r));
      } catch (const Error &) {
        // A torn trailing line from an interrupted run; redo that item.
      }
    }
  }
  std::unordered_set<std::string> wanted;
  for (const QAItem &item : items) wanted.insert(item.id);
  std::erase_if(result.records,
                [&](const CoTRecord &r) { return !wanted.count(r.item_id); });
  result.resumed = result.records.size();

  std::vector<const QAItem *> pending;
  for (const QAItem &item : items) {
    if (!done.count(item.id)) pending.push_back(&item);
  }
  std::ofstream checkpoint;
  if (!options.checkpoint_path.empty()) {
    checkpoint.open(options.checkpoint_path, std::ios::app | std::ios::binary);
    if (!checkpoint) {
      throw Error(ErrorCode::kIo, "cannot open checkpoint " + options.checkpoint_path);
    }
  }
  std::mutex mu;
  ParallelFor(pending.size(), options.jobs, [&](size_t i, int) {
    const QAItem &item = *pending[i];
    CoTRecord r;
    r.item_id = item.id;
    r.question = item.question;
    r.answer = item.options[item.correct_index];
    r.paths_text = item.paths.empty() ? std::string(kNoPathsMarker) : PathsText(item, graph);
    r.provenance = {client.name(), options.decode, generation.name, pruning.name,
                    clock(), ""};
    RecordFailure failure{item.id, "", 1};
    try {
      r.chain_raw = GenerateCot(client, BuildGenerationPrompt(item, graph, generation),
                                options.decode);
      r.chain_pruned = PruneCot(client, BuildPruningPrompt(item.question, r.chain_raw, pruning),
                                options.decode);
      r.provenance.finished_at = clock();
    } catch (const TransportError &e) {
      failure.message = e.what();
      failure.attempts = e.attempts();
    } catch (const std::exception &e) {
      failure.message = e.what();
    }
    std::lock_guard<std::mutex> lock(mu);
    if (!failure.message.empty()) {
      result.failures.push_back(std::move(failure));
      return;
    }
    if (checkpoint.is_open()) {
      checkpoint << RecordLine(r) << '\n';
      checkpoint.flush();
    }
    result.records.push_back(std::move(r));
  });
  std::sort(result.records.begin(), result.records.end(),
            [](const CoTRecord &a, const CoTRecord &b) { return a.item_id < b.item_id; });
  std::sort(result.failures.begin(), result.failures.end(),
            [](const RecordFailure &a, const RecordFailure &b) { return a.item_id < b.item_id; });
  return result;
}

}  // namespace pathforge
