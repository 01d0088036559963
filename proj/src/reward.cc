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

#include "pathforge/reward.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "pathforge/errors.h"
#include "pathforge/io.h"
#include "pathforge/text.h"

namespace pathforge {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

// Position of the only occurrence of `tag`, or npos if it occurs zero or
// several times.
size_t UniqueFind(std::string_view text, std::string_view tag) {
  size_t first = text.find(tag);
  if (first == std::string_view::npos) return first;
  if (text.find(tag, first + 1) != std::string_view::npos) return std::string_view::npos;
  return first;
}

std::string TrimUpper(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  std::string out(s.substr(a, b - a));
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> JsonLines(const std::string &path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// (id, value) from a line holding a JSON string or an object with `field`.
std::pair<std::string, std::string> ParseScoreLine(const std::string &line,
                                                   const char *field,
                                                   const std::string &where) {
  try {
    ojson j = ojson::parse(line);
    if (j.is_string()) return {"", j.get<std::string>()};
    return {j.value("id", std::string()), j.at(field).get<std::string>()};
  } catch (const ojson::exception &e) {
    throw Error(ErrorCode::kInvalidInput, where + ": " + e.what());
  }
}

}  // namespace

int CheckFormat(std::string_view text) {
  size_t a = UniqueFind(text, kThinkOpen);
  size_t b = UniqueFind(text, kThinkClose);
  size_t c = UniqueFind(text, kAnswerOpen);
  size_t d = UniqueFind(text, kAnswerClose);
  if (a == std::string_view::npos || b == std::string_view::npos ||
      c == std::string_view::npos || d == std::string_view::npos) {
    return 0;
  }
  return a < b && b < c && c < d ? 1 : 0;
}

std::optional<std::string> ExtractAnswer(std::string_view text) {
  size_t open = text.rfind(kAnswerOpen);
  if (open == std::string_view::npos) return std::nullopt;
  size_t start = open + kAnswerOpen.size();
  size_t close = text.find(kAnswerClose, start);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(start, close - start));
}

int ScoreAnswer(std::string_view text, std::string_view gold, AnswerMatch mode) {
  if (gold.empty()) throw Error(ErrorCode::kInvalidInput, "gold answer is empty");
  std::optional<std::string> answer = ExtractAnswer(text);
  if (!answer) return 0;
  bool match = mode == AnswerMatch::kLetter
                   ? TrimUpper(*answer) == TrimUpper(gold)
                   : NormalizeSurface(*answer) == NormalizeSurface(gold);
  return match ? 5 : 0;
}

RewardBreakdown TotalReward(std::string_view text, std::string_view gold,
                            AnswerMatch mode) {
  RewardBreakdown r;
  r.format = CheckFormat(text);
  r.answer = ScoreAnswer(text, gold, mode);
  r.total = r.format + r.answer;
  return r;
}

ScoreReport ScoreFiles(const std::string &responses_path, const std::string &gold_path,
                       AnswerMatch mode) {
  std::vector<std::string> responses = JsonLines(responses_path);
  std::vector<std::string> golds = JsonLines(gold_path);
  if (responses.size() != golds.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "length mismatch: " + std::to_string(responses.size()) +
                    " responses vs " + std::to_string(golds.size()) + " gold lines");
  }
  ScoreReport report;
  size_t correct = 0, formatted = 0;
  long total = 0;
  for (size_t i = 0; i < responses.size(); ++i) {
    std::string where = "line " + std::to_string(i + 1);
    auto [rid, text] = ParseScoreLine(responses[i], "response", responses_path + " " + where);
    auto [gid, gold] = ParseScoreLine(golds[i], "gold", gold_path + " " + where);
    if (!rid.empty() && !gid.empty() && rid != gid) {
      throw Error(ErrorCode::kInvalidInput, where + ": id " + rid + " vs gold id " + gid);
    }
    if (gold.empty()) throw Error(ErrorCode::kInvalidInput, where + ": empty gold");
    ScoreRow row{rid.empty() ? gid : rid, TotalReward(text, gold, mode)};
    correct += row.reward.answer == 5;
    formatted += row.reward.format == 1;
    total += row.reward.total;
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty()) {
    double n = static_cast<double>(report.rows.size());
    report.accuracy = static_cast<double>(correct) / n;
    report.format_rate = static_cast<double>(formatted) / n;
    report.mean_reward = static_cast<double>(total) / n;
  }
  return report;
}

std::string ScoreReportJson(const ScoreReport &report) {
  ojson rows = ojson::array();
  for (const ScoreRow &row : report.rows) {
    rows.push_back({{"id", row.id},
                    {"format", row.reward.format},
                    {"answer", row.reward.answer},
                    {"total", row.reward.total}});
  }
  ojson j{{"count", report.rows.size()},
          {"accuracy", report.accuracy},
          {"format_rate", report.format_rate},
          {"mean_reward", report.mean_reward},
          {"rows", std::move(rows)}};
  return j.dump(2);
}

}  // namespace pathforge
