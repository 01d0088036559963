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

#ifndef PATHFORGE_REWARD_H_
#define PATHFORGE_REWARD_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pathforge {

// 1 when the text holds exactly one <think>, </think>, <answer> and
// </answer> tag each, in that order. Text around the blocks is allowed.
int CheckFormat(std::string_view text);

// Content of the last <answer>...</answer> block.
std::optional<std::string> ExtractAnswer(std::string_view text);

enum class AnswerMatch {
  kLetter,  // trimmed, uppercased, exact
  kName,    // equal after surface normalization
};

// 5 when the extracted answer matches `gold`, else 0. Format is not
// consulted. Throws Error(kInvalidInput) for an empty gold.
int ScoreAnswer(std::string_view text, std::string_view gold,
                AnswerMatch mode = AnswerMatch::kLetter);

struct RewardBreakdown {
  int format = 0;  // 0 or 1
  int answer = 0;  // 0 or 5
  int total = 0;   // format + answer
};

RewardBreakdown TotalReward(std::string_view text, std::string_view gold,
                            AnswerMatch mode = AnswerMatch::kLetter);

struct ScoreRow {
  std::string id;
  RewardBreakdown reward;
};

struct ScoreReport {
  std::vector<ScoreRow> rows;
  double accuracy = 0;     // share of rows with answer reward 5
  double format_rate = 0;  // share of rows with format reward 1
  double mean_reward = 0;
};

// Responses are JSONL objects with "response" (and optionally "id"); gold
// lines carry "gold" (and optionally "id"). Bare JSON strings are accepted
// on either side. Throws Error(kInvalidInput) when the files differ in
// length, ids disagree, or a line is malformed.
ScoreReport ScoreFiles(const std::string &responses_path,
                       const std::string &gold_path,
                       AnswerMatch mode = AnswerMatch::kLetter);
std::string ScoreReportJson(const ScoreReport &report);

}  // namespace pathforge

#endif  // PATHFORGE_REWARD_H_
