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


// Hand-built reward suite shared by the unit and acceptance tests.

#ifndef PATHFORGE_TESTS_ORACLES_REWARD_CASES_H_
#define PATHFORGE_TESTS_ORACLES_REWARD_CASES_H_

#include "pathforge/reward.h"

namespace pathforge::oracle {

struct Case {
  const char *text;
  const char *gold;
  AnswerMatch mode;
  int format;
  int answer;
};

// Covers the four reward outcomes and tag edge cases.
inline const Case kRewardCases[] = {
    {"<think>x</think><answer>B</answer>", "B", AnswerMatch::kLetter, 1, 5},
    {"<think>x</think><answer>C</answer>", "B", AnswerMatch::kLetter, 1, 0},
    {"", "B", AnswerMatch::kLetter, 0, 0},
    {"<answer>B</answer>", "B", AnswerMatch::kLetter, 0, 5},
    {"<answer>B</answer><think>x</think>", "B", AnswerMatch::kLetter, 0, 5},
    {"The answer is B.", "B", AnswerMatch::kLetter, 0, 0},
    {"<think>long\nreasoning</think>\n<answer> b </answer>\n", "B", AnswerMatch::kLetter, 1, 5},
    {"<think>x</think>", "B", AnswerMatch::kLetter, 0, 0},
    {"<think>a</think><think>b</think><answer>B</answer>", "B", AnswerMatch::kLetter, 0, 5},
    {"<think>x</think><answer>A</answer><answer>B</answer>", "B", AnswerMatch::kLetter, 0, 5},
    {"<think>x</think><answer>B</answer><answer>A</answer>", "B", AnswerMatch::kLetter, 0, 0},
    {"<think>x<answer>B</answer></think>", "B", AnswerMatch::kLetter, 0, 5},
    {"preamble <think>x</think> middle <answer>B</answer> tail", "B", AnswerMatch::kLetter, 1, 5},
    {"<think>x</think><answer>B", "B", AnswerMatch::kLetter, 0, 0},
    {"<think>x</think><answer></answer>", "B", AnswerMatch::kLetter, 1, 0},
    {"<think>x</think><answer>BB</answer>", "B", AnswerMatch::kLetter, 1, 0},
    {"<think>x</think><answer>multiple sclerosis.</answer>", "Multiple Sclerosis",
     AnswerMatch::kName, 1, 5},
    {"<answer>Multiple-Sclerosis</answer>", "multiple sclerosis", AnswerMatch::kName, 0, 5},
    {"<think>x</think><answer>sclerosis</answer>", "multiple sclerosis", AnswerMatch::kName, 1, 0},
    {"<THINK>x</THINK><ANSWER>B</ANSWER>", "B", AnswerMatch::kLetter, 0, 0},
};

}  // namespace pathforge::oracle

#endif  // PATHFORGE_TESTS_ORACLES_REWARD_CASES_H_
