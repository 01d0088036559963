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

#ifndef PATHFORGE_MINE_H_
#define PATHFORGE_MINE_H_

#include <string>
#include <string_view>
#include <vector>

#include "pathforge/graph.h"
#include "pathforge/linker.h"
#include "pathforge/paths.h"
#include "pathforge/qa_forge.h"

namespace pathforge {

struct MineOptions {
  std::vector<PathTemplate> templates;  // empty: DefaultTemplates(max_d)
  int max_d = 8;
  SearchLimits limits;
  size_t prune_k = 0;  // 0 keeps every path
  int jobs = 1;
};

struct MineOutcome {
  std::vector<NodeId> q_nodes;
  std::vector<NodeId> a_nodes;
  PathSet paths;
};

// Links the question by longest match and the answer as a whole name (then
// by longest match). Throws Error(kLinking) when either side links nothing.
MineOutcome MineQuestion(const Graph &graph, const Lexicon &lexicon,
                         std::string_view question, std::string_view answer,
                         const MineOptions &options);

// Like MineQuestion but falls back to the item's own head and answer nodes.
MineOutcome MineItem(const Graph &graph, const Lexicon &lexicon,
                     const QAItem &item, const MineOptions &options);

// One line per path: difficulty, then the serialized path.
std::string MinedPathsText(const std::vector<ReasoningPath> &paths,
                           const Graph &graph);
// "# <id>\t<difficulty|unmined>" followed by MinedPathsText.
std::string MinedItemBlock(const QAItem &item, const MineOutcome &outcome,
                           const Graph &graph);

}  // namespace pathforge

#endif  // PATHFORGE_MINE_H_
