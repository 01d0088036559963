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

#include "pathforge/mine.h"

#include <algorithm>

#include "pathforge/errors.h"
#include "pathforge/text.h"

namespace pathforge {

namespace {

std::vector<NodeId> LinkAnswer(std::string_view answer, const Lexicon &lexicon) {
  if (const auto *whole = lexicon.Find(NormalizeSurface(answer))) return *whole;
  return CandidateUnion(ExtractAndMap(answer, lexicon));
}

MineOutcome Run(const Graph &graph, std::vector<NodeId> q, std::vector<NodeId> a,
                const MineOptions &options) {
  std::vector<PathTemplate> templates =
      options.templates.empty() ? DefaultTemplates(options.max_d) : options.templates;
  MineOutcome out{std::move(q), std::move(a), {}};
  out.paths = EnumeratePaths(graph, out.q_nodes, out.a_nodes, templates, options.max_d,
                             options.limits, options.jobs);
  if (options.prune_k > 0) {
    out.paths.paths = PrunePaths(std::move(out.paths.paths), PrunePolicy{options.prune_k});
  }
  return out;
}

}  // namespace

MineOutcome MineQuestion(const Graph &graph, const Lexicon &lexicon,
                         std::string_view question, std::string_view answer,
                         const MineOptions &options) {
  std::vector<NodeId> q = CandidateUnion(ExtractAndMap(question, lexicon));
  if (q.empty()) throw Error(ErrorCode::kLinking, "no entity linked in question");
  std::vector<NodeId> a = LinkAnswer(answer, lexicon);
  if (a.empty()) {
    throw Error(ErrorCode::kLinking, "answer does not link: " + std::string(answer));
  }
  return Run(graph, std::move(q), std::move(a), options);
}

MineOutcome MineItem(const Graph &graph, const Lexicon &lexicon, const QAItem &item,
                     const MineOptions &options) {
  std::vector<NodeId> q = CandidateUnion(ExtractAndMap(item.question, lexicon));
  if (q.empty()) q.push_back(item.head);
  std::vector<NodeId> a = LinkAnswer(item.options[item.correct_index], lexicon);
  if (a.empty()) a.push_back(item.answer);
  return Run(graph, std::move(q), std::move(a), options);
}

std::string MinedPathsText(const std::vector<ReasoningPath> &paths, const Graph &graph) {
  std::string out;
  for (const ReasoningPath &p : paths) {
    out += DifficultyName(ClassifyDifficulty(p.complexity));
    out.push_back('\t');
    out += SerializePath(p, graph);
    out.push_back('\n');
  }
  return out;
}

std::string MinedItemBlock(const QAItem &item, const MineOutcome &outcome,
                           const Graph &graph) {
  const auto &paths = outcome.paths.paths;
  std::string label = "unmined";
  if (!paths.empty()) {
    int d = std::min_element(paths.begin(), paths.end(), [](const auto &x, const auto &y) {
              return x.complexity < y.complexity;
            })->complexity;
    label = DifficultyName(ClassifyDifficulty(d));
  }
  return "# " + item.id + "\t" + label + "\n" + MinedPathsText(paths, graph);
}

}  // namespace pathforge
