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

#ifndef PATHFORGE_QA_FORGE_H_
#define PATHFORGE_QA_FORGE_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "pathforge/graph.h"
#include "pathforge/linker.h"
#include "pathforge/paths.h"

namespace pathforge {

enum class TaskCategory {
  kIndication,
  kBioprocess,
  kOffLabelUse,
  kDiseaseProtein,
  kSideEffect,
  kContraindication,
  kDrugDrugInteraction,
};

const char *TaskCategoryName(TaskCategory category);
std::optional<TaskCategory> ParseTaskCategory(std::string_view name);

struct CategorySpec {
  TaskCategory name = TaskCategory::kIndication;
  std::string head_type;
  std::string relation;
  std::string answer_type;
  std::string question_template;  // exactly one {head}
  DifficultyLevel difficulty_hint = DifficultyLevel::kBasic;
};

// Throws Error(kDomain) unless the template has exactly one {head}.
void CheckCategorySpec(const CategorySpec &spec);

// The seven task categories with their stock question phrasings.
std::vector<CategorySpec> DefaultCategorySpecs();

// A spec plus how many items to draw from it.
struct CategoryPlan {
  CategorySpec spec;
  size_t count = 0;
};

// JSON list of {"category", "head_type", "relation", "answer_type",
// "question_template", "difficulty_hint", "count"} objects.
std::vector<CategoryPlan> LoadCategoryPlans(const std::string &path);
std::string CategorySpecJson(const CategorySpec &spec);

enum class Split { kNone, kSft, kRl, kTest };
const char *SplitName(Split split);

struct QAItem {
  std::string id;
  std::string question;
  std::array<std::string, 4> options;
  int correct_index = 0;
  NodeId head;
  std::string relation;
  NodeId answer;
  TaskCategory category = TaskCategory::kIndication;
  DifficultyLevel difficulty = DifficultyLevel::kBasic;
  std::vector<ReasoningPath> paths;
  bool unmined = true;
  Split split = Split::kNone;
};

struct GenerateResult {
  std::vector<QAItem> items;
  size_t eligible = 0;     // triples with enough distractors
  bool shortfall = false;  // fewer eligible triples than requested
};

struct GenerateOptions {
  // 0 means no cap on items per head.
  size_t max_per_head = 0;
  int jobs = 1;
};

// Builds items from (head, relation, tail) triples of the spec. Heads are
// shuffled under `seed` and consumed in that order; each head's tails are
// shuffled under a sub-seed derived from (seed, head). Items come out in
// head id order. Only triples with at least three distractors are
// eligible. Throws Error(kDomain) if the relation does not occur in the
// graph.
GenerateResult GenerateQa(const Graph &graph, const CategorySpec &spec,
                          size_t count, uint64_t seed,
                          const GenerateOptions &options = {});

// Candidate distractors: nodes of the answer's type, excluding the head, the
// answer and any node named like a true (head, relation) tail. Names are
// unique within the pool (lowest id kept). Sorted by id.
std::vector<NodeId> DistractorPool(const Graph &graph, NodeId head,
                                   RelationId relation, NodeId answer);

// Three pool members drawn uniformly without replacement. Throws
// Error(kInsufficient) naming the triple when the pool has fewer than 3.
std::array<NodeId, 3> SampleDistractors(const Graph &graph, NodeId head,
                                        std::string_view relation,
                                        NodeId answer, uint64_t seed);

struct DatasetSplit {
  std::vector<QAItem> sft;
  std::vector<QAItem> rl;
  std::vector<QAItem> test;
};

// Head groups are shuffled under `seed` and each goes whole to the split
// with the largest remaining item deficit (ties to the earlier split).
// Items keep their relative order. Throws Error(kDomain) for negative
// ratios or ratios not summing to 1.
DatasetSplit SplitByHead(std::vector<QAItem> items,
                         const std::array<double, 3> &ratios, uint64_t seed);

// The sft:rl:test proportions 3500:1500:1710.
std::array<double, 3> ReferenceSplitRatios();

struct AttachOptions {
  std::vector<PathTemplate> templates;  // empty: DefaultTemplates(max_d)
  int max_d = 8;
  SearchLimits limits;
  PrunePolicy prune;
  // Drop the single-edge path that restates the question triple.
  bool exclude_question_edge = false;
  int jobs = 1;
};

// Links each question and correct option, mines paths, prunes them and sets
// difficulty from the smallest complexity. Items without any path keep the
// hint of their category spec (looked up in `specs`) and stay unmined.
void AttachPathsAndDifficulty(std::vector<QAItem> *items, const Graph &graph,
                              const Lexicon &lexicon,
                              std::span<const CategorySpec> specs,
                              const AttachOptions &options);

struct DatasetStats {
  size_t total = 0;
  // (category, difficulty, split) -> count
  std::map<std::tuple<std::string, std::string, std::string>, size_t> cells;
  std::map<std::string, size_t> per_category;
  std::map<std::string, size_t> per_difficulty;
  std::map<std::string, size_t> per_split;
};

DatasetStats ComputeDatasetStats(std::span<const QAItem> items);
std::string DatasetStatsJson(const DatasetStats &stats);

// One JSON object per line. Paths are written twice: as readable lines and
// as node-key references that ReadCorpus resolves against the graph.
std::string CorpusLine(const QAItem &item, const Graph &graph);
void WriteCorpus(std::span<const QAItem> items, const Graph &graph,
                 const std::string &path);
std::vector<QAItem> ReadCorpus(const std::string &path, const Graph &graph);

struct ForgeOptions {
  std::vector<CategoryPlan> plans;
  uint64_t seed = 0;
  GenerateOptions generate;
  std::array<double, 3> ratios = ReferenceSplitRatios();
  // Largest tolerated fraction of missing items per category.
  double shortfall_tolerance = 0.25;
  bool mine = true;
  AttachOptions attach;
};

struct CategoryOutcome {
  TaskCategory category;
  size_t requested = 0;
  size_t produced = 0;
};

struct ForgeResult {
  std::vector<QAItem> items;  // all items with split tags, generation order
  DatasetSplit split;
  DatasetStats stats;
  std::vector<CategoryOutcome> outcomes;
};

// Generate, mine, and split. Throws Error(kInsufficient) when a category
// falls short by more than the tolerance.
ForgeResult ForgeBenchmark(const Graph &graph, const Lexicon &lexicon,
                           const ForgeOptions &options);

// Writes corpus.jsonl, sft.jsonl, rl.jsonl, test.jsonl, stats.json and
// forge_manifest.json into out_dir.
void WriteForgeOutputs(const ForgeResult &result, const ForgeOptions &options,
                       const Graph &graph, const std::string &out_dir);

}  // namespace pathforge

#endif  // PATHFORGE_QA_FORGE_H_
