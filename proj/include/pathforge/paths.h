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

#ifndef PATHFORGE_PATHS_H_
#define PATHFORGE_PATHS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathforge/graph.h"

namespace pathforge {

enum class TemplateKind { kLinear = 0, kDivergent = 1, kConvergent = 2 };

const char *TemplateKindName(TemplateKind kind);
std::optional<TemplateKind> ParseTemplateKind(std::string_view name);

// Shape of a reasoning path. Linear templates have one branch; divergent
// templates have a side branch followed by the main branch; convergent
// templates have two branches that both reach the answer.
struct PathTemplate {
  TemplateKind kind = TemplateKind::kLinear;
  std::vector<int> branch_lengths;

  int total_length() const;
  bool operator==(const PathTemplate &) const = default;
};

// Throws Error(kDomain) if the branch count or lengths do not fit the kind.
void CheckTemplate(const PathTemplate &t);

// Parses "linear:3", "divergent:1,4" or "convergent:2,2".
PathTemplate ParseTemplate(std::string_view spec);
std::string FormatTemplate(const PathTemplate &t);

// Every template with total length <= max_d: linear 1..max_d, divergent
// with a side branch of 1..max_side_length edges, convergent with
// non-decreasing branch lengths.
std::vector<PathTemplate> DefaultTemplates(int max_d, int max_side_length = 2);

// Reads a registry file with one template spec per line; '#' starts a
// comment.
std::vector<PathTemplate> LoadTemplateRegistry(const std::string &path);

struct Step {
  RelationRef relation;
  NodeId node;
  auto operator<=>(const Step &) const = default;
};

// A chain of traversals starting at the path anchor.
struct Branch {
  std::vector<Step> steps;
  auto operator<=>(const Branch &) const = default;
};

struct ReasoningPath {
  NodeId anchor;
  NodeId terminal;
  TemplateKind kind = TemplateKind::kLinear;
  std::vector<Branch> branches;
  int complexity = 0;

  bool operator==(const ReasoningPath &) const = default;
};

// Total order used for dedup, sorting and truncation:
// (kind, anchor, branch count, then per branch its length and steps).
// Convergent branches appear ordered by (length, steps); divergent paths
// keep the side branch first.
using PathKey = std::vector<uint32_t>;
PathKey CanonicalKey(const ReasoningPath &path);

enum class DifficultyLevel { kBasic = 0, kMedium = 1, kHard = 2 };

const char *DifficultyName(DifficultyLevel level);
std::optional<DifficultyLevel> ParseDifficulty(std::string_view name);

struct SearchLimits {
  int max_branch_length = 8;
  // Per instantiate call. When more paths exist, the first max_results in
  // canonical order are returned and the truncated flag is raised.
  size_t max_results = 100000;
  // Also walk edges backwards under "inv:" labels.
  bool traverse_inverse = false;
};

struct PathSet {
  std::vector<ReasoningPath> paths;  // canonical order, unique
  bool truncated = false;
};

// All paths of shape `t` from u to v. Throws Error(kDomain) for unknown
// nodes, malformed templates or branches longer than max_branch_length.
PathSet Instantiate(const Graph &graph, const PathTemplate &t, NodeId u,
                    NodeId v, const SearchLimits &limits);

// Union of Instantiate over all (u, v) pairs and all templates whose total
// length is <= max_d. Work items run on up to `jobs` threads; the merged
// result does not depend on `jobs`. Throws Error(kDomain) when either node
// set is empty or max_d < 1.
PathSet EnumeratePaths(const Graph &graph, std::span<const NodeId> q_nodes,
                       std::span<const NodeId> a_nodes,
                       std::span<const PathTemplate> templates, int max_d,
                       const SearchLimits &limits, int jobs = 1);

// Total edge count over all branches.
int Complexity(const ReasoningPath &path);

// d <= 5 Basic, 6..7 Medium, >= 8 Hard. Throws Error(kDomain) for d < 1.
DifficultyLevel ClassifyDifficulty(int d);

// Checks every structural invariant of `path` against the graph edges.
bool Validate(const ReasoningPath &path, const Graph &graph);

struct PrunePolicy {
  size_t k = 8;
};

// Dedups, orders by (complexity, canonical key) and keeps the first k.
std::vector<ReasoningPath> PrunePaths(std::vector<ReasoningPath> paths,
                                      const PrunePolicy &policy);

// "kind<TAB>d<TAB>branch[<TAB>branch]", each branch rendered as
// "anchor -[relation]-> node -[relation]-> ...".
std::string SerializePath(const ReasoningPath &path, const Graph &graph);

}  // namespace pathforge

#endif  // PATHFORGE_PATHS_H_
