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

#include "pathforge/paths.h"

#include <algorithm>
#include <charconv>
#include <deque>
#include <memory>
#include <numeric>
#include <sstream>

#include "parallel.h"
#include "pathforge/errors.h"
#include "pathforge/io.h"

namespace pathforge {

namespace {

constexpr uint8_t kFar = 255;

// Depth-bounded DFS over simple chains. Neighbors are visited in Step
// order, so chains come out in lexicographic order of their step sequence.
class ChainWalker {
 public:
  ChainWalker(const Graph &graph, bool inverse) : graph_(graph), inverse_(inverse) {}

  // Hop distance to `target` against the traversal direction, capped at
  // max_depth. Recomputed only when the target or depth changes.
  void Aim(NodeId target, int max_depth) {
    if (dist_target_ == target && dist_depth_ >= max_depth && !dist_.empty()) return;
    dist_target_ = target;
    dist_depth_ = max_depth;
    dist_.assign(graph_.node_count(), kFar);
    std::deque<NodeId> queue;
    dist_[target.value] = 0;
    queue.push_back(target);
    while (!queue.empty()) {
      NodeId y = queue.front();
      queue.pop_front();
      uint8_t next = dist_[y.value] + 1;
      if (next > max_depth) continue;
      auto relax = [&](std::span<const Adjacent> preds) {
        for (const Adjacent &a : preds) {
          if (dist_[a.node.value] == kFar) {
            dist_[a.node.value] = next;
            queue.push_back(a.node);
          }
        }
      };
      relax(graph_.InEdges(y));
      if (inverse_) relax(graph_.OutEdges(y));
    }
  }

  uint8_t Distance(NodeId n) const { return dist_[n.value]; }

  // Calls fn(steps) for every simple chain of exactly `length` steps from
  // `start`. With a target, chains must end there (Aim must have been
  // called with that target). `excluded_first` skips one first step.
  // fn returns false to stop; Walk then returns false too.
  template <class Fn>
  bool Walk(NodeId start, int length, std::optional<NodeId> target,
            std::optional<Step> excluded_first, Fn &&fn) {
    target_ = target;
    excluded_first_ = excluded_first;
    stack_.clear();
    path_nodes_.assign(1, start);
    if (target && Distance(start) > length) return true;
    return Recurse(start, length, fn);
  }

 private:
  template <class Fn>
  bool Recurse(NodeId at, int remaining, Fn &fn) {
    std::span<const Adjacent> out = graph_.OutEdges(at);
    std::span<const Adjacent> in;
    if (inverse_) in = graph_.InEdges(at);
    size_t i = 0, j = 0;
    while (i < out.size() || j < in.size()) {
      const Adjacent &a =
          (j >= in.size() || (i < out.size() && out[i] < in[j])) ? out[i++] : in[j++];
      if (!Visit(a, remaining, fn)) return false;
    }
    return true;
  }

  template <class Fn>
  bool Visit(const Adjacent &a, int remaining, Fn &fn) {
    NodeId y = a.node;
    if (std::find(path_nodes_.begin(), path_nodes_.end(), y) != path_nodes_.end()) {
      return true;
    }
    Step step{a.relation, y};
    if (stack_.empty() && excluded_first_ && *excluded_first_ == step) return true;
    if (target_) {
      if (remaining == 1) {
        if (y != *target_) return true;
      } else if (y == *target_ || Distance(y) > remaining - 1) {
        return true;
      }
    }
    stack_.push_back(step);
    bool keep_going;
    if (remaining == 1) {
      keep_going = fn(static_cast<const std::vector<Step> &>(stack_));
    } else {
      path_nodes_.push_back(y);
      keep_going = Recurse(y, remaining - 1, fn);
      path_nodes_.pop_back();
    }
    stack_.pop_back();
    return keep_going;
  }

  const Graph &graph_;
  bool inverse_;
  std::vector<uint8_t> dist_;
  NodeId dist_target_{};
  int dist_depth_ = -1;
  std::optional<NodeId> target_;
  std::optional<Step> excluded_first_;
  std::vector<Step> stack_;
  std::vector<NodeId> path_nodes_;
};

// Reusable per-thread search state.
struct SearchScratch {
  SearchScratch(const Graph &graph, bool inverse)
      : main(graph, inverse), side(graph, inverse) {}
  ChainWalker main;
  ChainWalker side;
};

PathSet InstantiateWith(const Graph &graph, const PathTemplate &t, NodeId u,
                        NodeId v, const SearchLimits &limits,
                        SearchScratch &scratch) {
  CheckTemplate(t);
  graph.node(u);
  graph.node(v);
  for (int len : t.branch_lengths) {
    if (len > limits.max_branch_length) {
      throw Error(ErrorCode::kDomain,
                  "template " + FormatTemplate(t) + " exceeds max branch length " +
                      std::to_string(limits.max_branch_length));
    }
  }
  PathSet result;
  auto emit = [&](std::vector<Branch> branches) {
    if (result.paths.size() >= limits.max_results) {
      result.truncated = true;
      return false;
    }
    ReasoningPath path;
    path.anchor = u;
    path.terminal = v;
    path.kind = t.kind;
    path.branches = std::move(branches);
    path.complexity = Complexity(path);
    result.paths.push_back(std::move(path));
    return true;
  };

  ChainWalker &main = scratch.main;
  const int main_length = t.branch_lengths.back();
  main.Aim(v, *std::max_element(t.branch_lengths.begin(), t.branch_lengths.end()));

  switch (t.kind) {
    case TemplateKind::kLinear:
      main.Walk(u, main_length, v, std::nullopt, [&](const std::vector<Step> &steps) {
        return emit({Branch{steps}});
      });
      break;
    case TemplateKind::kDivergent: {
      if (main.Distance(u) > main_length) break;
      scratch.side.Walk(u, t.branch_lengths[0], std::nullopt, std::nullopt,
                        [&](const std::vector<Step> &side) {
                          Branch side_branch{side};
                          return main.Walk(u, main_length, v, side.front(),
                                           [&](const std::vector<Step> &steps) {
                                             return emit({side_branch, Branch{steps}});
                                           });
                        });
      break;
    }
    case TemplateKind::kConvergent: {
      int a = std::min(t.branch_lengths[0], t.branch_lengths[1]);
      int b = std::max(t.branch_lengths[0], t.branch_lengths[1]);
      if (main.Distance(u) > a) break;
      // The outer walk needs its own distance table aimed at v.
      ChainWalker &outer = scratch.side;
      outer.Aim(v, b);
      outer.Walk(u, a, v, std::nullopt, [&](const std::vector<Step> &first) {
        Branch first_branch{first};
        return main.Walk(u, b, v, std::nullopt, [&](const std::vector<Step> &second) {
          if (a == b && !(first < second)) return true;
          return emit({first_branch, Branch{second}});
        });
      });
      break;
    }
  }
  return result;
}

void SortUnique(std::vector<ReasoningPath> *paths,
                bool by_complexity) {
  std::vector<PathKey> keys;
  keys.reserve(paths->size());
  for (const auto &p : *paths) keys.push_back(CanonicalKey(p));
  std::vector<size_t> order(paths->size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    if (by_complexity && (*paths)[x].complexity != (*paths)[y].complexity) {
      return (*paths)[x].complexity < (*paths)[y].complexity;
    }
    return keys[x] < keys[y];
  });
  std::vector<ReasoningPath> out;
  out.reserve(paths->size());
  const PathKey *last = nullptr;
  for (size_t idx : order) {
    if (last != nullptr && *last == keys[idx]) continue;
    last = &keys[idx];
    out.push_back(std::move((*paths)[idx]));
  }
  *paths = std::move(out);
}

std::string Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const char *TemplateKindName(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kLinear: return "linear";
    case TemplateKind::kDivergent: return "divergent";
    case TemplateKind::kConvergent: return "convergent";
  }
  return "?";
}

std::optional<TemplateKind> ParseTemplateKind(std::string_view name) {
  for (TemplateKind k : {TemplateKind::kLinear, TemplateKind::kDivergent,
                         TemplateKind::kConvergent}) {
    if (name == TemplateKindName(k)) return k;
  }
  return std::nullopt;
}

int PathTemplate::total_length() const {
  return std::accumulate(branch_lengths.begin(), branch_lengths.end(), 0);
}

void CheckTemplate(const PathTemplate &t) {
  size_t want = t.kind == TemplateKind::kLinear ? 1 : 2;
  if (t.branch_lengths.size() != want) {
    throw Error(ErrorCode::kDomain, std::string(TemplateKindName(t.kind)) +
                                        " template needs " + std::to_string(want) +
                                        " branch(es)");
  }
  for (int len : t.branch_lengths) {
    if (len < 1) throw Error(ErrorCode::kDomain, "branch length must be >= 1");
  }
}

PathTemplate ParseTemplate(std::string_view spec) {
  std::string text = Trim(spec);
  size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kDomain, "bad template spec: " + text);
  }
  auto kind = ParseTemplateKind(Trim(std::string_view(text).substr(0, colon)));
  if (!kind) throw Error(ErrorCode::kDomain, "unknown template kind: " + text);
  PathTemplate t;
  t.kind = *kind;
  std::stringstream lengths(text.substr(colon + 1));
  std::string item;
  while (std::getline(lengths, item, ',')) {
    std::string field = Trim(item);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw Error(ErrorCode::kDomain, "bad branch length in: " + text);
    }
    t.branch_lengths.push_back(value);
  }
  CheckTemplate(t);
  return t;
}

std::string FormatTemplate(const PathTemplate &t) {
  std::string out = TemplateKindName(t.kind);
  out.push_back(':');
  for (size_t i = 0; i < t.branch_lengths.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += std::to_string(t.branch_lengths[i]);
  }
  return out;
}

std::vector<PathTemplate> DefaultTemplates(int max_d, int max_side_length) {
  std::vector<PathTemplate> out;
  for (int len = 1; len <= max_d; ++len) {
    out.push_back({TemplateKind::kLinear, {len}});
  }
  for (int side = 1; side <= max_side_length; ++side) {
    for (int main = 1; side + main <= max_d; ++main) {
      out.push_back({TemplateKind::kDivergent, {side, main}});
    }
  }
  for (int a = 1; 2 * a <= max_d; ++a) {
    for (int b = a; a + b <= max_d; ++b) {
      out.push_back({TemplateKind::kConvergent, {a, b}});
    }
  }
  return out;
}

std::vector<PathTemplate> LoadTemplateRegistry(const std::string &path) {
  std::stringstream in(ReadFile(path));
  std::vector<PathTemplate> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string text = Trim(line.substr(0, line.find('#')));
    if (!text.empty()) out.push_back(ParseTemplate(text));
  }
  return out;
}

PathKey CanonicalKey(const ReasoningPath &path) {
  std::vector<PathKey> branches;
  for (const Branch &b : path.branches) {
    PathKey k;
    k.reserve(1 + 2 * b.steps.size());
    k.push_back(static_cast<uint32_t>(b.steps.size()));
    for (const Step &s : b.steps) {
      k.push_back(s.relation.Encode());
      k.push_back(s.node.value);
    }
    branches.push_back(std::move(k));
  }
  if (path.kind == TemplateKind::kConvergent) {
    std::sort(branches.begin(), branches.end());
  }
  PathKey key{static_cast<uint32_t>(path.kind), path.anchor.value,
              static_cast<uint32_t>(branches.size())};
  for (const PathKey &b : branches) key.insert(key.end(), b.begin(), b.end());
  return key;
}

const char *DifficultyName(DifficultyLevel level) {
  switch (level) {
    case DifficultyLevel::kBasic: return "Basic";
    case DifficultyLevel::kMedium: return "Medium";
    case DifficultyLevel::kHard: return "Hard";
  }
  return "?";
}

std::optional<DifficultyLevel> ParseDifficulty(std::string_view name) {
  for (DifficultyLevel d : {DifficultyLevel::kBasic, DifficultyLevel::kMedium,
                            DifficultyLevel::kHard}) {
    if (name == DifficultyName(d)) return d;
  }
  return std::nullopt;
}

PathSet Instantiate(const Graph &graph, const PathTemplate &t, NodeId u,
                    NodeId v, const SearchLimits &limits) {
  SearchScratch scratch(graph, limits.traverse_inverse);
  return InstantiateWith(graph, t, u, v, limits, scratch);
}

PathSet EnumeratePaths(const Graph &graph, std::span<const NodeId> q_nodes,
                       std::span<const NodeId> a_nodes,
                       std::span<const PathTemplate> templates, int max_d,
                       const SearchLimits &limits, int jobs) {
  if (q_nodes.empty() || a_nodes.empty()) {
    throw Error(ErrorCode::kDomain, "question or answer node set is empty");
  }
  if (max_d < 1) throw Error(ErrorCode::kDomain, "max_d must be >= 1");
  for (NodeId n : q_nodes) graph.node(n);
  for (NodeId n : a_nodes) graph.node(n);

  struct WorkItem {
    NodeId u, v;
    const PathTemplate *t;
  };
  std::vector<WorkItem> items;
  // Answer node outermost so consecutive items share a distance table.
  for (NodeId v : a_nodes) {
    for (NodeId u : q_nodes) {
      for (const PathTemplate &t : templates) {
        if (t.total_length() <= max_d) items.push_back({u, v, &t});
      }
    }
  }

  int workers = std::max(1, jobs);
  std::vector<std::unique_ptr<SearchScratch>> scratch;
  for (int w = 0; w < workers; ++w) {
    scratch.push_back(std::make_unique<SearchScratch>(graph, limits.traverse_inverse));
  }
  std::vector<PathSet> partial(items.size());
  ParallelFor(items.size(), workers, [&](size_t i, int worker) {
    const WorkItem &item = items[i];
    partial[i] = InstantiateWith(graph, *item.t, item.u, item.v, limits,
                                 *scratch[worker]);
  });

  PathSet merged;
  for (PathSet &p : partial) {
    merged.truncated |= p.truncated;
    std::move(p.paths.begin(), p.paths.end(), std::back_inserter(merged.paths));
  }
  SortUnique(&merged.paths, false);
  return merged;
}

int Complexity(const ReasoningPath &path) {
  int d = 0;
  for (const Branch &b : path.branches) d += static_cast<int>(b.steps.size());
  return d;
}

DifficultyLevel ClassifyDifficulty(int d) {
  if (d < 1) {
    throw Error(ErrorCode::kDomain, "complexity must be >= 1, got " + std::to_string(d));
  }
  if (d <= 5) return DifficultyLevel::kBasic;
  if (d <= 7) return DifficultyLevel::kMedium;
  return DifficultyLevel::kHard;
}

bool Validate(const ReasoningPath &path, const Graph &graph) {
  if (!graph.Contains(path.anchor) || !graph.Contains(path.terminal)) return false;
  size_t want = path.kind == TemplateKind::kLinear ? 1 : 2;
  if (path.branches.size() != want) return false;
  for (const Branch &b : path.branches) {
    if (b.steps.empty()) return false;
    std::vector<NodeId> seen{path.anchor};
    NodeId at = path.anchor;
    for (const Step &s : b.steps) {
      if (!graph.Contains(s.node) ||
          s.relation.relation.value >= graph.relations().size() ||
          !graph.HasStep(at, s.relation, s.node)) {
        return false;
      }
      if (std::find(seen.begin(), seen.end(), s.node) != seen.end()) return false;
      seen.push_back(s.node);
      at = s.node;
    }
  }
  auto ends_at_terminal = [&](const Branch &b) {
    return b.steps.back().node == path.terminal;
  };
  switch (path.kind) {
    case TemplateKind::kLinear:
      if (!ends_at_terminal(path.branches[0])) return false;
      break;
    case TemplateKind::kDivergent:
      if (!ends_at_terminal(path.branches[1])) return false;
      if (path.branches[0].steps.front() == path.branches[1].steps.front()) return false;
      break;
    case TemplateKind::kConvergent:
      if (!ends_at_terminal(path.branches[0]) || !ends_at_terminal(path.branches[1])) {
        return false;
      }
      if (path.branches[0] == path.branches[1]) return false;
      break;
  }
  return path.complexity == Complexity(path);
}

std::vector<ReasoningPath> PrunePaths(std::vector<ReasoningPath> paths,
                                      const PrunePolicy &policy) {
  SortUnique(&paths, true);
  if (paths.size() > policy.k) paths.resize(policy.k);
  return paths;
}

std::string SerializePath(const ReasoningPath &path, const Graph &graph) {
  std::string out = TemplateKindName(path.kind);
  out += '\t';
  out += std::to_string(path.complexity);
  for (const Branch &b : path.branches) {
    out += '\t';
    out += graph.node(path.anchor).name;
    for (const Step &s : b.steps) {
      out += " -[";
      out += graph.RelationLabel(s.relation);
      out += "]-> ";
      out += graph.node(s.node).name;
    }
  }
  return out;
}

}  // namespace pathforge
