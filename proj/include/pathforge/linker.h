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

#ifndef PATHFORGE_LINKER_H_
#define PATHFORGE_LINKER_H_

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pathforge/graph.h"

namespace pathforge {

// A character span [start, end) of the source text.
struct EntityMention {
  std::string surface;
  size_t start = 0;
  size_t end = 0;
};

struct LinkResult {
  EntityMention mention;
  std::vector<NodeId> candidates;  // sorted ascending, never empty
};

// Normalized surface string -> candidate nodes. Immutable once built.
class Lexicon {
 public:
  // One entry per distinct normalized name or alias; nodes sharing a
  // normalized form are merged into one candidate set.
  static Lexicon Build(const Graph &graph);

  // Returns nullptr when the key is absent. `normalized` must already be
  // normalized.
  const std::vector<NodeId> *Find(std::string_view normalized) const;

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int max_token_span() const { return max_token_span_; }

  // Keys in sorted order, mainly for tests and dumps.
  std::vector<std::string> Keys() const;

 private:
  std::unordered_map<std::string, std::vector<NodeId>> entries_;
  int max_token_span_ = 0;
};

// Extraction strategy seam. The dictionary matcher below is the only
// implementation shipped.
class EntityLinker {
 public:
  virtual ~EntityLinker() = default;
  virtual std::vector<LinkResult> Link(std::string_view text) const = 0;
};

class DictionaryLinker : public EntityLinker {
 public:
  explicit DictionaryLinker(const Lexicon &lexicon) : lexicon_(lexicon) {}
  std::vector<LinkResult> Link(std::string_view text) const override;

 private:
  const Lexicon &lexicon_;
};

// Greedy longest match, scanning tokens left to right. Matched spans never
// overlap; results are ordered by start offset.
std::vector<LinkResult> ExtractAndMap(std::string_view text,
                                      const Lexicon &lexicon);

// Whole-option lookup for exactly four answer options. An option that does
// not link yields an empty set. Throws Error(kDomain) if options.size() != 4.
std::vector<std::vector<NodeId>> MapAnswerOptions(
    std::span<const std::string> options, const Lexicon &lexicon);

// Union of all candidates, sorted and unique.
std::vector<NodeId> CandidateUnion(const std::vector<LinkResult> &links);

}  // namespace pathforge

#endif  // PATHFORGE_LINKER_H_
