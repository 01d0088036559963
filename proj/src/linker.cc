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

#include "pathforge/linker.h"

#include <algorithm>

#include "pathforge/errors.h"
#include "pathforge/text.h"

namespace pathforge {

namespace {

int TokenCount(const std::string &normalized) {
  return static_cast<int>(std::count(normalized.begin(), normalized.end(), ' ')) + 1;
}

}  // namespace

Lexicon Lexicon::Build(const Graph &graph) {
  Lexicon lexicon;
  auto add = [&lexicon](const std::string &surface, NodeId id) {
    std::string key = NormalizeSurface(surface);
    if (key.empty()) return;
    auto &ids = lexicon.entries_[key];
    if (ids.empty() || ids.back() != id) ids.push_back(id);
    lexicon.max_token_span_ = std::max(lexicon.max_token_span_, TokenCount(key));
  };
  for (const Node &node : graph.nodes()) {
    add(node.name, node.id);
    for (const std::string &alias : node.aliases) add(alias, node.id);
  }
  for (auto &[key, ids] : lexicon.entries_) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return lexicon;
}

const std::vector<NodeId> *Lexicon::Find(std::string_view normalized) const {
  auto it = entries_.find(std::string(normalized));
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> Lexicon::Keys() const {
  std::vector<std::string> keys;
  keys.reserve(entries_.size());
  for (const auto &[key, ids] : entries_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<LinkResult> ExtractAndMap(std::string_view text,
                                      const Lexicon &lexicon) {
  std::vector<LinkResult> results;
  if (lexicon.empty()) return results;
  std::vector<Token> tokens = Tokenize(text);
  size_t i = 0;
  while (i < tokens.size()) {
    size_t longest = std::min<size_t>(lexicon.max_token_span(), tokens.size() - i);
    bool matched = false;
    for (size_t span = longest; span >= 1; --span) {
      std::string key = tokens[i].normalized;
      for (size_t k = 1; k < span; ++k) {
        key.push_back(' ');
        key += tokens[i + k].normalized;
      }
      const std::vector<NodeId> *ids = lexicon.Find(key);
      if (ids == nullptr) continue;
      LinkResult link;
      link.mention.start = tokens[i].start;
      link.mention.end = tokens[i + span - 1].end;
      link.mention.surface =
          std::string(text.substr(link.mention.start,
                                  link.mention.end - link.mention.start));
      link.candidates = *ids;
      results.push_back(std::move(link));
      i += span;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return results;
}

std::vector<LinkResult> DictionaryLinker::Link(std::string_view text) const {
  return ExtractAndMap(text, lexicon_);
}

std::vector<std::vector<NodeId>> MapAnswerOptions(
    std::span<const std::string> options, const Lexicon &lexicon) {
  if (options.size() != 4) {
    throw Error(ErrorCode::kDomain, "expected exactly 4 answer options, got " +
                                        std::to_string(options.size()));
  }
  std::vector<std::vector<NodeId>> out;
  for (const std::string &option : options) {
    const std::vector<NodeId> *ids = lexicon.Find(NormalizeSurface(option));
    out.push_back(ids ? *ids : std::vector<NodeId>{});
  }
  return out;
}

std::vector<NodeId> CandidateUnion(const std::vector<LinkResult> &links) {
  std::vector<NodeId> out;
  for (const LinkResult &link : links) {
    out.insert(out.end(), link.candidates.begin(), link.candidates.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace pathforge
