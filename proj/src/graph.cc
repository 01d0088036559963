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

#include "pathforge/graph.h"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "delimited.h"
#include "nlohmann/json.hpp"
#include "pathforge/errors.h"
#include "pathforge/io.h"

namespace pathforge {

namespace {

constexpr std::string_view kSnapshotMagic = "PFKG1";

const char *const kColumns[] = {
    "relation", "display_relation", "x_index", "x_id",   "x_type", "x_name",
    "x_source", "y_index",          "y_id",    "y_type", "y_name", "y_source"};

enum Column {
  kRelation, kDisplay, kXIndex, kXId, kXType, kXName, kXSource,
  kYIndex, kYId, kYType, kYName, kYSource, kNumColumns
};

struct TripleHash {
  size_t operator()(const std::tuple<uint32_t, uint32_t, uint32_t> &t) const {
    uint64_t h = std::get<0>(t);
    h = h * 0x9E3779B97F4A7C15ULL + std::get<1>(t);
    h = h * 0x9E3779B97F4A7C15ULL + std::get<2>(t);
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

std::span<const Adjacent> Segment(const std::vector<uint32_t> &offsets,
                                  const std::vector<Adjacent> &entries,
                                  NodeId id) {
  return std::span<const Adjacent>(entries.data() + offsets[id.value],
                                   offsets[id.value + 1] - offsets[id.value]);
}

std::vector<NodeId> RelationSlice(std::span<const Adjacent> segment,
                                  RelationRef ref) {
  auto lo = std::lower_bound(segment.begin(), segment.end(),
                             Adjacent{ref, NodeId{0}});
  std::vector<NodeId> out;
  for (auto it = lo; it != segment.end() && it->relation == ref; ++it) {
    out.push_back(it->node);
  }
  return out;
}

void BuildCsr(size_t node_count, const std::vector<Edge> &edges, bool incoming,
              std::vector<uint32_t> *offsets, std::vector<Adjacent> *entries) {
  offsets->assign(node_count + 1, 0);
  for (const Edge &e : edges) {
    ++(*offsets)[(incoming ? e.tail : e.head).value + 1];
  }
  std::partial_sum(offsets->begin(), offsets->end(), offsets->begin());
  entries->resize(edges.size());
  std::vector<uint32_t> cursor(offsets->begin(), offsets->end() - 1);
  for (const Edge &e : edges) {
    NodeId owner = incoming ? e.tail : e.head;
    NodeId other = incoming ? e.head : e.tail;
    (*entries)[cursor[owner.value]++] =
        Adjacent{RelationRef{e.relation, incoming}, other};
  }
  for (size_t i = 0; i < node_count; ++i) {
    std::sort(entries->begin() + (*offsets)[i],
              entries->begin() + (*offsets)[i + 1]);
  }
}

void ApplyAliasTable(GraphBuilder *builder, const std::string &path,
                     char delimiter) {
  std::string content = ReadFile(path);
  DelimitedReader reader(content, delimiter);
  std::vector<std::string> fields;
  bool first = true;
  while (reader.Next(&fields)) {
    if (fields.size() != 2) {
      throw Error(ErrorCode::kSchema,
                  path + ": line " + std::to_string(reader.line()) +
                      ": expected 2 fields (alias, canonical), got " +
                      std::to_string(fields.size()));
    }
    if (first && fields[0] == "alias" && fields[1] == "canonical") {
      first = false;
      continue;
    }
    first = false;
    if (!fields[0].empty()) builder->AddAlias(fields[0], fields[1]);
  }
}

Graph LoadTable(std::string_view content, const LoadOptions &options) {
  DelimitedReader reader(content, options.delimiter);
  std::vector<std::string> fields;
  GraphBuilder builder;
  if (!reader.Next(&fields)) {
    return std::move(builder).Build(options.inverse_edges);  // empty file
  }
  int index[kNumColumns];
  for (int c = 0; c < kNumColumns; ++c) {
    auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
    if (it == fields.end()) {
      throw Error(ErrorCode::kSchema,
                  std::string("missing column: ") + kColumns[c]);
    }
    index[c] = static_cast<int>(it - fields.begin());
  }
  const size_t width = fields.size();
  while (reader.Next(&fields)) {
    if (fields.size() != width) {
      throw Error(ErrorCode::kSchema,
                  "line " + std::to_string(reader.line()) + ": expected " +
                      std::to_string(width) + " fields, got " +
                      std::to_string(fields.size()));
    }
    auto field = [&](Column c) -> const std::string & { return fields[index[c]]; };
    for (Column c : {kRelation, kXIndex, kXName, kXType, kYIndex, kYName, kYType}) {
      if (field(c).empty()) {
        throw Error(ErrorCode::kSchema, "line " + std::to_string(reader.line()) +
                                            ": empty " + kColumns[c]);
      }
    }
    NodeId head = builder.AddNode({field(kXIndex), field(kXId), field(kXType),
                                   field(kXName), field(kXSource)});
    NodeId tail = builder.AddNode({field(kYIndex), field(kYId), field(kYType),
                                   field(kYName), field(kYSource)});
    builder.AddEdge(head, field(kRelation), tail, field(kDisplay));
  }
  if (!options.alias_table.empty()) {
    ApplyAliasTable(&builder, options.alias_table, options.delimiter);
  }
  return std::move(builder).Build(options.inverse_edges);
}

Graph LoadSnapshot(std::string_view content, const LoadOptions &options) {
  using nlohmann::json;
  size_t pos = content.find('\n');
  if (pos == std::string_view::npos) {
    throw Error(ErrorCode::kSchema, "truncated snapshot");
  }
  int line_no = 1;
  auto next_line = [&]() -> json {
    size_t start = pos + 1;
    if (start >= content.size()) {
      throw Error(ErrorCode::kSchema, "truncated snapshot");
    }
    size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    pos = end;
    ++line_no;
    try {
      return json::parse(content.substr(start, end - start));
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kSchema, "snapshot line " +
                                          std::to_string(line_no) + ": " +
                                          e.what());
    }
  };
  try {
    json header = next_line();
    bool inverse = header.at("inverse_edges").get<bool>();
    size_t relation_count = header.at("relations").get<size_t>();
    size_t node_count = header.at("nodes").get<size_t>();
    size_t edge_count = header.at("edges").get<size_t>();
    GraphBuilder builder;
    std::vector<std::pair<std::string, std::string>> relations;
    for (size_t i = 0; i < relation_count; ++i) {
      json r = next_line();
      relations.emplace_back(r.at("label").get<std::string>(),
                             r.at("display").get<std::string>());
    }
    for (size_t i = 0; i < node_count; ++i) {
      json n = next_line();
      NodeId id = builder.AddNode({n.at("key").get<std::string>(),
                                   n.at("source_id").get<std::string>(),
                                   n.at("type").get<std::string>(),
                                   n.at("name").get<std::string>(),
                                   n.at("source").get<std::string>()});
      for (const auto &alias : n.at("aliases")) {
        builder.AddAlias(id, alias.get<std::string>());
      }
    }
    for (size_t i = 0; i < edge_count; ++i) {
      json e = next_line();
      size_t h = e.at(0).get<size_t>(), r = e.at(1).get<size_t>(),
             t = e.at(2).get<size_t>();
      if (h >= node_count || t >= node_count || r >= relation_count) {
        throw Error(ErrorCode::kSchema, "snapshot line " +
                                            std::to_string(line_no) +
                                            ": index out of range");
      }
      builder.AddEdge(NodeId{static_cast<uint32_t>(h)}, relations[r].first,
                      NodeId{static_cast<uint32_t>(t)}, relations[r].second);
    }
    if (!options.alias_table.empty()) {
      ApplyAliasTable(&builder, options.alias_table, options.delimiter);
    }
    return std::move(builder).Build(inverse);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchema,
                "snapshot line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace

const Node &Graph::node(NodeId id) const {
  if (!Contains(id)) {
    throw Error(ErrorCode::kDomain, "unknown node id " + std::to_string(id.value));
  }
  return nodes_[id.value];
}

std::optional<NodeId> Graph::FindByKey(std::string_view key) const {
  auto it = key_index_.find(std::string(key));
  if (it == key_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Graph::FindRelation(std::string_view label) const {
  auto it = relation_index_.find(std::string(label));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationRef> Graph::FindRelationRef(std::string_view label) const {
  bool inverse = label.starts_with(kInversePrefix);
  if (inverse) label.remove_prefix(kInversePrefix.size());
  auto id = FindRelation(label);
  if (!id) return std::nullopt;
  return RelationRef{*id, inverse};
}

const std::string &Graph::RelationLabel(RelationRef ref) const {
  return ref.inverse ? inverse_labels_[ref.relation.value]
                     : relations_[ref.relation.value].label;
}

const std::string &Graph::ReportLabel(RelationRef ref) const {
  if (ref.inverse && !inverse_edges_) return relations_[ref.relation.value].label;
  return RelationLabel(ref);
}

std::optional<std::string> Graph::InverseOf(RelationId relation) const {
  if (!inverse_edges_) return std::nullopt;
  return inverse_labels_[relation.value];
}

std::span<const Adjacent> Graph::OutEdges(NodeId id) const {
  node(id);
  return Segment(out_offsets_, out_entries_, id);
}

std::span<const Adjacent> Graph::InEdges(NodeId id) const {
  node(id);
  return Segment(in_offsets_, in_entries_, id);
}

std::vector<NodeId> Graph::OutIndex(NodeId head, RelationId relation) const {
  return RelationSlice(OutEdges(head), RelationRef{relation, false});
}

std::vector<NodeId> Graph::InIndex(NodeId tail, RelationId relation) const {
  return RelationSlice(InEdges(tail), RelationRef{relation, true});
}

bool Graph::HasEdge(NodeId head, RelationId relation, NodeId tail) const {
  if (!Contains(head) || !Contains(tail) || relation.value >= relations_.size()) {
    return false;
  }
  auto segment = Segment(out_offsets_, out_entries_, head);
  return std::binary_search(segment.begin(), segment.end(),
                            Adjacent{RelationRef{relation, false}, tail});
}

bool Graph::HasStep(NodeId from, RelationRef ref, NodeId to) const {
  return ref.inverse ? HasEdge(to, ref.relation, from)
                     : HasEdge(from, ref.relation, to);
}

std::vector<Adjacent> Graph::Neighbors(NodeId id,
                                       std::optional<std::string_view> relation,
                                       Direction direction) const {
  node(id);
  std::optional<RelationId> filter;
  if (relation) {
    filter = FindRelation(*relation);
    if (!filter) {
      throw Error(ErrorCode::kDomain,
                  "unknown relation: " + std::string(*relation));
    }
  }
  std::vector<Adjacent> out;
  auto take = [&](std::span<const Adjacent> segment) {
    for (const Adjacent &a : segment) {
      if (!filter || a.relation.relation == *filter) out.push_back(a);
    }
  };
  if (direction != Direction::kIn) take(OutEdges(id));
  if (direction != Direction::kOut) take(InEdges(id));
  // Both segments are sorted and forward entries order before inverse ones
  // of the same relation, so a single sort restores the global order.
  std::sort(out.begin(), out.end());
  return out;
}

GraphStats Graph::Stats() const {
  GraphStats stats;
  stats.node_count = nodes_.size();
  for (const Node &n : nodes_) ++stats.nodes_per_type[n.node_type];
  std::vector<size_t> per_relation(relations_.size(), 0);
  for (const Edge &e : edges_) ++per_relation[e.relation.value];
  for (size_t r = 0; r < relations_.size(); ++r) {
    if (per_relation[r] == 0) continue;
    stats.edges_per_relation[relations_[r].label] += per_relation[r];
    if (inverse_edges_) {
      stats.edges_per_relation[inverse_labels_[r]] += per_relation[r];
    }
  }
  stats.edge_count = edges_.size() * (inverse_edges_ ? 2 : 1);
  return stats;
}

NodeId GraphBuilder::AddNode(const NodeRecord &record) {
  auto it = by_key_.find(record.key);
  if (it != by_key_.end()) return it->second;
  if (record.name.empty()) {
    throw Error(ErrorCode::kSchema, "node " + record.key + " has an empty name");
  }
  NodeId id{static_cast<uint32_t>(nodes_.size())};
  Node node;
  node.id = id;
  node.key = record.key;
  node.source_id = record.source_id;
  node.node_type = record.node_type;
  node.name = record.name;
  node.source = record.source;
  nodes_.push_back(std::move(node));
  by_key_.emplace(record.key, id);
  by_name_.emplace(record.name, id);
  return id;
}

void GraphBuilder::AddEdge(NodeId head, std::string_view relation, NodeId tail,
                           std::string_view display) {
  if (head.value >= nodes_.size() || tail.value >= nodes_.size()) {
    throw Error(ErrorCode::kDomain, "edge references an unknown node");
  }
  std::string label(relation);
  auto [it, inserted] = relation_ids_.emplace(
      label, static_cast<uint32_t>(relations_.size()));
  if (inserted) {
    relations_.push_back({label, display.empty() ? label : std::string(display)});
  }
  edges_.push_back({head, it->second, tail});
}

size_t GraphBuilder::AddAlias(std::string_view alias, std::string_view canonical) {
  auto [lo, hi] = by_name_.equal_range(std::string(canonical));
  size_t count = 0;
  for (auto it = lo; it != hi; ++it, ++count) AddAlias(it->second, alias);
  return count;
}

void GraphBuilder::AddAlias(NodeId node, std::string_view alias) {
  auto &aliases = nodes_.at(node.value).aliases;
  auto pos = std::lower_bound(aliases.begin(), aliases.end(), alias);
  if (pos == aliases.end() || *pos != alias) {
    aliases.insert(pos, std::string(alias));
  }
}

Graph GraphBuilder::Build(bool inverse_edges) && {
  Graph g;
  g.inverse_edges_ = inverse_edges;
  g.nodes_ = std::move(nodes_);
  g.key_index_ = std::move(by_key_);

  std::vector<uint32_t> order(relations_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return relations_[a].label < relations_[b].label;
  });
  std::vector<uint32_t> remap(relations_.size());
  for (uint32_t i = 0; i < order.size(); ++i) {
    remap[order[i]] = i;
    g.relations_.push_back(relations_[order[i]]);
    g.inverse_labels_.push_back(std::string(kInversePrefix) +
                                relations_[order[i]].label);
    g.relation_index_.emplace(relations_[order[i]].label, RelationId{i});
  }

  std::unordered_set<std::tuple<uint32_t, uint32_t, uint32_t>, TripleHash> seen;
  seen.reserve(edges_.size());
  for (const PendingEdge &e : edges_) {
    uint32_t r = remap[e.relation];
    if (seen.emplace(e.head.value, r, e.tail.value).second) {
      g.edges_.push_back({e.head, RelationId{r}, e.tail});
    }
  }

  for (const Node &n : g.nodes_) g.node_types_.push_back(n.node_type);
  std::sort(g.node_types_.begin(), g.node_types_.end());
  g.node_types_.erase(std::unique(g.node_types_.begin(), g.node_types_.end()),
                      g.node_types_.end());

  BuildCsr(g.nodes_.size(), g.edges_, false, &g.out_offsets_, &g.out_entries_);
  BuildCsr(g.nodes_.size(), g.edges_, true, &g.in_offsets_, &g.in_entries_);
  return g;
}

std::vector<std::string> RequiredColumns() {
  return std::vector<std::string>(std::begin(kColumns), std::end(kColumns));
}

Graph LoadGraphFromString(std::string_view content, const LoadOptions &options) {
  std::string_view first = content.substr(0, content.find('\n'));
  if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
  if (first == kSnapshotMagic) return LoadSnapshot(content, options);
  return LoadTable(content, options);
}

Graph LoadGraph(const std::string &path, const LoadOptions &options) {
  std::string content = ReadFile(path);
  try {
    return LoadGraphFromString(content, options);
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kSchema) {
      throw Error(ErrorCode::kSchema, path + ": " + e.what());
    }
    throw;
  }
}

std::string SnapshotToString(const Graph &graph) {
  using nlohmann::json;
  std::string out(kSnapshotMagic);
  out.push_back('\n');
  auto emit = [&out](const json &j) {
    out += j.dump(-1, ' ', false, json::error_handler_t::replace);
    out.push_back('\n');
  };
  emit(json{{"edges", graph.edge_count()},
            {"inverse_edges", graph.inverse_edges()},
            {"nodes", graph.node_count()},
            {"relations", graph.relations().size()}});
  for (const Relation &r : graph.relations()) {
    emit(json{{"display", r.display}, {"label", r.label}});
  }
  for (const Node &n : graph.nodes()) {
    emit(json{{"aliases", n.aliases},
              {"key", n.key},
              {"name", n.name},
              {"source", n.source},
              {"source_id", n.source_id},
              {"type", n.node_type}});
  }
  for (const Edge &e : graph.edges()) {
    emit(json::array({e.head.value, e.relation.value, e.tail.value}));
  }
  return out;
}

void SaveSnapshot(const Graph &graph, const std::string &path) {
  WriteFileAtomic(path, SnapshotToString(graph));
}

}  // namespace pathforge
