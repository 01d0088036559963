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

#ifndef PATHFORGE_GRAPH_H_
#define PATHFORGE_GRAPH_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pathforge {

// Dense node index assigned in order of first appearance at load time.
struct NodeId {
  uint32_t value = 0;
  auto operator<=>(const NodeId &) const = default;
};

// Index into the graph's relation table. Relation ids follow the
// lexicographic order of relation labels.
struct RelationId {
  uint32_t value = 0;
  auto operator<=>(const RelationId &) const = default;
};

// A relation as traversed: forward along (head -> tail) or inverse
// (tail -> head). Orders forward before inverse for the same relation.
struct RelationRef {
  RelationId relation;
  bool inverse = false;

  uint32_t Encode() const { return relation.value * 2 + (inverse ? 1 : 0); }
  bool operator==(const RelationRef &) const = default;
  auto operator<=>(const RelationRef &other) const {
    return Encode() <=> other.Encode();
  }
};

inline constexpr std::string_view kInversePrefix = "inv:";

struct Node {
  NodeId id;
  std::string node_type;
  std::string name;
  std::vector<std::string> aliases;  // sorted, unique
  std::string source_id;
  std::string source;
  std::string key;  // external node index (x_index / y_index column)
};

struct Edge {
  NodeId head;
  RelationId relation;
  NodeId tail;
  bool operator==(const Edge &) const = default;
};

struct Relation {
  std::string label;
  std::string display;
};

// One adjacency entry seen from the node it belongs to.
struct Adjacent {
  RelationRef relation;
  NodeId node;
  auto operator<=>(const Adjacent &) const = default;
};

enum class Direction { kOut, kIn, kBoth };

struct GraphStats {
  size_t node_count = 0;
  size_t edge_count = 0;
  std::map<std::string, size_t> nodes_per_type;
  std::map<std::string, size_t> edges_per_relation;
};

class GraphBuilder;

// Immutable typed property graph with CSR adjacency in both directions.
// Safe for concurrent reads.
class Graph {
 public:
  Graph() = default;

  size_t node_count() const { return nodes_.size(); }
  size_t edge_count() const { return edges_.size(); }
  const std::vector<Node> &nodes() const { return nodes_; }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<Relation> &relations() const { return relations_; }
  const std::vector<std::string> &node_types() const { return node_types_; }

  // True when in-edges are exposed under "inv:<relation>" labels.
  bool inverse_edges() const { return inverse_edges_; }

  bool Contains(NodeId id) const { return id.value < nodes_.size(); }
  const Node &node(NodeId id) const;
  // Lookup by external node key (the x_index / y_index column).
  std::optional<NodeId> FindByKey(std::string_view key) const;

  std::optional<RelationId> FindRelation(std::string_view label) const;
  // Accepts both plain and "inv:"-prefixed labels.
  std::optional<RelationRef> FindRelationRef(std::string_view label) const;
  const std::string &RelationLabel(RelationRef ref) const;

  // Optional inverse label of a relation; set only when inverse edges are
  // configured.
  std::optional<std::string> InverseOf(RelationId relation) const;

  // Sorted out-edges of a node, all with relation.inverse == false.
  std::span<const Adjacent> OutEdges(NodeId id) const;
  // Sorted in-edges of a node, all with relation.inverse == true. The
  // adjacent node is the edge head.
  std::span<const Adjacent> InEdges(NodeId id) const;

  // Sorted tails of (head, relation) and heads of (tail, relation).
  std::vector<NodeId> OutIndex(NodeId head, RelationId relation) const;
  std::vector<NodeId> InIndex(NodeId tail, RelationId relation) const;

  bool HasEdge(NodeId head, RelationId relation, NodeId tail) const;
  // True when `from -ref-> to` is a real traversal step.
  bool HasStep(NodeId from, RelationRef ref, NodeId to) const;

  // Throws Error(kDomain) for unknown ids or unknown relation labels.
  std::vector<Adjacent> Neighbors(NodeId id,
                                  std::optional<std::string_view> relation,
                                  Direction direction) const;

  // Label used when reporting an in-edge: the inverse label when inverse
  // edges are configured, the plain label otherwise.
  const std::string &ReportLabel(RelationRef ref) const;

  GraphStats Stats() const;

 private:
  friend class GraphBuilder;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<Relation> relations_;
  std::vector<std::string> inverse_labels_;
  std::vector<std::string> node_types_;
  std::unordered_map<std::string, RelationId> relation_index_;
  std::unordered_map<std::string, NodeId> key_index_;
  std::vector<uint32_t> out_offsets_;
  std::vector<Adjacent> out_entries_;
  std::vector<uint32_t> in_offsets_;
  std::vector<Adjacent> in_entries_;
  bool inverse_edges_ = false;
};

// Accumulates nodes and edges, then freezes them into a Graph. Nodes are
// keyed by their external key; the first occurrence wins. Duplicate
// (head, relation, tail) triples are dropped.
class GraphBuilder {
 public:
  struct NodeRecord {
    std::string key;
    std::string source_id;
    std::string node_type;
    std::string name;
    std::string source;
  };

  NodeId AddNode(const NodeRecord &record);
  void AddEdge(NodeId head, std::string_view relation, NodeId tail,
               std::string_view display = {});
  // Attaches an alias to every node whose name equals `canonical`.
  // Returns the number of nodes that received it.
  size_t AddAlias(std::string_view alias, std::string_view canonical);
  void AddAlias(NodeId node, std::string_view alias);

  size_t node_count() const { return nodes_.size(); }

  Graph Build(bool inverse_edges) &&;

 private:
  struct PendingEdge {
    NodeId head;
    uint32_t relation;
    NodeId tail;
  };

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> by_key_;
  std::unordered_multimap<std::string, NodeId> by_name_;
  std::vector<Relation> relations_;
  std::unordered_map<std::string, uint32_t> relation_ids_;
  std::vector<PendingEdge> edges_;
};

struct LoadOptions {
  char delimiter = ',';
  bool inverse_edges = false;
  // Optional two-column (alias, canonical name) table, same delimiter.
  std::string alias_table;
};

// Loads either a delimited PrimeKG-style edge table or a "PFKG1" snapshot
// (detected from the first line). Throws Error(kSchema) for missing
// columns or malformed rows and Error(kIo) when the file cannot be read.
Graph LoadGraph(const std::string &path, const LoadOptions &options = {});
Graph LoadGraphFromString(std::string_view content,
                          const LoadOptions &options = {});

void SaveSnapshot(const Graph &graph, const std::string &path);
std::string SnapshotToString(const Graph &graph);

std::vector<std::string> RequiredColumns();

}  // namespace pathforge

template <>
struct std::hash<pathforge::NodeId> {
  size_t operator()(pathforge::NodeId id) const noexcept {
    return std::hash<uint32_t>()(id.value);
  }
};

#endif  // PATHFORGE_GRAPH_H_
