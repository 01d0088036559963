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

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <tuple>

#include "pathforge/errors.h"
#include "test_util.h"

namespace pathforge {
namespace {

using testing::FixtureGraph;
using testing::SplitCsv;
using testing::TempDir;

constexpr char kHeader[] =
    "relation,display_relation,x_index,x_id,x_type,x_name,x_source,"
    "y_index,y_id,y_type,y_name,y_source\n";

// Counts read straight off the fixture file.
struct TableScan {
  std::map<std::string, std::string> node_type;  // key -> type
  std::set<std::tuple<std::string, std::string, std::string>> triples;
  std::map<std::string, size_t> per_relation;
  std::map<std::string, size_t> per_type;
  size_t rows = 0;
};

TableScan ScanFixture() {
  TableScan scan;
  std::istringstream in(testing::Slurp(FixtureGraph()));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = SplitCsv(line);
    ++scan.rows;
    scan.node_type.emplace(f[2], f[4]);
    scan.node_type.emplace(f[7], f[9]);
    scan.triples.insert({f[2], f[0], f[7]});
  }
  for (const auto &[h, r, t] : scan.triples) ++scan.per_relation[r];
  for (const auto &[key, type] : scan.node_type) ++scan.per_type[type];
  return scan;
}

NodeId ByName(const Graph &g, const std::string &name) {
  for (const Node &n : g.nodes()) {
    if (n.name == name) return n.id;
  }
  ADD_FAILURE() << "no node named " << name;
  return NodeId{};
}

TEST(GraphLoad, FixtureMatchesTableScan) {
  TableScan scan = ScanFixture();
  Graph g = LoadGraph(FixtureGraph());
  GraphStats s = g.Stats();
  EXPECT_EQ(s.node_count, scan.node_type.size());
  EXPECT_EQ(s.edge_count, scan.triples.size());
  EXPECT_EQ(s.edges_per_relation, scan.per_relation);
  EXPECT_EQ(s.nodes_per_type, scan.per_type);
  EXPECT_LT(scan.triples.size(), scan.rows) << "fixture should carry a duplicate row";
  EXPECT_EQ(s.node_count, 50u);
}

TEST(GraphLoad, EmptyTableWithHeader) {
  Graph g = LoadGraphFromString(kHeader);
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
  GraphStats s = g.Stats();
  EXPECT_EQ(s.node_count, 0u);
  EXPECT_TRUE(s.edges_per_relation.empty());
}

TEST(GraphLoad, EmptyFileIsEmptyGraph) {
  EXPECT_EQ(LoadGraphFromString("").node_count(), 0u);
}

TEST(GraphLoad, DuplicateRowStoredOnce) {
  std::string row = "indication,indication,1,D1,drug,A,src,2,X2,disease,B,src\n";
  Graph g = LoadGraphFromString(std::string(kHeader) + row + row + row);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.node_count(), 2u);
}

TEST(GraphLoad, MissingColumnNamed) {
  try {
    LoadGraphFromString("relation,display_relation,x_index,x_id,x_type,x_name,x_source,"
                        "y_index,y_id,y_type,y_source\n");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
    EXPECT_NE(std::string(e.what()).find("y_name"), std::string::npos) << e.what();
  }
}

TEST(GraphLoad, WrongFieldCountReportsLine) {
  std::string good = "indication,indication,1,D1,drug,A,src,2,X2,disease,B,src\n";
  try {
    LoadGraphFromString(std::string(kHeader) + good + "indication,indication,1\n");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(GraphLoad, MissingFileIsIoError) {
  try {
    LoadGraph("/nonexistent/graph.csv");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/graph.csv"), std::string::npos);
  }
}

TEST(GraphLoad, TabDelimiter) {
  std::string content = testing::Slurp(FixtureGraph());
  for (char &c : content) {
    if (c == ',') c = '\t';
  }
  LoadOptions o;
  o.delimiter = '\t';
  Graph g = LoadGraphFromString(content, o);
  EXPECT_EQ(g.Stats().edges_per_relation, LoadGraph(FixtureGraph()).Stats().edges_per_relation);
}

TEST(GraphLoad, FirstOccurrenceMetadataWins) {
  std::string rows =
      "r,r,1,D1,drug,First,src,2,X2,disease,B,src\n"
      "r,r,1,D9,drug,Second,src,3,X3,disease,C,src\n";
  Graph g = LoadGraphFromString(std::string(kHeader) + rows);
  EXPECT_EQ(g.node(*g.FindByKey("1")).name, "First");
  EXPECT_EQ(g.node(*g.FindByKey("1")).source_id, "D1");
}

TEST(GraphLoad, NodeIdsFollowFirstAppearance) {
  Graph g = LoadGraph(FixtureGraph());
  EXPECT_EQ(g.node(NodeId{0}).name, "Dalfampridine");
  EXPECT_EQ(g.node(NodeId{1}).name, "multiple sclerosis");
}

TEST(GraphIndex, ConsistentWithEdges) {
  Graph g = LoadGraph(FixtureGraph(), {.inverse_edges = true});
  size_t out_entries = 0, in_entries = 0;
  for (const Edge &e : g.edges()) {
    auto tails = g.OutIndex(e.head, e.relation);
    auto heads = g.InIndex(e.tail, e.relation);
    EXPECT_TRUE(std::binary_search(tails.begin(), tails.end(), e.tail));
    EXPECT_TRUE(std::binary_search(heads.begin(), heads.end(), e.head));
    EXPECT_TRUE(g.HasEdge(e.head, e.relation, e.tail));
  }
  for (const Node &n : g.nodes()) {
    for (const Adjacent &a : g.OutEdges(n.id)) {
      EXPECT_TRUE(g.HasEdge(n.id, a.relation.relation, a.node));
      ++out_entries;
    }
    for (const Adjacent &a : g.InEdges(n.id)) {
      EXPECT_TRUE(g.HasEdge(a.node, a.relation.relation, n.id));
      ++in_entries;
    }
    EXPECT_TRUE(std::is_sorted(g.OutEdges(n.id).begin(), g.OutEdges(n.id).end()));
    EXPECT_TRUE(std::is_sorted(g.InEdges(n.id).begin(), g.InEdges(n.id).end()));
  }
  EXPECT_EQ(out_entries, g.edge_count());
  EXPECT_EQ(in_entries, g.edge_count());
}

TEST(GraphNeighbors, DalfampridineIndications) {
  Graph g = LoadGraph(FixtureGraph());
  // From the fixture rows with x_name Dalfampridine and relation indication.
  std::set<std::string> expected;
  std::istringstream in(testing::Slurp(FixtureGraph()));
  std::string line;
  while (std::getline(in, line)) {
    auto f = SplitCsv(line);
    if (f.size() == 12 && f[5] == "Dalfampridine" && f[0] == "indication") {
      expected.insert(f[10]);
    }
  }
  std::set<std::string> got;
  for (const Adjacent &a : g.Neighbors(ByName(g, "Dalfampridine"), "indication", Direction::kOut)) {
    got.insert(g.node(a.node).name);
  }
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got.size(), 2u);
}

TEST(GraphNeighbors, BothDirectionsCountsEveryIncidentEdge) {
  Graph g = LoadGraph(FixtureGraph(), {.inverse_edges = true});
  // spinal cord injury: 2 out-edges and 1 in-edge in the fixture.
  NodeId n = ByName(g, "spinal cord injury");
  EXPECT_EQ(g.Neighbors(n, std::nullopt, Direction::kOut).size(), 2u);
  EXPECT_EQ(g.Neighbors(n, std::nullopt, Direction::kIn).size(), 1u);
  auto both = g.Neighbors(n, std::nullopt, Direction::kBoth);
  ASSERT_EQ(both.size(), 3u);
  EXPECT_TRUE(std::is_sorted(both.begin(), both.end()));
  int inverse = 0;
  for (const Adjacent &a : both) inverse += a.relation.inverse;
  EXPECT_EQ(inverse, 1);
  bool saw_inv_label = false;
  for (const Adjacent &a : both) {
    if (a.relation.inverse) saw_inv_label = g.RelationLabel(a.relation) == "inv:indication";
  }
  EXPECT_TRUE(saw_inv_label);
}

TEST(GraphNeighbors, IsolatedNodeAndErrors) {
  GraphBuilder b;
  NodeId lone = b.AddNode({"1", "X", "thing", "lonely", "src"});
  NodeId a = b.AddNode({"2", "Y", "thing", "a", "src"});
  NodeId c = b.AddNode({"3", "Z", "thing", "c", "src"});
  b.AddEdge(a, "rel", c);
  Graph g = std::move(b).Build(false);
  EXPECT_TRUE(g.Neighbors(lone, std::nullopt, Direction::kBoth).empty());
  EXPECT_THROW(g.Neighbors(NodeId{99}, std::nullopt, Direction::kOut), Error);
  EXPECT_THROW(g.Neighbors(a, std::string("nope"), Direction::kOut), Error);
  EXPECT_EQ(g.Neighbors(a, std::nullopt, Direction::kOut),
            g.Neighbors(a, std::nullopt, Direction::kOut));
}

TEST(GraphStats, InverseDoublesEdgeCount) {
  Graph plain = LoadGraph(FixtureGraph());
  Graph inv = LoadGraph(FixtureGraph(), {.inverse_edges = true});
  GraphStats s = inv.Stats();
  EXPECT_EQ(s.edge_count, 2 * plain.edge_count());
  size_t sum = 0;
  for (const auto &[rel, n] : s.edges_per_relation) sum += n;
  EXPECT_EQ(sum, s.edge_count);
  EXPECT_EQ(s.edges_per_relation.at("inv:indication"),
            plain.Stats().edges_per_relation.at("indication"));
}

TEST(GraphStats, MarginalsSumToTotals) {
  GraphStats s = LoadGraph(FixtureGraph()).Stats();
  size_t nodes = 0, edges = 0;
  for (const auto &[t, n] : s.nodes_per_type) nodes += n;
  for (const auto &[r, n] : s.edges_per_relation) edges += n;
  EXPECT_EQ(nodes, s.node_count);
  EXPECT_EQ(edges, s.edge_count);
}

TEST(GraphSnapshot, RoundTripIsIsomorphic) {
  TempDir dir;
  LoadOptions o;
  o.alias_table = testing::FixtureAliases();
  Graph g = LoadGraph(FixtureGraph(), o);
  SaveSnapshot(g, dir.File("g.pfkg"));
  EXPECT_EQ(testing::Slurp(dir.File("g.pfkg")).rfind("PFKG1", 0), 0u);
  Graph h = LoadGraph(dir.File("g.pfkg"));
  EXPECT_EQ(h.Stats().edges_per_relation, g.Stats().edges_per_relation);
  EXPECT_EQ(h.Stats().nodes_per_type, g.Stats().nodes_per_type);
  ASSERT_EQ(h.node_count(), g.node_count());
  for (const Node &n : g.nodes()) {
    const Node &m = h.node(*h.FindByKey(n.key));
    EXPECT_EQ(m.name, n.name);
    EXPECT_EQ(m.aliases, n.aliases);
    std::set<std::pair<std::string, std::string>> a, b;
    for (const Adjacent &x : g.OutEdges(n.id)) {
      a.insert({g.RelationLabel(x.relation), g.node(x.node).name});
    }
    for (const Adjacent &x : h.OutEdges(m.id)) {
      b.insert({h.RelationLabel(x.relation), h.node(x.node).name});
    }
    EXPECT_EQ(a, b);
  }
  EXPECT_EQ(SnapshotToString(h), SnapshotToString(g));
}

TEST(GraphAliases, AliasTableAttaches) {
  LoadOptions o;
  o.alias_table = testing::FixtureAliases();
  Graph g = LoadGraph(FixtureGraph(), o);
  const Node &n = g.node(ByName(g, "Flurbiprofen"));
  EXPECT_EQ(n.aliases, std::vector<std::string>{"flurbiprofen sodium"});
}

TEST(GraphLoad, NamesAreCaseSensitive) {
  std::string rows =
      "r,r,1,D1,drug,Alpha,src,2,X2,disease,alpha,src\n";
  Graph g = LoadGraphFromString(std::string(kHeader) + rows);
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.node(NodeId{0}).name, "Alpha");
  EXPECT_EQ(g.node(NodeId{1}).name, "alpha");
}

}  // namespace
}  // namespace pathforge
