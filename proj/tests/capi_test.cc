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

#include "pathforge/pathforge.h"

#include <gtest/gtest.h>

#include <memory>
#include <string>

#include "json.hpp"
#include "test_util.h"

namespace {

using nlohmann::json;

std::string Take(char *s) {
  std::string out = s ? s : "";
  pf_string_free(s);
  return out;
}

struct GraphDeleter {
  void operator()(pf_graph *g) const { pf_graph_free(g); }
};
struct LexiconDeleter {
  void operator()(pf_lexicon *l) const { pf_lexicon_free(l); }
};
using GraphPtr = std::unique_ptr<pf_graph, GraphDeleter>;
using LexiconPtr = std::unique_ptr<pf_lexicon, LexiconDeleter>;

GraphPtr Load(const std::string &path, const char *options = nullptr) {
  pf_graph *g = nullptr;
  EXPECT_EQ(pf_graph_load(path.c_str(), options, &g), PF_OK) << pf_last_error();
  return GraphPtr(g);
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(pf_version(), "0.3.0");
  EXPECT_STREQ(pf_status_name(PF_OK), "ok");
  EXPECT_STRNE(pf_status_name(PF_ERR_SCHEMA), pf_status_name(PF_ERR_IO));
  EXPECT_NE(pf_status_name(static_cast<pf_status>(999)), nullptr);
}

TEST(CApi, NullArgumentsAreRejected) {
  pf_graph *g = nullptr;
  EXPECT_EQ(pf_graph_load(nullptr, nullptr, &g), PF_ERR_NULL_ARGUMENT);
  EXPECT_EQ(pf_graph_load("x", nullptr, nullptr), PF_ERR_NULL_ARGUMENT);
  EXPECT_NE(std::string(pf_last_error()), "");
  char *out = nullptr;
  EXPECT_EQ(pf_graph_stats_json(nullptr, &out), PF_ERR_NULL_ARGUMENT);
  pf_graph_free(nullptr);
  pf_lexicon_free(nullptr);
  pf_manifest_free(nullptr);
  pf_string_free(nullptr);
}

TEST(CApi, LoadErrorsMapToStatus) {
  pf_graph *g = nullptr;
  EXPECT_EQ(pf_graph_load("/nonexistent/file.csv", nullptr, &g), PF_ERR_IO);
  EXPECT_EQ(g, nullptr);
  EXPECT_NE(std::string(pf_last_error()).find("/nonexistent/file.csv"), std::string::npos);
  pathforge::testing::TempDir dir;
  pathforge::testing::WriteString(dir.File("bad.csv"), "relation,x_index\n");
  EXPECT_EQ(pf_graph_load(dir.File("bad.csv").c_str(), nullptr, &g), PF_ERR_SCHEMA);
  EXPECT_EQ(pf_graph_load(pathforge::testing::FixtureGraph().c_str(), "{not json", &g),
            PF_ERR_INVALID_INPUT);
}

TEST(CApi, StatsSnapshotAndLinking) {
  std::string opts = json{{"alias_table", pathforge::testing::FixtureAliases()}}.dump();
  GraphPtr g = Load(pathforge::testing::FixtureGraph(), opts.c_str());
  char *out = nullptr;
  ASSERT_EQ(pf_graph_stats_json(g.get(), &out), PF_OK);
  json stats = json::parse(Take(out));
  EXPECT_EQ(stats["node_count"], 50);
  EXPECT_EQ(stats["edge_count"], 94);
  pathforge::testing::TempDir dir;
  ASSERT_EQ(pf_graph_save_snapshot(g.get(), dir.File("s.pfkg").c_str()), PF_OK);
  GraphPtr h = Load(dir.File("s.pfkg"));
  ASSERT_EQ(pf_graph_stats_json(h.get(), &out), PF_OK);
  EXPECT_EQ(json::parse(Take(out)), stats);

  pf_lexicon *lex = nullptr;
  ASSERT_EQ(pf_lexicon_create(g.get(), &lex), PF_OK);
  LexiconPtr lexicon(lex);
  ASSERT_EQ(pf_link_text_json(g.get(), lex, "Does flurbiprofen sodium cause nausea?", &out), PF_OK);
  json links = json::parse(Take(out));
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0]["candidates"][0]["name"], "Flurbiprofen");
  EXPECT_EQ(links[1]["candidates"][0]["name"], "Nausea");
}

TEST(CApi, MineDalfampridine) {
  GraphPtr g = Load(pathforge::testing::FixtureGraph());
  pf_lexicon *lex = nullptr;
  ASSERT_EQ(pf_lexicon_create(g.get(), &lex), PF_OK);
  LexiconPtr lexicon(lex);
  char *out = nullptr;
  ASSERT_EQ(pf_mine_question(g.get(), lex, "Which disease can be treated with Dalfampridine?",
                             "multiple sclerosis", "{\"max_d\": 3}", &out),
            PF_OK)
      << pf_last_error();
  std::string text = Take(out);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "Basic\tlinear\t1\tDalfampridine -[indication]-> multiple sclerosis");
  EXPECT_EQ(pf_mine_question(g.get(), lex, "What about unicorns?", "multiple sclerosis",
                             nullptr, &out),
            PF_ERR_LINKING);
}

TEST(CApi, ScoreAndGrpo) {
  pathforge::testing::TempDir dir;
  pathforge::testing::WriteString(dir.File("r.jsonl"),
                                  "\"<think>a</think><answer>B</answer>\"\n\"<answer>A</answer>\"\n");
  pathforge::testing::WriteString(dir.File("g.jsonl"), "\"B\"\n\"C\"\n");
  char *out = nullptr;
  ASSERT_EQ(pf_score_files(dir.File("r.jsonl").c_str(), dir.File("g.jsonl").c_str(), nullptr,
                           &out),
            PF_OK);
  json report = json::parse(Take(out));
  EXPECT_EQ(report["accuracy"], 0.5);
  EXPECT_EQ(pf_score_files(dir.File("r.jsonl").c_str(), dir.File("g.jsonl").c_str(), "fuzzy",
                           &out),
            PF_ERR_INVALID_INPUT);
  pathforge::testing::WriteString(dir.File("groups.jsonl"),
                                  "{\"responses\": [0, 1], \"rewards\": [3, 3], \"pi_new\": [0.5, 0.5],"
                                  " \"pi_old\": [0.5, 0.5], \"pi_ref\": [0.5, 0.5]}\n");
  ASSERT_EQ(pf_grpo_eval_file(dir.File("groups.jsonl").c_str(), "{\"beta\": 0}", &out), PF_OK);
  json groups = json::parse(Take(out));
  EXPECT_EQ(groups["groups"][0]["advantages"], json::array({0.0, 0.0}));
  EXPECT_EQ(groups["groups"][0]["objective"], 0.0);
}

TEST(CApi, ManifestVerify) {
  pathforge::testing::TempDir dir;
  pathforge::testing::WriteString(dir.File("in.txt"), "input");
  pathforge::testing::WriteString(dir.File("out.txt"), "output");
  pf_manifest *m = nullptr;
  ASSERT_EQ(pf_manifest_create("seed = 3\n", &m), PF_OK);
  std::unique_ptr<pf_manifest, void (*)(pf_manifest *)> guard(m, pf_manifest_free);
  EXPECT_EQ(pf_manifest_set_field(m, "seed", "3"), PF_OK);
  EXPECT_EQ(pf_manifest_set_field(m, "bad", "{nope"), PF_ERR_INVALID_INPUT);
  std::string in = dir.File("in.txt"), out_file = dir.File("out.txt");
  const char *ins[] = {in.c_str()};
  const char *outs[] = {out_file.c_str()};
  ASSERT_EQ(pf_manifest_add_stage(m, "stage", ins, 1, outs, 1, 0.5), PF_OK);
  ASSERT_EQ(pf_manifest_write(m, dir.File("manifest.json").c_str()), PF_OK);
  char *hex = nullptr;
  ASSERT_EQ(pf_manifest_config_hash(m, &hex), PF_OK);
  EXPECT_EQ(Take(hex).size(), 64u);
  char *report = nullptr;
  EXPECT_EQ(pf_manifest_verify(dir.File("manifest.json").c_str(), &report), PF_OK);
  Take(report);
  pathforge::testing::WriteString(dir.File("out.txt"), "tampered");
  EXPECT_EQ(pf_manifest_verify(dir.File("manifest.json").c_str(), &report), PF_ERR_IO);
  EXPECT_NE(Take(report).find("out.txt"), std::string::npos);
  ASSERT_EQ(pf_sha256_file(dir.File("in.txt").c_str(), &hex), PF_OK);
  // sha256("input")
  EXPECT_EQ(Take(hex), "c96c6d5be8d08a12e7b5cdc1b207fa6b2430974c86803d8891675e76fd992c20");
}

}  // namespace
