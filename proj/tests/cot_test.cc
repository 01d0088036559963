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

#include "pathforge/cot.h"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "pathforge/errors.h"
#include "pathforge/io.h"
#include "pathforge/mine.h"
#include "test_util.h"

namespace pathforge {
namespace {

size_t Occurrences(const std::string &hay, const std::string &needle) {
  size_t n = 0;
  for (size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
  return n;
}

class CotTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    graph_ = new Graph(LoadGraph(testing::FixtureGraph()));
    lexicon_ = new Lexicon(Lexicon::Build(*graph_));
  }
  static void TearDownTestSuite() {
    delete lexicon_;
    delete graph_;
  }

  // Fixture items with mined paths, in id order.
  static std::vector<QAItem> MinedItems(size_t per_category) {
    ForgeOptions opts;
    for (const CategorySpec &spec : DefaultCategorySpecs()) opts.plans.push_back({spec, per_category});
    opts.seed = 4;
    opts.shortfall_tolerance = 1.0;
    opts.attach.max_d = 3;
    opts.attach.prune.k = 4;
    return ForgeBenchmark(*graph_, *lexicon_, opts).items;
  }

  static Graph *graph_;
  static Lexicon *lexicon_;
};

Graph *CotTest::graph_ = nullptr;
Lexicon *CotTest::lexicon_ = nullptr;

TEST(PromptTemplates, DefaultsValidateAndCarryInstructions) {
  PromptTemplate gen = DefaultGenerationTemplate();
  PromptTemplate prune = DefaultPruningTemplate();
  EXPECT_NO_THROW(CheckPromptTemplate(gen));
  EXPECT_NO_THROW(CheckPromptTemplate(prune));
  EXPECT_NE(gen.body.find("step by step"), std::string::npos);
  EXPECT_NE(gen.body.find("reasoning paths"), std::string::npos);
  EXPECT_NE(prune.body.find("only the essential logical chain leading to the answer"),
            std::string::npos);
}

TEST(PromptTemplates, ShippedFilesMatchCompiledDefaults) {
  PromptTemplate gen =
      LoadPromptTemplate(testing::DataPath("prompts/generation.txt"), PromptRole::kGeneration);
  PromptTemplate prune =
      LoadPromptTemplate(testing::DataPath("prompts/pruning.txt"), PromptRole::kPruning);
  EXPECT_EQ(gen.name, "generation");
  EXPECT_EQ(gen.body, DefaultGenerationTemplate().body);
  EXPECT_EQ(prune.body, DefaultPruningTemplate().body);
}

TEST(PromptTemplates, PlaceholderChecks) {
  auto code_of = [](const PromptTemplate &t) {
    try {
      CheckPromptTemplate(t);
    } catch (const Error &e) {
      return static_cast<int>(e.code());
    }
    return -1;
  };
  const int kTemplate = static_cast<int>(ErrorCode::kTemplate);
  EXPECT_EQ(code_of({"g", PromptRole::kGeneration, "{question} {answer}"}), kTemplate);
  EXPECT_EQ(code_of({"g", PromptRole::kGeneration, "{question} {answer} {paths} {extra}"}),
            kTemplate);
  EXPECT_EQ(code_of({"g", PromptRole::kGeneration, "{question} {answer} {paths} {chain}"}),
            kTemplate);
  EXPECT_EQ(code_of({"p", PromptRole::kPruning, "{question}"}), kTemplate);
  EXPECT_EQ(code_of({"p", PromptRole::kPruning, "{question} {chain} {JSON} {}"}), -1);
  testing::TempDir dir;
  testing::WriteString(dir.File("bad.txt"), "{question} only");
  EXPECT_THROW(LoadPromptTemplate(dir.File("bad.txt"), PromptRole::kPruning), Error);
}

TEST(PromptTemplates, RenderIsSinglePass) {
  PromptTemplate t{"t", PromptRole::kPruning, "Q={question} C={chain}"};
  EXPECT_EQ(RenderTemplate(t, {{"question", "{chain}"}, {"chain", "x"}}), "Q={chain} C=x");
}

TEST(Prompts, EmptyPathsUseMarker) {
  std::string p = BuildGenerationPrompt("Which?", "That", {}, DefaultGenerationTemplate());
  EXPECT_NE(p.find("Which?"), std::string::npos);
  EXPECT_NE(p.find("That"), std::string::npos);
  EXPECT_NE(p.find(kNoPathsMarker), std::string::npos);
  EXPECT_EQ(p.find("{"), std::string::npos);
}

TEST_F(CotTest, PathsEmbeddedInOrder) {
  std::vector<QAItem> items = MinedItems(100);
  const QAItem *two = nullptr;
  for (const QAItem &it : items) {
    if (it.paths.size() == 2) {
      two = &it;
      break;
    }
  }
  ASSERT_NE(two, nullptr);
  std::string prompt = BuildGenerationPrompt(*two, *graph_, DefaultGenerationTemplate());
  std::string first = SerializePath(two->paths[0], *graph_);
  std::string second = SerializePath(two->paths[1], *graph_);
  ASSERT_NE(first, second);
  size_t a = prompt.find(first), b = prompt.find(second);
  ASSERT_NE(a, std::string::npos);
  ASSERT_NE(b, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_EQ(Occurrences(prompt, first), 1u);
  EXPECT_NE(prompt.find(two->options[two->correct_index]), std::string::npos);
}

TEST_F(CotTest, EveryItemYieldsAPrompt) {
  std::vector<QAItem> items = MinedItems(100);
  ASSERT_GT(items.size(), 50u);
  for (const QAItem &it : items) {
    std::string p = BuildGenerationPrompt(it, *graph_, DefaultGenerationTemplate());
    EXPECT_EQ(p.find("{question}"), std::string::npos);
    EXPECT_EQ(p.find("{paths}"), std::string::npos);
    EXPECT_EQ(p.find("{answer}"), std::string::npos);
  }
}

TEST(Prompts, PruningPrompt) {
  std::string chain = "Step 1: a.\nStep 2: b.";
  std::string p = BuildPruningPrompt("Q?", chain, DefaultPruningTemplate());
  EXPECT_EQ(Occurrences(p, chain), 1u);
  for (const char *blank : {"", "  \n\t"}) {
    try {
      BuildPruningPrompt("Q?", blank, DefaultPruningTemplate());
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kTemplate);
    }
  }
  EXPECT_THROW(BuildPruningPrompt("Q?", chain, DefaultGenerationTemplate()), Error);
}

TEST(Mock, CannedResponsesByPrompt) {
  MockClient mock(MockClient::Options{.synthesize = false});
  mock.AddResponse("prompt one", "chain one");
  mock.AddResponseByHash(Sha256Hex("prompt two"), "chain two");
  EXPECT_EQ(GenerateCot(mock, "prompt one", {}), "chain one");
  EXPECT_EQ(GenerateCot(mock, "prompt two", {}), "chain two");
  try {
    GenerateCot(mock, "prompt three", {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kContent);
  }
  mock.AddResponse("blank", "   ");
  EXPECT_THROW(PruneCot(mock, "blank", {}), Error);
  testing::TempDir dir;
  testing::WriteString(dir.File("t.jsonl"),
                       "{\"prompt\": \"p\", \"response\": \"r\"}\n"
                       "{\"prompt_sha256\": \"" + Sha256Hex("q") + "\", \"response\": \"s\"}\n");
  MockClient loaded;
  loaded.LoadTable(dir.File("t.jsonl"));
  EXPECT_EQ(loaded.table_size(), 2u);
  EXPECT_EQ(loaded.Complete("p", {}), "r");
  EXPECT_EQ(loaded.Complete("q", {}), "s");
}

TEST(Mock, PruningIdentityAndLineFilter) {
  std::string chain =
      "Step 1: Dalfampridine treats multiple sclerosis.\n"
      "Additional knowledge: it blocks potassium channels.\n"
      "Therefore the answer is multiple sclerosis.";
  std::string prompt = BuildPruningPrompt("Q?", chain, DefaultPruningTemplate());
  MockClient echo(MockClient::Options{.synthesize = true, .drop_additional = false});
  EXPECT_EQ(PruneCot(echo, prompt, {}), chain);
  MockClient strip;
  std::string pruned = PruneCot(strip, prompt, {});
  // Line-filter oracle.
  std::string want;
  std::istringstream in(chain);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("Additional knowledge") != std::string::npos) continue;
    if (!want.empty()) want += "\n";
    want += line;
  }
  EXPECT_EQ(pruned, want);
}

TEST(Export, RoundTripWithNewlines) {
  testing::TempDir dir;
  EXPECT_EQ(ExportSftRecords({}, dir.File("empty.jsonl")), 0u);
  EXPECT_EQ(testing::Slurp(dir.File("empty.jsonl")), "");
  std::vector<CoTRecord> records(3);
  for (int i = 0; i < 3; ++i) {
    CoTRecord &r = records[i];
    r.item_id = "item-" + std::to_string(i);
    r.question = "Q \"quoted\" " + std::to_string(i);
    r.answer = "Aé";
    r.paths_text = "linear\t1\tx -[r]-> y";
    r.chain_raw = "line one\nline two\r\n\ttabbed";
    r.chain_pruned = "line one\nline two";
    r.provenance = {"mock", {512, 0.25}, "generation", "pruning", FixedClock(), FixedClock()};
  }
  EXPECT_EQ(ExportSftRecords(records, dir.File("r.jsonl")), 3u);
  std::string text = testing::Slurp(dir.File("r.jsonl"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  auto back = ReadSftRecords(dir.File("r.jsonl"));
  ASSERT_EQ(back.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(RecordLine(back[i]), RecordLine(records[i]));
    EXPECT_EQ(back[i].chain_raw, records[i].chain_raw);
    EXPECT_EQ(back[i].provenance.decode.temperature, 0.25);
  }
  ExportSftRecords(back, dir.File("again.jsonl"));
  EXPECT_EQ(testing::Slurp(dir.File("again.jsonl")), text);
  records[1].chain_pruned = "";
  EXPECT_THROW(ExportSftRecords(records, dir.File("bad.jsonl")), Error);
  EXPECT_FALSE(std::filesystem::exists(dir.File("bad.jsonl")));
  EXPECT_THROW(ExportSftRecords(back, dir.File("missing_dir/x.jsonl")), Error);
}

// Loopback server answering completions; the first `failures` calls get 503.
class StubServer {
 public:
  explicit StubServer(int failures) : failures_(failures) {
    server_.Post("/v1/complete", [this](const httplib::Request &req, httplib::Response &res) {
      int n = ++calls_;
      last_auth_ = req.get_header_value("Authorization");
      if (n <= failures_) {
        res.status = 503;
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      res.set_content(nlohmann::json{{"text", "echo: " + body.at("prompt").get<std::string>() +
                                                   " @" + std::to_string(body.at("max_tokens").get<int>())}}
                          .dump(),
                      "application/json");
    });
    server_.Post("/v1/teapot", [](const httplib::Request &, httplib::Response &res) {
      res.status = 418;
    });
    server_.Post("/v1/garbage", [](const httplib::Request &, httplib::Response &res) {
      res.set_content("{\"nope\": 1}", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string Url(const std::string &path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  int calls() const { return calls_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int failures_;
  std::atomic<int> calls_{0};
  std::string last_auth_;
};

TEST(Http, RoundTripsStubBody) {
  StubServer stub(0);
  ::setenv("PATHFORGE_TEST_TOKEN", "sekret", 1);
  HttpClient client({.url = stub.Url("/v1/complete"), .token_env = "PATHFORGE_TEST_TOKEN",
                     .backoff_ms = 1});
  EXPECT_EQ(GenerateCot(client, "hello\nworld", {.max_tokens = 7}), "echo: hello\nworld @7");
  EXPECT_EQ(stub.last_auth(), "Bearer sekret");
  EXPECT_EQ(PruneCot(client, "x", {}), "echo: x @1024");
}

TEST(Http, RetriesThenSucceeds) {
  StubServer stub(2);
  HttpClient client({.url = stub.Url("/v1/complete"), .max_attempts = 3, .backoff_ms = 1});
  EXPECT_EQ(client.Complete("p", {}), "echo: p @1024");
  EXPECT_EQ(stub.calls(), 3);
}

TEST(Http, GivesUpWithAttemptCount) {
  StubServer stub(100);
  HttpClient client({.url = stub.Url("/v1/complete"), .max_attempts = 3, .backoff_ms = 1});
  try {
    client.Complete("p", {});
    FAIL();
  } catch (const TransportError &e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_TRUE(e.retryable());
  }
  EXPECT_EQ(stub.calls(), 3);
}

TEST(Http, ClientErrorsAndBadReplies) {
  StubServer stub(0);
  HttpClient teapot({.url = stub.Url("/v1/teapot"), .backoff_ms = 1});
  try {
    teapot.Complete("p", {});
    FAIL();
  } catch (const TransportError &e) {
    EXPECT_EQ(e.attempts(), 1);
    EXPECT_FALSE(e.retryable());
  }
  HttpClient garbage({.url = stub.Url("/v1/garbage"), .backoff_ms = 1});
  try {
    garbage.Complete("p", {});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kContent);
  }
  EXPECT_THROW(HttpClient({.url = "ftp://x"}), Error);
  // Nothing listens on port 1.
  HttpClient refused({.url = "http://127.0.0.1:1/x", .max_attempts = 2, .backoff_ms = 1,
                      .timeout_s = 2});
  try {
    refused.Complete("p", {});
    FAIL();
  } catch (const TransportError &e) {
    EXPECT_EQ(e.attempts(), 2);
  }
}

TEST_F(CotTest, BatchIsDeterministicAcrossJobs) {
  std::vector<QAItem> items = MinedItems(3);
  MockClient mock;
  CotBatchOptions one{.jobs = 1, .clock = FixedClock};
  CotBatchOptions four{.jobs = 4, .clock = FixedClock};
  auto a = RunCotBatch(items, *graph_, DefaultGenerationTemplate(), DefaultPruningTemplate(),
                       mock, one);
  auto b = RunCotBatch(items, *graph_, DefaultGenerationTemplate(), DefaultPruningTemplate(),
                       mock, four);
  EXPECT_TRUE(a.failures.empty());
  ASSERT_EQ(a.records.size(), items.size());
  testing::TempDir dir;
  ExportSftRecords(a.records, dir.File("a.jsonl"));
  ExportSftRecords(b.records, dir.File("b.jsonl"));
  EXPECT_EQ(testing::Slurp(dir.File("a.jsonl")), testing::Slurp(dir.File("b.jsonl")));
  for (size_t i = 0; i < a.records.size(); ++i) {
    const CoTRecord &r = a.records[i];
    if (i > 0) EXPECT_LT(a.records[i - 1].item_id, r.item_id);
    EXPECT_EQ(r.provenance.client, "mock");
    EXPECT_EQ(r.provenance.decode.max_tokens, 1024);
    EXPECT_EQ(r.provenance.generation_template, "generation");
    EXPECT_FALSE(r.provenance.started_at.empty());
    EXPECT_FALSE(r.chain_pruned.empty());
    EXPECT_EQ(r.chain_pruned.find("Additional knowledge"), std::string::npos);
    EXPECT_NE(r.chain_raw.find("Additional knowledge"), std::string::npos);
  }
}

// Fails every generation call for one item id, succeeds elsewhere.
class FlakyClient : public TextGenClient {
 public:
  explicit FlakyClient(std::string poison) : poison_(std::move(poison)) {}
  std::string name() const override { return "flaky"; }
  std::string Complete(const std::string &prompt, const DecodeOptions &o) const override {
    ++calls;
    if (prompt.find(poison_) != std::string::npos) throw TransportError("down", 3, true);
    return inner_.Complete(prompt, o);
  }
  mutable std::atomic<int> calls{0};

 private:
  std::string poison_;
  MockClient inner_;
};

TEST_F(CotTest, FailuresAreIsolatedAndCheckpointResumes) {
  std::vector<QAItem> items = MinedItems(2);
  ASSERT_GE(items.size(), 4u);
  testing::TempDir dir;
  CotBatchOptions opts{.jobs = 2, .checkpoint_path = dir.File("ckpt.jsonl"), .clock = FixedClock};
  FlakyClient flaky(items[1].question);
  auto first = RunCotBatch(items, *graph_, DefaultGenerationTemplate(),
                           DefaultPruningTemplate(), flaky, opts);
  size_t poisoned = 0;
  for (const QAItem &it : items) poisoned += it.question == items[1].question;
  EXPECT_EQ(first.failures.size(), poisoned);
  EXPECT_EQ(first.failures[0].attempts, 3);
  EXPECT_EQ(first.records.size(), items.size() - poisoned);
  // A torn trailing line is ignored on resume.
  std::ofstream(dir.File("ckpt.jsonl"), std::ios::app) << "{\"item_id\": \"trunc";
  MockClient mock;
  auto second = RunCotBatch(items, *graph_, DefaultGenerationTemplate(),
                            DefaultPruningTemplate(), mock, opts);
  EXPECT_EQ(second.resumed, items.size() - poisoned);
  EXPECT_TRUE(second.failures.empty());
  ASSERT_EQ(second.records.size(), items.size());
  auto fresh = RunCotBatch(items, *graph_, DefaultGenerationTemplate(),
                           DefaultPruningTemplate(), mock, {.clock = FixedClock});
  // Resumed records keep the provenance of the client that produced them.
  for (size_t i = 0; i < items.size(); ++i) {
    const CoTRecord &r = second.records[i];
    EXPECT_EQ(r.item_id, fresh.records[i].item_id);
    EXPECT_EQ(r.chain_raw, fresh.records[i].chain_raw);
    EXPECT_EQ(r.chain_pruned, fresh.records[i].chain_pruned);
    EXPECT_EQ(r.provenance.client, r.question == items[1].question ? "mock" : "flaky");
  }
}

TEST_F(CotTest, BadTemplateStopsBeforeAnyCall) {
  std::vector<QAItem> items = MinedItems(1);
  FlakyClient client("never");
  PromptTemplate bad{"bad", PromptRole::kGeneration, "{question} only"};
  EXPECT_THROW(RunCotBatch(items, *graph_, bad, DefaultPruningTemplate(), client, {}), Error);
  EXPECT_EQ(client.calls.load(), 0);
}

TEST(Clock, Formats) {
  EXPECT_EQ(FixedClock(), "1970-01-01T00:00:00Z");
  std::string now = WallClockNow();
  ASSERT_EQ(now.size(), 20u);
  EXPECT_EQ(now[10], 'T');
  EXPECT_EQ(now.back(), 'Z');
}

}  // namespace
}  // namespace pathforge
