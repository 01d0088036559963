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

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "json.hpp"
#include "pathforge/cot.h"
#include "pathforge/errors.h"
#include "pathforge/graph.h"
#include "pathforge/grpo.h"
#include "pathforge/io.h"
#include "pathforge/linker.h"
#include "pathforge/manifest.h"
#include "pathforge/mine.h"
#include "pathforge/qa_forge.h"
#include "pathforge/reward.h"

struct pf_graph {
  pathforge::Graph graph;
};

struct pf_lexicon {
  pathforge::Lexicon lexicon;
};

struct pf_manifest {
  pathforge::RunManifest manifest;
};

namespace {

using ojson = nlohmann::ordered_json;
using pathforge::Error;
using pathforge::ErrorCode;

thread_local std::string last_error;

pf_status StatusOf(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return PF_ERR_IO;
    case ErrorCode::kSchema: return PF_ERR_SCHEMA;
    case ErrorCode::kDomain: return PF_ERR_DOMAIN;
    case ErrorCode::kLinking: return PF_ERR_LINKING;
    case ErrorCode::kInsufficient: return PF_ERR_INSUFFICIENT;
    case ErrorCode::kTemplate: return PF_ERR_TEMPLATE;
    case ErrorCode::kTransport: return PF_ERR_TRANSPORT;
    case ErrorCode::kContent: return PF_ERR_CONTENT;
    case ErrorCode::kNumericGuard: return PF_ERR_NUMERIC_GUARD;
    case ErrorCode::kInvalidInput: return PF_ERR_INVALID_INPUT;
  }
  return PF_ERR_INTERNAL;
}

// Runs fn and converts any exception into a status plus last_error.
template <class Fn>
pf_status Guard(Fn &&fn) {
  try {
    last_error.clear();
    fn();
    return PF_OK;
  } catch (const Error &e) {
    last_error = e.what();
    return StatusOf(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
  } catch (const std::exception &e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown exception";
  }
  return PF_ERR_INTERNAL;
}

pf_status NullArgument() {
  last_error = "required argument is NULL";
  return PF_ERR_NULL_ARGUMENT;
}

char *Dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

ojson Options(const char *json) {
  if (!json || !*json) return ojson::object();
  try {
    ojson j = ojson::parse(json);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidInput, "options must be a JSON object");
    return j;
  } catch (const ojson::exception &e) {
    throw Error(ErrorCode::kInvalidInput, std::string("bad options: ") + e.what());
  }
}

template <class T>
T Opt(const ojson &j, const char *key, T fallback) {
  try {
    return j.contains(key) && !j[key].is_null() ? j[key].get<T>() : fallback;
  } catch (const ojson::exception &e) {
    throw Error(ErrorCode::kInvalidInput, std::string("option ") + key + ": " + e.what());
  }
}

pathforge::MineOptions MineOptionsFrom(const ojson &j) {
  pathforge::MineOptions o;
  o.max_d = Opt(j, "max_d", o.max_d);
  std::string registry = Opt(j, "templates", std::string());
  if (!registry.empty()) o.templates = pathforge::LoadTemplateRegistry(registry);
  o.limits.max_results = Opt(j, "max_results", o.limits.max_results);
  o.limits.max_branch_length = Opt(j, "max_branch_length", o.limits.max_branch_length);
  o.limits.traverse_inverse = Opt(j, "traverse_inverse", o.limits.traverse_inverse);
  o.prune_k = Opt(j, "prune_k", o.prune_k);
  o.jobs = Opt(j, "jobs", o.jobs);
  return o;
}

}  // namespace

extern "C" {

PF_API const char *pf_version(void) { return pathforge::kToolVersion; }

PF_API const char *pf_status_name(pf_status status) {
  switch (status) {
    case PF_OK: return "ok";
    case PF_ERR_IO: return "io";
    case PF_ERR_SCHEMA: return "schema";
    case PF_ERR_DOMAIN: return "domain";
    case PF_ERR_LINKING: return "linking";
    case PF_ERR_INSUFFICIENT: return "insufficient";
    case PF_ERR_TEMPLATE: return "template";
    case PF_ERR_TRANSPORT: return "transport";
    case PF_ERR_CONTENT: return "content";
    case PF_ERR_NUMERIC_GUARD: return "numeric_guard";
    case PF_ERR_INVALID_INPUT: return "invalid_input";
    case PF_ERR_NULL_ARGUMENT: return "null_argument";
    case PF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

PF_API const char *pf_last_error(void) { return last_error.c_str(); }

PF_API void pf_string_free(char *s) { std::free(s); }

PF_API pf_status pf_graph_load(const char *path, const char *options_json,
                               pf_graph **out) {
  if (!path || !out) return NullArgument();
  *out = nullptr;
  return Guard([&] {
    ojson j = Options(options_json);
    pathforge::LoadOptions o;
    std::string delim = Opt(j, "delimiter", std::string(","));
    if (delim == "\\t" || delim == "tab") delim = "\t";
    if (delim.size() != 1) throw Error(ErrorCode::kInvalidInput, "delimiter must be one byte");
    o.delimiter = delim[0];
    o.inverse_edges = Opt(j, "inverse_edges", false);
    o.alias_table = Opt(j, "alias_table", std::string());
    *out = new pf_graph{pathforge::LoadGraph(path, o)};
  });
}

PF_API void pf_graph_free(pf_graph *graph) { delete graph; }

PF_API pf_status pf_graph_save_snapshot(const pf_graph *graph, const char *path) {
  if (!graph || !path) return NullArgument();
  return Guard([&] { pathforge::SaveSnapshot(graph->graph, path); });
}

PF_API pf_status pf_graph_stats_json(const pf_graph *graph, char **out_json) {
  if (!graph || !out_json) return NullArgument();
  return Guard([&] {
    pathforge::GraphStats s = graph->graph.Stats();
    ojson j{{"node_count", s.node_count},
            {"edge_count", s.edge_count},
            {"inverse_edges", graph->graph.inverse_edges()},
            {"nodes_per_type", s.nodes_per_type},
            {"edges_per_relation", s.edges_per_relation}};
    *out_json = Dup(j.dump(2));
  });
}

PF_API pf_status pf_lexicon_create(const pf_graph *graph, pf_lexicon **out) {
  if (!graph || !out) return NullArgument();
  *out = nullptr;
  return Guard([&] { *out = new pf_lexicon{pathforge::Lexicon::Build(graph->graph)}; });
}

PF_API void pf_lexicon_free(pf_lexicon *lexicon) { delete lexicon; }

PF_API pf_status pf_link_text_json(const pf_graph *graph, const pf_lexicon *lexicon,
                                   const char *text, char **out_json) {
  if (!graph || !lexicon || !text || !out_json) return NullArgument();
  return Guard([&] {
    ojson out = ojson::array();
    for (const auto &link : pathforge::ExtractAndMap(text, lexicon->lexicon)) {
      ojson candidates = ojson::array();
      for (pathforge::NodeId id : link.candidates) {
        const auto &n = graph->graph.node(id);
        candidates.push_back({{"key", n.key}, {"name", n.name}, {"type", n.node_type}});
      }
      out.push_back({{"surface", link.mention.surface},
                     {"start", link.mention.start},
                     {"end", link.mention.end},
                     {"candidates", std::move(candidates)}});
    }
    *out_json = Dup(out.dump(2));
  });
}

PF_API pf_status pf_mine_question(const pf_graph *graph, const pf_lexicon *lexicon,
                                  const char *question, const char *answer,
                                  const char *options_json, char **out_text) {
  if (!graph || !lexicon || !question || !answer || !out_text) return NullArgument();
  return Guard([&] {
    auto outcome = pathforge::MineQuestion(graph->graph, lexicon->lexicon, question, answer,
                                           MineOptionsFrom(Options(options_json)));
    *out_text = Dup(pathforge::MinedPathsText(outcome.paths.paths, graph->graph));
  });
}

PF_API pf_status pf_mine_corpus(const pf_graph *graph, const pf_lexicon *lexicon,
                                const char *corpus_path, const char *options_json,
                                const char *out_path, char **out_summary_json) {
  if (!graph || !lexicon || !corpus_path || !out_path || !out_summary_json) {
    return NullArgument();
  }
  return Guard([&] {
    pathforge::MineOptions o = MineOptionsFrom(Options(options_json));
    auto items = pathforge::ReadCorpus(corpus_path, graph->graph);
    std::string text;
    size_t mined = 0, paths = 0, truncated = 0;
    for (const auto &item : items) {
      auto outcome = pathforge::MineItem(graph->graph, lexicon->lexicon, item, o);
      mined += !outcome.paths.paths.empty();
      paths += outcome.paths.paths.size();
      truncated += outcome.paths.truncated;
      text += pathforge::MinedItemBlock(item, outcome, graph->graph);
    }
    pathforge::WriteFileAtomic(out_path, text);
    ojson summary{{"items", items.size()},
                  {"mined_items", mined},
                  {"paths", paths},
                  {"truncated_items", truncated}};
    *out_summary_json = Dup(summary.dump(2));
  });
}

PF_API pf_status pf_forge_qa(const pf_graph *graph, const pf_lexicon *lexicon,
                             const char *options_json, const char *out_dir,
                             char **out_stats_json) {
  if (!graph || !lexicon || !out_dir || !out_stats_json) return NullArgument();
  return Guard([&] {
    ojson j = Options(options_json);
    pathforge::ForgeOptions o;
    std::string categories = Opt(j, "categories", std::string());
    if (categories.empty()) {
      throw Error(ErrorCode::kInvalidInput, "a category plan file is required");
    }
    o.plans = pathforge::LoadCategoryPlans(categories);
    o.seed = Opt(j, "seed", uint64_t{0});
    o.ratios = Opt(j, "ratios", o.ratios);
    o.generate.max_per_head = Opt(j, "max_per_head", o.generate.max_per_head);
    o.generate.jobs = Opt(j, "jobs", 1);
    o.shortfall_tolerance = Opt(j, "shortfall_tolerance", o.shortfall_tolerance);
    o.mine = Opt(j, "mine", o.mine);
    o.attach.max_d = Opt(j, "max_d", o.attach.max_d);
    std::string registry = Opt(j, "templates", std::string());
    if (!registry.empty()) o.attach.templates = pathforge::LoadTemplateRegistry(registry);
    o.attach.prune.k = Opt(j, "prune_k", o.attach.prune.k);
    o.attach.exclude_question_edge =
        Opt(j, "exclude_question_edge", o.attach.exclude_question_edge);
    o.attach.limits.max_results = Opt(j, "max_results", o.attach.limits.max_results);
    o.attach.jobs = o.generate.jobs;
    auto result = pathforge::ForgeBenchmark(graph->graph, lexicon->lexicon, o);
    pathforge::WriteForgeOutputs(result, o, graph->graph, out_dir);
    *out_stats_json = Dup(pathforge::DatasetStatsJson(result.stats));
  });
}

PF_API pf_status pf_cot_run(const pf_graph *graph, const char *corpus_path,
                            const char *options_json, const char *out_path,
                            char **out_summary_json) {
  if (!graph || !corpus_path || !out_path || !out_summary_json) return NullArgument();
  return Guard([&] {
    using pathforge::PromptRole;
    ojson j = Options(options_json);
    std::string gen_path = Opt(j, "generation_template", std::string());
    std::string prune_path = Opt(j, "pruning_template", std::string());
    auto generation = gen_path.empty()
                          ? pathforge::DefaultGenerationTemplate()
                          : pathforge::LoadPromptTemplate(gen_path, PromptRole::kGeneration);
    auto pruning = prune_path.empty()
                       ? pathforge::DefaultPruningTemplate()
                       : pathforge::LoadPromptTemplate(prune_path, PromptRole::kPruning);

    std::unique_ptr<pathforge::TextGenClient> client;
    std::string kind = Opt(j, "client", std::string("mock"));
    if (kind == "mock") {
      auto mock = std::make_unique<pathforge::MockClient>();
      std::string table = Opt(j, "mock_table", std::string());
      if (!table.empty()) mock->LoadTable(table);
      client = std::move(mock);
    } else if (kind == "http") {
      pathforge::HttpClientConfig config;
      config.url = Opt(j, "endpoint", std::string());
      config.token_env = Opt(j, "token_env", config.token_env);
      config.max_attempts = Opt(j, "max_attempts", config.max_attempts);
      config.backoff_ms = Opt(j, "backoff_ms", config.backoff_ms);
      config.timeout_s = Opt(j, "timeout_s", config.timeout_s);
      client = std::make_unique<pathforge::HttpClient>(config);
    } else {
      throw Error(ErrorCode::kInvalidInput, "unknown client: " + kind);
    }

    pathforge::CotBatchOptions o;
    o.decode.max_tokens = Opt(j, "max_tokens", o.decode.max_tokens);
    o.decode.temperature = Opt(j, "temperature", o.decode.temperature);
    o.jobs = Opt(j, "jobs", o.jobs);
    o.checkpoint_path = Opt(j, "checkpoint", std::string());
    if (Opt(j, "fixed_clock", false)) o.clock = pathforge::FixedClock;

    auto items = pathforge::ReadCorpus(corpus_path, graph->graph);
    auto result = pathforge::RunCotBatch(items, graph->graph, generation, pruning, *client, o);
    size_t written = pathforge::ExportSftRecords(result.records, out_path);
    ojson failures = ojson::array();
    for (const auto &f : result.failures) {
      failures.push_back({{"item_id", f.item_id}, {"attempts", f.attempts},
                          {"error", f.message}});
    }
    ojson summary{{"client", client->name()},
                  {"items", items.size()},
                  {"written", written},
                  {"resumed", result.resumed},
                  {"failed", result.failures.size()},
                  {"failures", std::move(failures)}};
    *out_summary_json = Dup(summary.dump(2));
  });
}

PF_API pf_status pf_score_files(const char *responses_path, const char *gold_path,
                                const char *mode, char **out_report_json) {
  if (!responses_path || !gold_path || !out_report_json) return NullArgument();
  return Guard([&] {
    pathforge::AnswerMatch match = pathforge::AnswerMatch::kLetter;
    std::string m = mode ? mode : "letter";
    if (m == "name") {
      match = pathforge::AnswerMatch::kName;
    } else if (m != "letter" && !m.empty()) {
      throw Error(ErrorCode::kInvalidInput, "unknown match mode: " + m);
    }
    auto report = pathforge::ScoreFiles(responses_path, gold_path, match);
    *out_report_json = Dup(pathforge::ScoreReportJson(report));
  });
}

PF_API pf_status pf_grpo_eval_file(const char *groups_path, const char *options_json,
                                   char **out_report_json) {
  if (!groups_path || !out_report_json) return NullArgument();
  return Guard([&] {
    ojson j = Options(options_json);
    pathforge::GrpoConfig config;
    config.epsilon = Opt(j, "epsilon", config.epsilon);
    config.beta = Opt(j, "beta", config.beta);
    config.std_floor = Opt(j, "std_floor", config.std_floor);
    auto reports =
        pathforge::EvaluateGroupsFile(groups_path, config, Opt(j, "gradient_check", false));
    *out_report_json = Dup(pathforge::GroupReportsJson(reports));
  });
}

PF_API pf_status pf_manifest_create(const char *config_text, pf_manifest **out) {
  if (!config_text || !out) return NullArgument();
  *out = nullptr;
  return Guard([&] { *out = new pf_manifest{pathforge::RunManifest(config_text)}; });
}

PF_API void pf_manifest_free(pf_manifest *manifest) { delete manifest; }

PF_API pf_status pf_manifest_set_field(pf_manifest *manifest, const char *key,
                                       const char *json_value) {
  if (!manifest || !key || !json_value) return NullArgument();
  return Guard([&] { manifest->manifest.SetField(key, json_value); });
}

PF_API pf_status pf_manifest_add_stage(pf_manifest *manifest, const char *name,
                                       const char *const *inputs, size_t n_inputs,
                                       const char *const *outputs, size_t n_outputs,
                                       double wall_seconds) {
  if (!manifest || !name || (n_inputs && !inputs) || (n_outputs && !outputs)) {
    return NullArgument();
  }
  return Guard([&] {
    std::vector<std::string> in(inputs, inputs + n_inputs);
    std::vector<std::string> out(outputs, outputs + n_outputs);
    manifest->manifest.AddStage(name, in, out, wall_seconds);
  });
}

PF_API pf_status pf_manifest_write(const pf_manifest *manifest, const char *path) {
  if (!manifest || !path) return NullArgument();
  return Guard([&] { manifest->manifest.Write(path); });
}

PF_API pf_status pf_manifest_config_hash(const pf_manifest *manifest, char **out_hex) {
  if (!manifest || !out_hex) return NullArgument();
  return Guard([&] { *out_hex = Dup(manifest->manifest.config_hash()); });
}

PF_API pf_status pf_manifest_verify(const char *path, char **out_report_json) {
  if (!path || !out_report_json) return NullArgument();
  bool clean = true;
  pf_status status = Guard([&] {
    auto mismatches = pathforge::VerifyManifest(path);
    ojson report = ojson::array();
    for (const auto &m : mismatches) {
      report.push_back({{"path", m.path}, {"expected", m.expected}, {"actual", m.actual}});
    }
    clean = mismatches.empty();
    *out_report_json = Dup(report.dump(2));
  });
  if (status == PF_OK && !clean) {
    last_error = "manifest digests do not match";
    return PF_ERR_IO;
  }
  return status;
}

PF_API pf_status pf_sha256_file(const char *path, char **out_hex) {
  if (!path || !out_hex) return NullArgument();
  return Guard([&] { *out_hex = Dup(pathforge::Sha256File(path)); });
}

}  // extern "C"
