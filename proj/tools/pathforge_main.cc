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

// pathforge: command-line front end over the C API.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pathforge/pathforge.h"

namespace {

using ojson = nlohmann::ordered_json;

// Stable exit code contract.
enum Exit : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitSchema = 2,
  kExitLinking = 3,
  kExitGeneration = 4,
  kExitCot = 5,
  kExitScoring = 6,
  kExitGrpo = 7,
};

struct Settings {
  std::string config_text;
  uint64_t seed = 0;
  int jobs = 1;
  int max_d = 8;
  std::string client = "mock";
  std::string out = "pathforge_out";
  std::string graph;
  std::string aliases;
  std::string delimiter = ",";
  bool inverse = false;
  std::string templates;
  std::string endpoint;

  std::string question;
  std::string answer;
  // Per subcommand, so a config file can set each one independently.
  std::string mine_corpus;
  std::string cot_corpus;
  size_t mine_prune_k = 0;
  size_t gen_prune_k = 0;
  size_t mine_max_results = 100000;
  size_t gen_max_results = 100000;

  std::string categories;
  // sft:rl:test weights, normalized by their sum.
  std::vector<double> ratios{3500, 1500, 1710};
  size_t max_per_head = 0;
  double tolerance = 0.25;
  bool no_mine = false;
  bool exclude_question_edge = false;

  std::string generation_template;
  std::string pruning_template;
  std::string mock_table;
  int max_tokens = 1024;
  double temperature = 0.0;
  int max_attempts = 3;
  int backoff_ms = 250;
  int timeout_s = 60;
  std::string checkpoint;

  std::string responses;
  std::string gold;
  std::string match = "letter";

  std::string groups;
  double epsilon = 0.2;
  double beta = 0.04;
  double std_floor = 1e-8;
  bool grad_check = false;
};

class Failure {
 public:
  Failure(int code, std::string message) : code(code), message(std::move(message)) {}
  int code;
  std::string message;
};

void Log(const std::string &line) { std::cerr << "pathforge: " << line << "\n"; }

std::string Take(char *s) {
  std::string out = s ? s : "";
  pf_string_free(s);
  return out;
}

// Throws Failure with `code` unless status is PF_OK.
void Check(pf_status status, int code, const std::string &what) {
  if (status == PF_OK) return;
  throw Failure(code, what + ": " + pf_last_error() + " [" + pf_status_name(status) + "]");
}

std::string OutPath(const Settings &s, const std::string &name) {
  return (std::filesystem::path(s.out) / name).string();
}

class Handles {
 public:
  ~Handles() {
    pf_lexicon_free(lexicon);
    pf_graph_free(graph);
  }
  pf_graph *graph = nullptr;
  pf_lexicon *lexicon = nullptr;
};

void LoadGraph(const Settings &s, Handles *h, bool with_lexicon) {
  if (s.graph.empty()) throw Failure(kExitSchema, "no --graph given");
  ojson options{{"delimiter", s.delimiter},
                {"inverse_edges", s.inverse},
                {"alias_table", s.aliases}};
  // A graph that cannot be read or parsed is an input-schema failure for
  // every subcommand.
  Check(pf_graph_load(s.graph.c_str(), options.dump().c_str(), &h->graph), kExitSchema,
        "loading " + s.graph);
  if (with_lexicon) Check(pf_lexicon_create(h->graph, &h->lexicon), kExitOther, "lexicon");
}

struct StageFiles {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

std::vector<std::string> Existing(const std::vector<std::string> &paths) {
  std::vector<std::string> out;
  for (const auto &p : paths) {
    if (!p.empty() && std::filesystem::exists(p)) out.push_back(p);
  }
  return out;
}

void WriteManifest(const Settings &s, const std::string &command, const StageFiles &files,
                   double seconds) {
  pf_manifest *m = nullptr;
  Check(pf_manifest_create(s.config_text.c_str(), &m), kExitOther, "manifest");
  std::unique_ptr<pf_manifest, void (*)(pf_manifest *)> guard(m, pf_manifest_free);
  ojson fields{{"command", command}, {"seed", s.seed}, {"jobs", s.jobs},
               {"config", s.config_text}};
  for (const auto &[key, value] : fields.items()) {
    Check(pf_manifest_set_field(m, key.c_str(), value.dump().c_str()), kExitOther, "manifest");
  }
  std::vector<std::string> in = Existing(files.inputs);
  std::vector<std::string> out = Existing(files.outputs);
  std::vector<const char *> in_c, out_c;
  for (const auto &p : in) in_c.push_back(p.c_str());
  for (const auto &p : out) out_c.push_back(p.c_str());
  Check(pf_manifest_add_stage(m, command.c_str(), in_c.data(), in_c.size(), out_c.data(),
                              out_c.size(), seconds),
        kExitOther, "manifest");
  Check(pf_manifest_write(m, OutPath(s, "run_manifest.json").c_str()), kExitOther,
        "manifest");
}

void WriteText(const std::string &path, const std::string &text) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::string tmp = path + ".tmp";
  std::FILE *f = std::fopen(tmp.c_str(), "wb");
  bool ok = f && std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (f) ok = std::fclose(f) == 0 && ok;
  if (!ok || std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Failure(kExitOther, "cannot write " + path);
  }
}

StageFiles KgStats(const Settings &s) {
  Handles h;
  LoadGraph(s, &h, false);
  char *json = nullptr;
  Check(pf_graph_stats_json(h.graph, &json), kExitOther, "stats");
  std::string report = Take(json);
  std::cout << report << "\n";
  std::string out = OutPath(s, "kg_stats.json");
  WriteText(out, report + "\n");
  return {{s.graph, s.aliases}, {out}};
}

ojson MiningOptions(const Settings &s) {
  return {{"max_d", s.max_d},
          {"templates", s.templates},
          {"max_results", s.mine_max_results},
          {"traverse_inverse", s.inverse},
          {"prune_k", s.mine_prune_k},
          {"jobs", s.jobs}};
}

StageFiles Mine(const Settings &s) {
  Handles h;
  LoadGraph(s, &h, true);
  std::string options = MiningOptions(s).dump();
  std::string out = OutPath(s, "paths.txt");
  std::filesystem::create_directories(s.out);
  if (!s.mine_corpus.empty()) {
    char *summary = nullptr;
    pf_status st = pf_mine_corpus(h.graph, h.lexicon, s.mine_corpus.c_str(), options.c_str(),
                                  out.c_str(), &summary);
    Check(st, st == PF_ERR_SCHEMA ? kExitSchema : kExitOther, "mining " + s.mine_corpus);
    std::cout << Take(summary) << "\n";
    return {{s.graph, s.aliases, s.templates, s.mine_corpus}, {out}};
  }
  if (s.question.empty() || s.answer.empty()) {
    throw Failure(kExitOther, "mine needs --corpus or both --question and --answer");
  }
  char *text = nullptr;
  pf_status st = pf_mine_question(h.graph, h.lexicon, s.question.c_str(), s.answer.c_str(),
                                  options.c_str(), &text);
  Check(st, st == PF_ERR_LINKING ? kExitLinking : kExitOther, "mining");
  std::string paths = Take(text);
  std::cout << paths;
  WriteText(out, paths);
  return {{s.graph, s.aliases, s.templates}, {out}};
}

StageFiles GenQa(const Settings &s) {
  Handles h;
  LoadGraph(s, &h, true);
  ojson options{{"categories", s.categories},
                {"seed", s.seed},
                {"max_per_head", s.max_per_head},
                {"shortfall_tolerance", s.tolerance},
                {"mine", !s.no_mine},
                {"exclude_question_edge", s.exclude_question_edge},
                {"max_d", s.max_d},
                {"templates", s.templates},
                {"max_results", s.gen_max_results},
                {"jobs", s.jobs}};
  if (s.gen_prune_k > 0) options["prune_k"] = s.gen_prune_k;
  double weight_sum = 0;
  for (double w : s.ratios) {
    if (!(w >= 0)) throw Failure(kExitGeneration, "--ratios weights must be non-negative");
    weight_sum += w;
  }
  if (s.ratios.size() != 3 || !(weight_sum > 0)) {
    throw Failure(kExitGeneration, "--ratios takes 3 weights with a positive sum");
  }
  std::vector<double> ratios;
  for (double w : s.ratios) ratios.push_back(w / weight_sum);
  options["ratios"] = ratios;
  char *stats = nullptr;
  pf_status st = pf_forge_qa(h.graph, h.lexicon, options.dump().c_str(), s.out.c_str(), &stats);
  int code = kExitGeneration;
  if (st == PF_ERR_SCHEMA) code = kExitSchema;
  if (st == PF_ERR_IO) code = kExitOther;
  Check(st, code, "gen-qa");
  std::cout << Take(stats) << "\n";
  StageFiles files{{s.graph, s.aliases, s.categories, s.templates}, {}};
  for (const char *name : {"corpus.jsonl", "sft.jsonl", "rl.jsonl", "test.jsonl", "stats.json",
                           "forge_manifest.json"}) {
    files.outputs.push_back(OutPath(s, name));
  }
  return files;
}

StageFiles Cot(const Settings &s) {
  Handles h;
  LoadGraph(s, &h, false);
  if (s.cot_corpus.empty()) throw Failure(kExitCot, "cot needs --corpus");
  ojson options{{"client", s.client},
                {"endpoint", s.endpoint},
                {"generation_template", s.generation_template},
                {"pruning_template", s.pruning_template},
                {"mock_table", s.mock_table},
                {"max_tokens", s.max_tokens},
                {"temperature", s.temperature},
                {"max_attempts", s.max_attempts},
                {"backoff_ms", s.backoff_ms},
                {"timeout_s", s.timeout_s},
                {"jobs", s.jobs},
                {"checkpoint", s.checkpoint},
                {"fixed_clock", s.client == "mock"}};
  std::filesystem::create_directories(s.out);
  std::string out = OutPath(s, "cot_records.jsonl");
  char *summary = nullptr;
  pf_status st = pf_cot_run(h.graph, s.cot_corpus.c_str(), options.dump().c_str(), out.c_str(),
                            &summary);
  Check(st, st == PF_ERR_SCHEMA ? kExitSchema : kExitCot, "cot");
  std::string text = Take(summary);
  std::cout << text << "\n";
  StageFiles files{{s.graph, s.aliases, s.cot_corpus, s.generation_template, s.pruning_template,
                    s.mock_table},
                   {out}};
  size_t failed = ojson::parse(text).value("failed", size_t{0});
  if (failed > 0) {
    WriteManifest(s, "cot", files, 0);
    throw Failure(kExitCot, std::to_string(failed) + " record(s) failed");
  }
  return files;
}

StageFiles Score(const Settings &s) {
  char *report = nullptr;
  Check(pf_score_files(s.responses.c_str(), s.gold.c_str(), s.match.c_str(), &report),
        kExitScoring, "score");
  std::string text = Take(report);
  std::cout << text << "\n";
  std::string out = OutPath(s, "score_report.json");
  WriteText(out, text + "\n");
  return {{s.responses, s.gold}, {out}};
}

StageFiles GrpoEval(const Settings &s) {
  ojson options{{"epsilon", s.epsilon},
                {"beta", s.beta},
                {"std_floor", s.std_floor},
                {"gradient_check", s.grad_check}};
  char *report = nullptr;
  Check(pf_grpo_eval_file(s.groups.c_str(), options.dump().c_str(), &report), kExitGrpo,
        "grpo-eval");
  std::string text = Take(report);
  std::cout << text << "\n";
  std::string out = OutPath(s, "grpo_report.json");
  WriteText(out, text + "\n");
  return {{s.groups}, {out}};
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Knowledge-graph reasoning path mining and CoT/GRPO data tooling"};
  app.set_config("--config", "", "INI config file; flags override its values");
  app.set_version_flag("--version", pf_version());
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  Settings s;
  app.add_option("--seed", s.seed, "64-bit seed for every random choice");
  app.add_option("--jobs", s.jobs, "worker cap")->check(CLI::PositiveNumber);
  app.add_option("--max-d", s.max_d, "largest path complexity")->check(CLI::Range(1, 64));
  app.add_option("--client", s.client, "text generation client")
      ->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--out", s.out, "output directory");
  app.add_option("--graph", s.graph, "edge table or snapshot");
  app.add_option("--aliases", s.aliases, "alias table (alias,canonical)");
  app.add_option("--delimiter", s.delimiter, "field delimiter of the edge table");
  app.add_flag("--inverse", s.inverse, "traverse edges backwards under inv: labels");
  app.add_option("--templates", s.templates, "path template registry");
  app.add_option("--endpoint", s.endpoint, "HTTP completion endpoint");

  std::map<std::string, std::function<StageFiles(const Settings &)>> handlers;

  auto *kg = app.add_subcommand("kg-stats", "graph statistics");
  handlers["kg-stats"] = KgStats;

  auto *mine = app.add_subcommand("mine", "mine reasoning paths");
  mine->add_option("--question", s.question, "question text");
  mine->add_option("--answer", s.answer, "answer text");
  mine->add_option("--corpus", s.mine_corpus, "QA corpus (JSONL) to mine item by item");
  mine->add_option("--prune-k", s.mine_prune_k, "keep the k simplest paths (0 keeps all)");
  mine->add_option("--max-results", s.mine_max_results, "per-template result cap");
  handlers["mine"] = Mine;

  auto *gen = app.add_subcommand("gen-qa", "generate the multiple-choice benchmark");
  gen->add_option("--categories", s.categories, "category plan (JSON)")->required();
  gen->add_option("--ratios", s.ratios, "sft rl test weights")->expected(3);
  gen->add_option("--max-per-head", s.max_per_head, "items per head (0 = no cap)");
  gen->add_option("--tolerance", s.tolerance, "allowed missing fraction per category");
  gen->add_flag("--no-mine", s.no_mine, "skip path mining");
  gen->add_flag("--exclude-question-edge", s.exclude_question_edge,
                "drop the one-edge path that restates the question");
  gen->add_option("--prune-k", s.gen_prune_k, "paths kept per item");
  gen->add_option("--max-results", s.gen_max_results, "per-template result cap");
  handlers["gen-qa"] = GenQa;

  auto *cot = app.add_subcommand("cot", "generate and prune reasoning chains");
  cot->add_option("--corpus", s.cot_corpus, "QA corpus (JSONL)")->required();
  cot->add_option("--generation-template", s.generation_template, "generation prompt file");
  cot->add_option("--pruning-template", s.pruning_template, "pruning prompt file");
  cot->add_option("--mock-table", s.mock_table, "canned responses for the mock client");
  cot->add_option("--max-tokens", s.max_tokens, "completion length cap");
  cot->add_option("--temperature", s.temperature, "sampling temperature");
  cot->add_option("--max-attempts", s.max_attempts, "HTTP attempts per call")
      ->check(CLI::PositiveNumber);
  cot->add_option("--backoff-ms", s.backoff_ms, "first retry delay, doubled per retry")
      ->check(CLI::NonNegativeNumber);
  cot->add_option("--timeout", s.timeout_s, "HTTP timeout in seconds")
      ->check(CLI::PositiveNumber);
  cot->add_option("--checkpoint", s.checkpoint, "per-record progress file");
  handlers["cot"] = Cot;

  auto *score = app.add_subcommand("score", "reward and accuracy of responses");
  score->add_option("--responses", s.responses, "responses (JSONL)")->required();
  score->add_option("--gold", s.gold, "gold answers (JSONL)")->required();
  score->add_option("--match", s.match, "answer matching")
      ->check(CLI::IsMember({"letter", "name"}));
  handlers["score"] = Score;

  auto *grpo = app.add_subcommand("grpo-eval", "evaluate GRPO objective terms");
  grpo->add_option("--groups", s.groups, "groups (JSONL)")->required();
  grpo->add_option("--epsilon", s.epsilon, "clip threshold");
  grpo->add_option("--beta", s.beta, "KL weight");
  grpo->add_option("--std-floor", s.std_floor, "advantage std floor");
  grpo->add_flag("--grad-check", s.grad_check, "finite-difference gradient check");
  handlers["grpo-eval"] = GrpoEval;
  (void)kg;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitOther;
  }

  CLI::App *sub = app.get_subcommands().front();
  s.config_text = app.config_to_str(true, false);
  auto start = std::chrono::steady_clock::now();
  try {
    StageFiles files = handlers.at(sub->get_name())(s);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    WriteManifest(s, sub->get_name(), files, seconds);
    return kExitOk;
  } catch (const Failure &f) {
    Log(f.message);
    return f.code;
  } catch (const std::exception &e) {
    Log(e.what());
    return kExitOther;
  }
}
