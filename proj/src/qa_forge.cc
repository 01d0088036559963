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

#include "pathforge/qa_forge.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "parallel.h"
#include "pathforge/errors.h"
#include "pathforge/io.h"
#include "pathforge/rng.h"

namespace pathforge {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kHeadPlaceholder = "{head}";

std::string Dump(const ojson &j) {
  return j.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

// Same-type pool computation shared by DistractorPool and GenerateQa.
std::vector<NodeId> PoolFrom(const Graph &graph, std::span<const NodeId> typed,
                             NodeId head, RelationId relation, NodeId answer) {
  std::unordered_set<std::string> blocked;
  blocked.insert(graph.node(answer).name);
  for (NodeId t : graph.OutIndex(head, relation)) blocked.insert(graph.node(t).name);
  std::vector<NodeId> pool;
  for (NodeId n : typed) {
    if (n == head || n == answer) continue;
    // Inserting into `blocked` also dedups pool members by name.
    if (!blocked.insert(graph.node(n).name).second) continue;
    pool.push_back(n);
  }
  return pool;
}

std::vector<NodeId> NodesOfType(const Graph &graph, std::string_view type) {
  std::vector<NodeId> out;
  for (const Node &n : graph.nodes()) {
    if (n.node_type == type) out.push_back(n.id);
  }
  return out;
}

std::array<NodeId, 3> DrawThree(std::vector<NodeId> pool, std::mt19937_64 &rng) {
  std::array<NodeId, 3> out;
  for (size_t i = 0; i < 3; ++i) {
    size_t j = i + UniformBelow(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

std::string TripleText(const Graph &graph, NodeId head, std::string_view relation,
                       NodeId answer) {
  return "(" + graph.node(head).name + ", " + std::string(relation) + ", " +
         graph.node(answer).name + ")";
}

ojson PathRef(const ReasoningPath &path, const Graph &graph) {
  ojson branches = ojson::array();
  for (const Branch &b : path.branches) {
    ojson steps = ojson::array();
    for (const Step &s : b.steps) {
      steps.push_back({graph.RelationLabel(s.relation), graph.node(s.node).key});
    }
    branches.push_back(std::move(steps));
  }
  return ojson{{"kind", TemplateKindName(path.kind)},
               {"anchor", graph.node(path.anchor).key},
               {"terminal", graph.node(path.terminal).key},
               {"branches", std::move(branches)}};
}

NodeId ResolveKey(const Graph &graph, const std::string &key) {
  auto id = graph.FindByKey(key);
  if (!id) throw Error(ErrorCode::kSchema, "unknown node key " + key);
  return *id;
}

ReasoningPath PathFromRef(const ojson &j, const Graph &graph) {
  ReasoningPath path;
  auto kind = ParseTemplateKind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::kSchema, "unknown path kind");
  path.kind = *kind;
  path.anchor = ResolveKey(graph, j.at("anchor").get<std::string>());
  path.terminal = ResolveKey(graph, j.at("terminal").get<std::string>());
  for (const auto &steps : j.at("branches")) {
    Branch b;
    for (const auto &s : steps) {
      auto ref = graph.FindRelationRef(s.at(0).get<std::string>());
      if (!ref) throw Error(ErrorCode::kSchema, "unknown relation in path");
      b.steps.push_back({*ref, ResolveKey(graph, s.at(1).get<std::string>())});
    }
    path.branches.push_back(std::move(b));
  }
  path.complexity = Complexity(path);
  return path;
}

std::optional<Split> ParseSplit(std::string_view name) {
  for (Split s : {Split::kNone, Split::kSft, Split::kRl, Split::kTest}) {
    if (name == SplitName(s)) return s;
  }
  return std::nullopt;
}

}  // namespace

const char *TaskCategoryName(TaskCategory category) {
  switch (category) {
    case TaskCategory::kIndication: return "Indication";
    case TaskCategory::kBioprocess: return "Bioprocess";
    case TaskCategory::kOffLabelUse: return "OffLabelUse";
    case TaskCategory::kDiseaseProtein: return "DiseaseProtein";
    case TaskCategory::kSideEffect: return "SideEffect";
    case TaskCategory::kContraindication: return "Contraindication";
    case TaskCategory::kDrugDrugInteraction: return "DrugDrugInteraction";
  }
  return "?";
}

std::optional<TaskCategory> ParseTaskCategory(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(TaskCategory::kDrugDrugInteraction); ++i) {
    auto c = static_cast<TaskCategory>(i);
    if (name == TaskCategoryName(c)) return c;
  }
  return std::nullopt;
}

const char *SplitName(Split split) {
  switch (split) {
    case Split::kNone: return "none";
    case Split::kSft: return "sft";
    case Split::kRl: return "rl";
    case Split::kTest: return "test";
  }
  return "?";
}

void CheckCategorySpec(const CategorySpec &spec) {
  const std::string &t = spec.question_template;
  size_t first = t.find(kHeadPlaceholder);
  if (first == std::string::npos ||
      t.find(kHeadPlaceholder, first + 1) != std::string::npos) {
    throw Error(ErrorCode::kDomain,
                std::string("question template for ") + TaskCategoryName(spec.name) +
                    " must contain exactly one {head}");
  }
}

std::vector<CategorySpec> DefaultCategorySpecs() {
  using D = DifficultyLevel;
  using C = TaskCategory;
  return {
      {C::kIndication, "drug", "indication", "disease",
       "Which disease can be treated with {head}?", D::kBasic},
      {C::kBioprocess, "gene/protein", "bioprocess_protein", "biological_process",
       "Which biological process is associated with {head}?", D::kBasic},
      {C::kOffLabelUse, "disease", "off-label use", "drug",
       "Which drug is used Off-label for {head}?", D::kMedium},
      {C::kDiseaseProtein, "disease", "disease_protein", "gene/protein",
       "Which protein is associated with {head}?", D::kMedium},
      {C::kSideEffect, "drug", "drug_effect", "effect/phenotype",
       "What is a known side effect of {head}?", D::kMedium},
      {C::kContraindication, "drug", "contraindication", "disease",
       "Which disease is contraindication for {head}?", D::kHard},
      {C::kDrugDrugInteraction, "drug", "drug_drug", "drug",
       "Which drug has a drug drug interaction with {head}?", D::kHard},
  };
}

std::string CategorySpecJson(const CategorySpec &spec) {
  return Dump(ojson{{"category", TaskCategoryName(spec.name)},
                    {"head_type", spec.head_type},
                    {"relation", spec.relation},
                    {"answer_type", spec.answer_type},
                    {"question_template", spec.question_template},
                    {"difficulty_hint", DifficultyName(spec.difficulty_hint)}});
}

std::vector<CategoryPlan> LoadCategoryPlans(const std::string &path) {
  std::vector<CategoryPlan> plans;
  try {
    ojson doc = ojson::parse(ReadFile(path));
    for (const auto &entry : doc) {
      CategoryPlan plan;
      auto category = ParseTaskCategory(entry.at("category").get<std::string>());
      auto hint = ParseDifficulty(entry.at("difficulty_hint").get<std::string>());
      if (!category || !hint) {
        throw Error(ErrorCode::kSchema, path + ": bad category or difficulty_hint");
      }
      plan.spec.name = *category;
      plan.spec.difficulty_hint = *hint;
      plan.spec.head_type = entry.at("head_type").get<std::string>();
      plan.spec.relation = entry.at("relation").get<std::string>();
      plan.spec.answer_type = entry.at("answer_type").get<std::string>();
      plan.spec.question_template = entry.at("question_template").get<std::string>();
      plan.count = entry.value("count", size_t{0});
      CheckCategorySpec(plan.spec);
      plans.push_back(std::move(plan));
    }
  } catch (const ojson::exception &e) {
    throw Error(ErrorCode::kSchema, path + ": " + e.what());
  }
  return plans;
}

std::vector<NodeId> DistractorPool(const Graph &graph, NodeId head,
                                   RelationId relation, NodeId answer) {
  graph.node(head);
  std::vector<NodeId> typed = NodesOfType(graph, graph.node(answer).node_type);
  return PoolFrom(graph, typed, head, relation, answer);
}

std::array<NodeId, 3> SampleDistractors(const Graph &graph, NodeId head,
                                        std::string_view relation,
                                        NodeId answer, uint64_t seed) {
  auto rel = graph.FindRelation(relation);
  if (!rel) {
    throw Error(ErrorCode::kDomain, "unknown relation: " + std::string(relation));
  }
  std::vector<NodeId> pool = DistractorPool(graph, head, *rel, answer);
  if (pool.size() < 3) {
    throw Error(ErrorCode::kInsufficient,
                "only " + std::to_string(pool.size()) +
                    " distractor(s) available for " +
                    TripleText(graph, head, relation, answer));
  }
  std::mt19937_64 rng(seed);
  return DrawThree(std::move(pool), rng);
}

GenerateResult GenerateQa(const Graph &graph, const CategorySpec &spec,
                          size_t count, uint64_t seed,
                          const GenerateOptions &options) {
  CheckCategorySpec(spec);
  auto relation = graph.FindRelation(spec.relation);
  if (!relation) {
    throw Error(ErrorCode::kDomain, "relation not in graph: " + spec.relation);
  }
  struct HeadPlan {
    NodeId head;
    std::vector<NodeId> tails;
    std::vector<NodeId> pool;
  };
  std::vector<NodeId> answers_typed = NodesOfType(graph, spec.answer_type);
  std::vector<HeadPlan> plans;
  GenerateResult result;
  for (NodeId head : NodesOfType(graph, spec.head_type)) {
    HeadPlan plan{head, {}, {}};
    for (NodeId t : graph.OutIndex(head, *relation)) {
      if (graph.node(t).node_type == spec.answer_type) plan.tails.push_back(t);
    }
    if (plan.tails.empty()) continue;
    // Every tail is blocked by name, so the pool is the same for all tails.
    plan.pool = PoolFrom(graph, answers_typed, head, *relation, plan.tails.front());
    if (plan.pool.size() < 3) continue;
    result.eligible += plan.tails.size();
    plans.push_back(std::move(plan));
  }

  std::mt19937_64 head_rng(seed);
  Shuffle(&plans, head_rng);

  struct Selected {
    const HeadPlan *plan;
    uint64_t head_seed;
    std::vector<NodeId> tails;
  };
  std::vector<Selected> selected;
  size_t total = 0;
  for (const HeadPlan &plan : plans) {
    if (total >= count) break;
    uint64_t head_seed = DeriveSeed(seed, plan.head.value);
    std::vector<NodeId> tails = plan.tails;
    std::mt19937_64 tail_rng(head_seed);
    Shuffle(&tails, tail_rng);
    size_t take = std::min(tails.size(), count - total);
    if (options.max_per_head > 0) take = std::min(take, options.max_per_head);
    tails.resize(take);
    total += take;
    selected.push_back({&plan, head_seed, std::move(tails)});
  }

  // Output follows head id order whatever order the heads were drawn in.
  std::sort(selected.begin(), selected.end(), [](const Selected &a, const Selected &b) {
    return a.plan->head < b.plan->head;
  });
  std::vector<std::vector<QAItem>> per_head(selected.size());
  ParallelFor(selected.size(), options.jobs, [&](size_t i, int) {
    const Selected &sel = selected[i];
    const Node &head = graph.node(sel.plan->head);
    std::string question = spec.question_template;
    question.replace(question.find(kHeadPlaceholder), kHeadPlaceholder.size(), head.name);
    for (NodeId tail : sel.tails) {
      std::mt19937_64 rng(DeriveSeed(sel.head_seed, tail.value));
      std::array<NodeId, 3> distractors = DrawThree(sel.plan->pool, rng);
      QAItem item;
      item.id = std::string(TaskCategoryName(spec.name)) + "-" + head.key + "-" +
                graph.node(tail).key;
      item.question = question;
      item.correct_index = static_cast<int>(UniformBelow(rng, 4));
      for (int k = 0, d = 0; k < 4; ++k) {
        item.options[k] = k == item.correct_index ? graph.node(tail).name
                                                  : graph.node(distractors[d++]).name;
      }
      item.head = head.id;
      item.relation = spec.relation;
      item.answer = tail;
      item.category = spec.name;
      item.difficulty = spec.difficulty_hint;
      per_head[i].push_back(std::move(item));
    }
  });
  for (auto &items : per_head) {
    std::move(items.begin(), items.end(), std::back_inserter(result.items));
  }
  result.shortfall = result.items.size() < count;
  return result;
}

std::array<double, 3> ReferenceSplitRatios() {
  return {3500.0 / 6710.0, 1500.0 / 6710.0, 1710.0 / 6710.0};
}

DatasetSplit SplitByHead(std::vector<QAItem> items,
                         const std::array<double, 3> &ratios, uint64_t seed) {
  double sum = 0;
  for (double r : ratios) {
    if (!(r >= 0)) throw Error(ErrorCode::kDomain, "split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kDomain, "split ratios must sum to 1");
  }
  std::map<NodeId, size_t> group_size;
  for (const QAItem &item : items) ++group_size[item.head];
  std::vector<NodeId> heads;
  for (const auto &[head, size] : group_size) heads.push_back(head);
  std::mt19937_64 rng(seed);
  Shuffle(&heads, rng);

  const double n = static_cast<double>(items.size());
  std::array<double, 3> filled{0, 0, 0};
  std::unordered_map<NodeId, Split> assignment;
  for (NodeId head : heads) {
    int best = 0;
    double best_deficit = ratios[0] * n - filled[0];
    for (int s = 1; s < 3; ++s) {
      double deficit = ratios[s] * n - filled[s];
      if (deficit > best_deficit) {
        best = s;
        best_deficit = deficit;
      }
    }
    filled[best] += static_cast<double>(group_size[head]);
    assignment[head] = static_cast<Split>(best + 1);
  }

  DatasetSplit split;
  for (QAItem &item : items) {
    item.split = assignment[item.head];
    switch (item.split) {
      case Split::kSft: split.sft.push_back(std::move(item)); break;
      case Split::kRl: split.rl.push_back(std::move(item)); break;
      default: split.test.push_back(std::move(item)); break;
    }
  }
  return split;
}

void AttachPathsAndDifficulty(std::vector<QAItem> *items, const Graph &graph,
                              const Lexicon &lexicon,
                              std::span<const CategorySpec> specs,
                              const AttachOptions &options) {
  std::vector<PathTemplate> templates =
      options.templates.empty() ? DefaultTemplates(options.max_d) : options.templates;
  ParallelFor(items->size(), options.jobs, [&](size_t i, int) {
    QAItem &item = (*items)[i];
    std::vector<NodeId> q_nodes = CandidateUnion(ExtractAndMap(item.question, lexicon));
    if (q_nodes.empty()) q_nodes.push_back(item.head);
    std::vector<NodeId> a_nodes =
        MapAnswerOptions(item.options, lexicon)[item.correct_index];
    if (a_nodes.empty()) a_nodes.push_back(item.answer);

    PathSet found = EnumeratePaths(graph, q_nodes, a_nodes, templates, options.max_d,
                                   options.limits, 1);
    if (options.exclude_question_edge) {
      auto rel = graph.FindRelation(item.relation);
      std::erase_if(found.paths, [&](const ReasoningPath &p) {
        return rel && p.kind == TemplateKind::kLinear && p.anchor == item.head &&
               p.branches[0].steps.size() == 1 &&
               p.branches[0].steps[0] == Step{RelationRef{*rel, false}, item.answer};
      });
    }
    item.paths = PrunePaths(std::move(found.paths), options.prune);
    if (item.paths.empty()) {
      item.unmined = true;
      for (const CategorySpec &spec : specs) {
        if (spec.name == item.category) item.difficulty = spec.difficulty_hint;
      }
    } else {
      item.unmined = false;
      item.difficulty = ClassifyDifficulty(item.paths.front().complexity);
    }
  });
}

DatasetStats ComputeDatasetStats(std::span<const QAItem> items) {
  DatasetStats stats;
  for (const QAItem &item : items) {
    std::string category = TaskCategoryName(item.category);
    std::string difficulty = DifficultyName(item.difficulty);
    std::string split = SplitName(item.split);
    ++stats.total;
    ++stats.cells[{category, difficulty, split}];
    ++stats.per_category[category];
    ++stats.per_difficulty[difficulty];
    ++stats.per_split[split];
  }
  return stats;
}

std::string DatasetStatsJson(const DatasetStats &stats) {
  ojson cells = ojson::array();
  for (const auto &[key, count] : stats.cells) {
    cells.push_back({{"category", std::get<0>(key)},
                     {"difficulty", std::get<1>(key)},
                     {"split", std::get<2>(key)},
                     {"count", count}});
  }
  ojson j{{"total", stats.total},
          {"per_category", stats.per_category},
          {"per_difficulty", stats.per_difficulty},
          {"per_split", stats.per_split},
          {"cells", std::move(cells)}};
  return j.dump(2, ' ', false, ojson::error_handler_t::replace);
}

std::string CorpusLine(const QAItem &item, const Graph &graph) {
  ojson paths = ojson::array();
  ojson refs = ojson::array();
  for (const ReasoningPath &p : item.paths) {
    paths.push_back(SerializePath(p, graph));
    refs.push_back(PathRef(p, graph));
  }
  ojson j{{"id", item.id},
          {"question", item.question},
          {"options", item.options},
          {"correct_index", item.correct_index},
          {"head", graph.node(item.head).name},
          {"head_key", graph.node(item.head).key},
          {"relation", item.relation},
          {"answer", graph.node(item.answer).name},
          {"answer_key", graph.node(item.answer).key},
          {"category", TaskCategoryName(item.category)},
          {"difficulty", DifficultyName(item.difficulty)},
          {"unmined", item.unmined},
          {"split", SplitName(item.split)},
          {"paths", std::move(paths)},
          {"path_refs", std::move(refs)}};
  return Dump(j);
}

void WriteCorpus(std::span<const QAItem> items, const Graph &graph,
                 const std::string &path) {
  std::string out;
  for (const QAItem &item : items) {
    out += CorpusLine(item, graph);
    out.push_back('\n');
  }
  WriteFileAtomic(path, out);
}

std::vector<QAItem> ReadCorpus(const std::string &path, const Graph &graph) {
  std::stringstream in(ReadFile(path));
  std::vector<QAItem> items;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      ojson j = ojson::parse(line);
      QAItem item;
      item.id = j.at("id").get<std::string>();
      item.question = j.at("question").get<std::string>();
      auto options = j.at("options").get<std::vector<std::string>>();
      if (options.size() != 4) throw Error(ErrorCode::kSchema, "expected 4 options");
      std::copy(options.begin(), options.end(), item.options.begin());
      item.correct_index = j.at("correct_index").get<int>();
      if (item.correct_index < 0 || item.correct_index > 3) {
        throw Error(ErrorCode::kSchema, "correct_index out of range");
      }
      item.head = ResolveKey(graph, j.at("head_key").get<std::string>());
      item.answer = ResolveKey(graph, j.at("answer_key").get<std::string>());
      item.relation = j.at("relation").get<std::string>();
      auto category = ParseTaskCategory(j.at("category").get<std::string>());
      auto difficulty = ParseDifficulty(j.at("difficulty").get<std::string>());
      auto split = ParseSplit(j.value("split", std::string("none")));
      if (!category || !difficulty || !split) {
        throw Error(ErrorCode::kSchema, "bad category, difficulty or split");
      }
      item.category = *category;
      item.difficulty = *difficulty;
      item.split = *split;
      item.unmined = j.value("unmined", true);
      for (const auto &ref : j.value("path_refs", ojson::array())) {
        item.paths.push_back(PathFromRef(ref, graph));
      }
      items.push_back(std::move(item));
    } catch (const ojson::exception &e) {
      throw Error(ErrorCode::kSchema,
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::kSchema,
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

ForgeResult ForgeBenchmark(const Graph &graph, const Lexicon &lexicon,
                           const ForgeOptions &options) {
  ForgeResult result;
  std::vector<CategorySpec> specs;
  for (size_t i = 0; i < options.plans.size(); ++i) {
    const CategoryPlan &plan = options.plans[i];
    specs.push_back(plan.spec);
    GenerateResult generated = GenerateQa(graph, plan.spec, plan.count,
                                          DeriveSeed(options.seed, i), options.generate);
    size_t produced = generated.items.size();
    result.outcomes.push_back({plan.spec.name, plan.count, produced});
    if (plan.count > 0) {
      double missing = static_cast<double>(plan.count - produced) /
                       static_cast<double>(plan.count);
      if (missing > options.shortfall_tolerance) {
        throw Error(ErrorCode::kInsufficient,
                    std::string(TaskCategoryName(plan.spec.name)) + ": produced " +
                        std::to_string(produced) + " of " +
                        std::to_string(plan.count) +
                        " items (not enough triples with 3 distractors)");
      }
    }
    std::move(generated.items.begin(), generated.items.end(),
              std::back_inserter(result.items));
  }
  if (options.mine) {
    AttachPathsAndDifficulty(&result.items, graph, lexicon, specs, options.attach);
  }
  result.split = SplitByHead(result.items, options.ratios,
                             DeriveSeed(options.seed, 0x53504C4954ULL));
  std::unordered_map<std::string, Split> split_of;
  for (const auto *part : {&result.split.sft, &result.split.rl, &result.split.test}) {
    for (const QAItem &item : *part) split_of[item.id] = item.split;
  }
  for (QAItem &item : result.items) item.split = split_of[item.id];
  result.stats = ComputeDatasetStats(result.items);
  return result;
}

void WriteForgeOutputs(const ForgeResult &result, const ForgeOptions &options,
                       const Graph &graph, const std::string &out_dir) {
  std::filesystem::create_directories(out_dir);
  auto path = [&](const char *name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  WriteCorpus(result.items, graph, path("corpus.jsonl"));
  WriteCorpus(result.split.sft, graph, path("sft.jsonl"));
  WriteCorpus(result.split.rl, graph, path("rl.jsonl"));
  WriteCorpus(result.split.test, graph, path("test.jsonl"));
  WriteFileAtomic(path("stats.json"), DatasetStatsJson(result.stats) + "\n");

  ojson specs = ojson::array();
  for (size_t i = 0; i < options.plans.size(); ++i) {
    const CategoryPlan &plan = options.plans[i];
    specs.push_back({{"category", TaskCategoryName(plan.spec.name)},
                     {"spec_sha256", Sha256Hex(CategorySpecJson(plan.spec))},
                     {"requested", plan.count},
                     {"produced", result.outcomes[i].produced}});
  }
  ojson manifest{{"seed", options.seed},
                 {"ratios", options.ratios},
                 {"max_per_head", options.generate.max_per_head},
                 {"mined", options.mine},
                 {"max_d", options.attach.max_d},
                 {"categories", std::move(specs)},
                 {"split_sizes",
                  {{"sft", result.split.sft.size()},
                   {"rl", result.split.rl.size()},
                   {"test", result.split.test.size()}}},
                 {"total", result.items.size()}};
  WriteFileAtomic(path("forge_manifest.json"),
                  manifest.dump(2, ' ', false, ojson::error_handler_t::replace) + "\n");
}

}  // namespace pathforge
