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

// C interface to the pathforge library. All strings are UTF-8 and
// NUL-terminated. Strings returned through `char **` belong to the caller
// and are released with pf_string_free. Options are passed as JSON objects;
// NULL or "" means defaults. Every call returns a pf_status; on failure
// pf_last_error() describes the problem for the calling thread.

#ifndef PATHFORGE_PATHFORGE_H_
#define PATHFORGE_PATHFORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_IO = 1,
  PF_ERR_SCHEMA = 2,
  PF_ERR_DOMAIN = 3,
  PF_ERR_LINKING = 4,
  PF_ERR_INSUFFICIENT = 5,
  PF_ERR_TEMPLATE = 6,
  PF_ERR_TRANSPORT = 7,
  PF_ERR_CONTENT = 8,
  PF_ERR_NUMERIC_GUARD = 9,
  PF_ERR_INVALID_INPUT = 10,
  PF_ERR_NULL_ARGUMENT = 11,
  PF_ERR_INTERNAL = 12,
} pf_status;

typedef struct pf_graph pf_graph;
typedef struct pf_lexicon pf_lexicon;
typedef struct pf_manifest pf_manifest;

PF_API const char *pf_version(void);
PF_API const char *pf_status_name(pf_status status);
PF_API const char *pf_last_error(void);
PF_API void pf_string_free(char *s);

// Options: {"delimiter": ",", "inverse_edges": false, "alias_table": ""}.
// Snapshots are recognized by content.
PF_API pf_status pf_graph_load(const char *path, const char *options_json,
                               pf_graph **out);
PF_API void pf_graph_free(pf_graph *graph);
PF_API pf_status pf_graph_save_snapshot(const pf_graph *graph,
                                        const char *path);
PF_API pf_status pf_graph_stats_json(const pf_graph *graph, char **out_json);

PF_API pf_status pf_lexicon_create(const pf_graph *graph, pf_lexicon **out);
PF_API void pf_lexicon_free(pf_lexicon *lexicon);
// [{"surface", "start", "end", "candidates": [{"key", "name", "type"}]}]
PF_API pf_status pf_link_text_json(const pf_graph *graph,
                                   const pf_lexicon *lexicon,
                                   const char *text, char **out_json);

// Mining options: {"max_d": 8, "templates": "<registry path>",
// "max_results": 100000, "max_branch_length": 8, "traverse_inverse": false,
// "prune_k": 0, "jobs": 1}. Output is one "difficulty<TAB>path" line per
// path. PF_ERR_LINKING when the question or answer links nothing.
PF_API pf_status pf_mine_question(const pf_graph *graph,
                                  const pf_lexicon *lexicon,
                                  const char *question, const char *answer,
                                  const char *options_json, char **out_text);
// Mines every item of a corpus file and writes the per-item blocks to
// out_path. The summary JSON counts items, mined items and paths.
PF_API pf_status pf_mine_corpus(const pf_graph *graph,
                                const pf_lexicon *lexicon,
                                const char *corpus_path,
                                const char *options_json, const char *out_path,
                                char **out_summary_json);

// Options: {"categories": "<plan json path>", "seed": 0, "ratios": [..3],
// "max_per_head": 0, "shortfall_tolerance": 0.25, "mine": true,
// "exclude_question_edge": false, "max_d": 8, "prune_k": 8, "jobs": 1}.
// Writes corpus, splits, stats and forge manifest into out_dir and returns
// the stats JSON.
PF_API pf_status pf_forge_qa(const pf_graph *graph, const pf_lexicon *lexicon,
                             const char *options_json, const char *out_dir,
                             char **out_stats_json);

// Options: {"client": "mock"|"http", "endpoint": "", "token_env": "",
// "generation_template": "", "pruning_template": "", "mock_table": "",
// "max_tokens": 1024, "temperature": 0.0, "jobs": 1, "checkpoint": "",
// "fixed_clock": false}. Records that fail are listed in the summary and
// left out of the export; the call still returns PF_OK. Template problems
// fail with PF_ERR_TEMPLATE before any client call.
PF_API pf_status pf_cot_run(const pf_graph *graph, const char *corpus_path,
                            const char *options_json, const char *out_path,
                            char **out_summary_json);

// mode: "letter" (default) or "name".
PF_API pf_status pf_score_files(const char *responses_path,
                                const char *gold_path, const char *mode,
                                char **out_report_json);

// Options: {"epsilon": 0.2, "beta": 0.04, "std_floor": 1e-8,
// "gradient_check": false}.
PF_API pf_status pf_grpo_eval_file(const char *groups_path,
                                   const char *options_json,
                                   char **out_report_json);

PF_API pf_status pf_manifest_create(const char *config_text,
                                    pf_manifest **out);
PF_API void pf_manifest_free(pf_manifest *manifest);
PF_API pf_status pf_manifest_set_field(pf_manifest *manifest, const char *key,
                                       const char *json_value);
PF_API pf_status pf_manifest_add_stage(pf_manifest *manifest,
                                       const char *name,
                                       const char *const *inputs,
                                       size_t n_inputs,
                                       const char *const *outputs,
                                       size_t n_outputs, double wall_seconds);
PF_API pf_status pf_manifest_write(const pf_manifest *manifest,
                                   const char *path);
PF_API pf_status pf_manifest_config_hash(const pf_manifest *manifest,
                                         char **out_hex);
// PF_OK when every digest matches; otherwise PF_ERR_IO and the mismatches
// are in out_report_json.
PF_API pf_status pf_manifest_verify(const char *path, char **out_report_json);

// SHA-256 of a file, hex encoded.
PF_API pf_status pf_sha256_file(const char *path, char **out_hex);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // PATHFORGE_PATHFORGE_H_
