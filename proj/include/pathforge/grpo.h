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

#ifndef PATHFORGE_GRPO_H_
#define PATHFORGE_GRPO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pathforge {

inline constexpr double kDefaultProbFloor = 1e-12;

// A distribution over a finite response set.
struct PolicyDist {
  std::vector<double> p;
};

// Throws Error(kDomain) for negative entries or a sum off by more than 1e-12.
void CheckPolicyDist(const PolicyDist &dist);
PolicyDist Softmax(std::span<const double> logits);

struct GrpoConfig {
  double epsilon = 0.2;
  double beta = 0.04;
  int group_size = 8;
  double std_floor = 1e-8;
  double prob_floor = kDefaultProbFloor;
};

void CheckGrpoConfig(const GrpoConfig &config);

struct ResponseGroup {
  std::vector<int> responses;  // indices into the policy distributions
  std::vector<double> rewards;
  std::vector<double> advantages;  // empty until ComputeAdvantages
};

// (r_i - mean) / max(population std, std_floor). Throws Error(kDomain) for
// fewer than two rewards.
std::vector<double> ComputeAdvantages(std::span<const double> rewards,
                                      double std_floor);
void ComputeAdvantages(ResponseGroup *group, double std_floor);

// Throws Error(kNumericGuard) when p_old is below the floor.
double ProbabilityRatio(double p_new, double p_old,
                        double floor = kDefaultProbFloor);

// min(r * A, clip(r, 1 - eps, 1 + eps) * A). Throws Error(kDomain) for
// eps <= 0.
double ClippedTerm(double ratio, double advantage, double epsilon);

// Exact sum of p log(p / q), with 0 log 0 = 0. Throws Error(kDomain) for
// different sizes or q below the floor where p is positive.
double KlDivergence(const PolicyDist &p, const PolicyDist &q,
                    double floor = kDefaultProbFloor);

struct ObjectiveTerms {
  double surrogate = 0;  // mean clipped term
  double kl = 0;         // KL(new || ref)
  double objective = 0;  // surrogate - beta * kl
};

// Throws Error(kDomain) when the group is inconsistent with the policies
// or its advantages are missing.
ObjectiveTerms EvaluateObjective(const ResponseGroup &group,
                                 const GrpoConfig &config,
                                 const PolicyDist &pi_new,
                                 const PolicyDist &pi_old,
                                 const PolicyDist &pi_ref);
double GrpoObjective(const ResponseGroup &group, const GrpoConfig &config,
                     const PolicyDist &pi_new, const PolicyDist &pi_old,
                     const PolicyDist &pi_ref);

// Draws G responses from pi_old, looks up their rewards and normalizes.
ResponseGroup SampleGroup(const PolicyDist &pi_old,
                          std::span<const double> reward_of_response,
                          int group_size, double std_floor, uint64_t seed);

// Toy setting: pi_new = softmax(theta) with old and reference policies
// and the sampled group held fixed.
struct ToyPolicyProblem {
  PolicyDist pi_old;
  PolicyDist pi_ref;
  ResponseGroup group;
  GrpoConfig config;
};

double ToyObjective(std::span<const double> theta, const ToyPolicyProblem &problem);
std::vector<double> ToyGradient(std::span<const double> theta,
                                const ToyPolicyProblem &problem);
// Gradient of the -beta * KL part alone.
std::vector<double> ToyKlGradient(std::span<const double> theta,
                                  const ToyPolicyProblem &problem);

struct GradientCheck {
  std::vector<double> analytic;
  std::vector<double> numeric;
  // max |a - n| / max(1, |a|, |n|)
  double max_rel_error = 0;
};

// Central differences with step h against ToyGradient.
GradientCheck GrpoGradientCheck(std::span<const double> theta,
                                const ToyPolicyProblem &problem,
                                double h = 1e-5);

// JSONL groups; see README for the fields. Throws Error(kInvalidInput) for a
// malformed line, naming it.
struct GroupReport {
  std::string id;
  std::vector<double> advantages;
  ObjectiveTerms terms;
  std::optional<double> gradient_error;
};

std::vector<GroupReport> EvaluateGroupsFile(const std::string &path,
                                            const GrpoConfig &defaults,
                                            bool gradient_check);
std::string GroupReportsJson(const std::vector<GroupReport> &reports);

}  // namespace pathforge

#endif  // PATHFORGE_GRPO_H_
