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

#include "pathforge/grpo.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "pathforge/errors.h"
#include "pathforge/io.h"
#include "pathforge/rng.h"

namespace pathforge {

namespace {

using ojson = nlohmann::ordered_json;

double Clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

void CheckGroupAgainst(const ResponseGroup &group, size_t support) {
  size_t g = group.responses.size();
  if (g < 2) throw Error(ErrorCode::kDomain, "group needs at least 2 responses");
  if (group.rewards.size() != g) {
    throw Error(ErrorCode::kDomain, "group has " + std::to_string(g) + " responses but " +
                                        std::to_string(group.rewards.size()) + " rewards");
  }
  if (group.advantages.size() != g) {
    throw Error(ErrorCode::kDomain, "group advantages are not computed");
  }
  for (int y : group.responses) {
    if (y < 0 || static_cast<size_t>(y) >= support) {
      throw Error(ErrorCode::kDomain, "response index " + std::to_string(y) +
                                          " outside the policy support");
    }
  }
}

PolicyDist PolicyFrom(const ojson &line, const std::string &name) {
  if (line.contains("pi_" + name)) {
    return PolicyDist{line["pi_" + name].get<std::vector<double>>()};
  }
  if (line.contains("theta_" + name)) {
    return Softmax(line["theta_" + name].get<std::vector<double>>());
  }
  throw Error(ErrorCode::kInvalidInput, "missing pi_" + name + " or theta_" + name);
}

}  // namespace

void CheckPolicyDist(const PolicyDist &dist) {
  if (dist.p.empty()) throw Error(ErrorCode::kDomain, "empty distribution");
  double sum = 0;
  for (double x : dist.p) {
    if (!(x >= 0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kDomain, "distribution has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::kDomain, "distribution does not sum to 1");
  }
}

PolicyDist Softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorCode::kDomain, "softmax of nothing");
  double top = *std::max_element(logits.begin(), logits.end());
  PolicyDist out;
  double sum = 0;
  for (double z : logits) {
    out.p.push_back(std::exp(z - top));
    sum += out.p.back();
  }
  for (double &x : out.p) x /= sum;
  return out;
}

void CheckGrpoConfig(const GrpoConfig &config) {
  if (!(config.epsilon > 0)) throw Error(ErrorCode::kDomain, "epsilon must be > 0");
  if (!(config.beta >= 0)) throw Error(ErrorCode::kDomain, "beta must be >= 0");
  if (config.group_size < 2) throw Error(ErrorCode::kDomain, "group_size must be >= 2");
  if (!(config.std_floor > 0)) throw Error(ErrorCode::kDomain, "std_floor must be > 0");
  if (!(config.prob_floor > 0)) throw Error(ErrorCode::kDomain, "prob_floor must be > 0");
}

std::vector<double> ComputeAdvantages(std::span<const double> rewards, double std_floor) {
  const size_t g = rewards.size();
  if (g < 2) throw Error(ErrorCode::kDomain, "advantages need at least 2 rewards");
  std::vector<double> out(g, 0.0);
  if (std::all_of(rewards.begin(), rewards.end(),
                  [&](double r) { return r == rewards[0]; })) {
    return out;
  }
  double mean = 0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  double denom = std::max(std::sqrt(var), std_floor);
  for (size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

void ComputeAdvantages(ResponseGroup *group, double std_floor) {
  group->advantages = ComputeAdvantages(group->rewards, std_floor);
}

double ProbabilityRatio(double p_new, double p_old, double floor) {
  if (!(p_old >= floor)) {
    throw Error(ErrorCode::kNumericGuard,
                "old probability below the ratio floor: " + std::to_string(p_old));
  }
  return p_new / p_old;
}

double ClippedTerm(double ratio, double advantage, double epsilon) {
  if (!(epsilon > 0)) throw Error(ErrorCode::kDomain, "epsilon must be > 0");
  return std::min(ratio * advantage, Clip(ratio, 1 - epsilon, 1 + epsilon) * advantage);
}

double KlDivergence(const PolicyDist &p, const PolicyDist &q, double floor) {
  if (p.p.size() != q.p.size()) {
    throw Error(ErrorCode::kDomain, "KL over distributions of different support");
  }
  double kl = 0;
  for (size_t i = 0; i < p.p.size(); ++i) {
    if (p.p[i] <= 0) continue;
    if (!(q.p[i] >= floor)) {
      throw Error(ErrorCode::kDomain, "reference has no mass where the policy does");
    }
    kl += p.p[i] * std::log(p.p[i] / q.p[i]);
  }
  return kl;
}

ObjectiveTerms EvaluateObjective(const ResponseGroup &group, const GrpoConfig &config,
                                 const PolicyDist &pi_new, const PolicyDist &pi_old,
                                 const PolicyDist &pi_ref) {
  if (pi_new.p.size() != pi_old.p.size() || pi_new.p.size() != pi_ref.p.size()) {
    throw Error(ErrorCode::kDomain, "policies differ in support size");
  }
  CheckGroupAgainst(group, pi_new.p.size());
  ObjectiveTerms t;
  const size_t g = group.responses.size();
  for (size_t i = 0; i < g; ++i) {
    int y = group.responses[i];
    double ratio = ProbabilityRatio(pi_new.p[y], pi_old.p[y], config.prob_floor);
    t.surrogate += ClippedTerm(ratio, group.advantages[i], config.epsilon);
  }
  t.surrogate /= static_cast<double>(g);
  t.kl = KlDivergence(pi_new, pi_ref, config.prob_floor);
  t.objective = t.surrogate - config.beta * t.kl;
  return t;
}

double GrpoObjective(const ResponseGroup &group, const GrpoConfig &config,
                     const PolicyDist &pi_new, const PolicyDist &pi_old,
                     const PolicyDist &pi_ref) {
  return EvaluateObjective(group, config, pi_new, pi_old, pi_ref).objective;
}

ResponseGroup SampleGroup(const PolicyDist &pi_old, std::span<const double> reward_of_response,
                          int group_size, double std_floor, uint64_t seed) {
  if (reward_of_response.size() != pi_old.p.size()) {
    throw Error(ErrorCode::kDomain, "one reward per response is required");
  }
  std::mt19937_64 rng(seed);
  ResponseGroup group;
  for (int i = 0; i < group_size; ++i) {
    double u = UniformUnit(rng);
    size_t y = 0;
    double acc = pi_old.p[0];
    while (u >= acc && y + 1 < pi_old.p.size()) acc += pi_old.p[++y];
    group.responses.push_back(static_cast<int>(y));
    group.rewards.push_back(reward_of_response[y]);
  }
  ComputeAdvantages(&group, std_floor);
  return group;
}

double ToyObjective(std::span<const double> theta, const ToyPolicyProblem &problem) {
  return GrpoObjective(problem.group, problem.config, Softmax(theta), problem.pi_old,
                       problem.pi_ref);
}

std::vector<double> ToyKlGradient(std::span<const double> theta,
                                  const ToyPolicyProblem &problem) {
  PolicyDist pi = Softmax(theta);
  const size_t n = pi.p.size();
  std::vector<double> l(n);
  double mean_l = 0;
  for (size_t k = 0; k < n; ++k) {
    l[k] = std::log(pi.p[k]) - std::log(problem.pi_ref.p[k]);
    mean_l += pi.p[k] * l[k];
  }
  std::vector<double> grad(n);
  for (size_t k = 0; k < n; ++k) {
    grad[k] = -problem.config.beta * pi.p[k] * (l[k] - mean_l);
  }
  return grad;
}

std::vector<double> ToyGradient(std::span<const double> theta,
                                const ToyPolicyProblem &problem) {
  PolicyDist pi = Softmax(theta);
  const ResponseGroup &group = problem.group;
  CheckGroupAgainst(group, pi.p.size());
  const double eps = problem.config.epsilon;
  const double g = static_cast<double>(group.responses.size());
  std::vector<double> grad = ToyKlGradient(theta, problem);
  for (size_t i = 0; i < group.responses.size(); ++i) {
    int y = group.responses[i];
    double a = group.advantages[i];
    double ratio = ProbabilityRatio(pi.p[y], problem.pi_old.p[y], problem.config.prob_floor);
    // The surrogate follows r * A unless the clipped branch is strictly
    // smaller, and that branch is flat in r.
    if (ratio * a > Clip(ratio, 1 - eps, 1 + eps) * a) continue;
    for (size_t k = 0; k < pi.p.size(); ++k) {
      double dratio = ratio * ((static_cast<int>(k) == y ? 1.0 : 0.0) - pi.p[k]);
      grad[k] += a * dratio / g;
    }
  }
  return grad;
}

GradientCheck GrpoGradientCheck(std::span<const double> theta,
                                const ToyPolicyProblem &problem, double h) {
  GradientCheck check;
  check.analytic = ToyGradient(theta, problem);
  std::vector<double> probe(theta.begin(), theta.end());
  for (size_t k = 0; k < probe.size(); ++k) {
    double saved = probe[k];
    probe[k] = saved + h;
    double up = ToyObjective(probe, problem);
    probe[k] = saved - h;
    double down = ToyObjective(probe, problem);
    probe[k] = saved;
    double numeric = (up - down) / (2 * h);
    check.numeric.push_back(numeric);
    double a = check.analytic[k];
    double scale = std::max({1.0, std::abs(a), std::abs(numeric)});
    check.max_rel_error = std::max(check.max_rel_error, std::abs(a - numeric) / scale);
  }
  return check;
}

std::vector<GroupReport> EvaluateGroupsFile(const std::string &path,
                                            const GrpoConfig &defaults,
                                            bool gradient_check) {
  std::istringstream in(ReadFile(path));
  std::vector<GroupReport> reports;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::string where = path + ": line " + std::to_string(line_no);
    try {
      ojson j = ojson::parse(line);
      GrpoConfig config = defaults;
      config.epsilon = j.value("epsilon", config.epsilon);
      config.beta = j.value("beta", config.beta);
      config.std_floor = j.value("std_floor", config.std_floor);
      ResponseGroup group;
      group.responses = j.at("responses").get<std::vector<int>>();
      group.rewards = j.at("rewards").get<std::vector<double>>();
      config.group_size = static_cast<int>(group.responses.size());
      CheckGrpoConfig(config);
      if (group.rewards.size() != group.responses.size()) {
        throw Error(ErrorCode::kDomain, "responses and rewards differ in length");
      }
      ComputeAdvantages(&group, config.std_floor);
      PolicyDist pi_new = PolicyFrom(j, "new");
      PolicyDist pi_old = PolicyFrom(j, "old");
      PolicyDist pi_ref = PolicyFrom(j, "ref");
      for (const PolicyDist *d : {&pi_new, &pi_old, &pi_ref}) CheckPolicyDist(*d);

      GroupReport report;
      report.id = j.value("id", "group-" + std::to_string(reports.size() + 1));
      report.terms = EvaluateObjective(group, config, pi_new, pi_old, pi_ref);
      report.advantages = group.advantages;
      if (gradient_check) {
        std::vector<double> theta;
        if (j.contains("theta_new")) {
          theta = j["theta_new"].get<std::vector<double>>();
        } else {
          for (double p : pi_new.p) {
            if (!(p > 0)) throw Error(ErrorCode::kDomain, "gradient check needs pi_new > 0");
            theta.push_back(std::log(p));
          }
        }
        ToyPolicyProblem problem{pi_old, pi_ref, group, config};
        report.gradient_error = GrpoGradientCheck(theta, problem).max_rel_error;
      }
      reports.push_back(std::move(report));
    } catch (const ojson::exception &e) {
      throw Error(ErrorCode::kInvalidInput, where + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::kInvalidInput, where + ": " + e.what());
    }
  }
  return reports;
}

std::string GroupReportsJson(const std::vector<GroupReport> &reports) {
  ojson groups = ojson::array();
  double worst = 0;
  bool any_check = false;
  for (const GroupReport &r : reports) {
    ojson g{{"id", r.id},
            {"advantages", r.advantages},
            {"surrogate", r.terms.surrogate},
            {"kl", r.terms.kl},
            {"objective", r.terms.objective}};
    if (r.gradient_error) {
      g["gradient_max_rel_error"] = *r.gradient_error;
      worst = std::max(worst, *r.gradient_error);
      any_check = true;
    }
    groups.push_back(std::move(g));
  }
  ojson j{{"count", reports.size()}, {"groups", std::move(groups)}};
  if (any_check) j["gradient_check"] = {{"max_rel_error", worst}, {"step", 1e-5}};
  return j.dump(2);
}

}  // namespace pathforge
