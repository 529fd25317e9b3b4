// Copyright 2026 The Authors.
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

// Budgeted link placement.
//
// Three objectives score a set A of new links, each summing a per-source
// contribution weighted by w_s:
//   f1: expected number of clicks on new links, Σ p
//   f2: probability that at least one new link is clicked, 1 − Π(1 − p)
//   f3: share of single-link choices that land on a new link,
//       Σ_A p / (Σ_A p + Σ_E p)
// All three are monotone and submodular, and a source's contribution only
// depends on its own links. Within a source the best k links are the k with
// the highest p, so marginal gains along that order are final once computed
// and a merge of the per-source gain sequences yields an optimal top-K.

#ifndef LINKFORGE_LINK_PLACEMENT_HPP_
#define LINKFORGE_LINK_PLACEMENT_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkforge/ctr_estimators.hpp"
#include "linkforge/transition_stats.hpp"

namespace linkforge {

enum class Objective { kF1, kF2, kF3 };

std::string_view ObjectiveName(Objective o);
Objective ParseObjective(std::string_view name);  // throws Error{kUsage}

struct Link {
  std::string source;
  std::string target;

  friend bool operator==(const Link&, const Link&) = default;
  friend auto operator<=>(const Link&, const Link&) = default;
};

struct Candidate {
  std::string source;
  std::string target;
  double p = 0.0;

  Link link() const { return {source, target}; }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct SourceInfo {
  double weight = 0.0;  // w_s
  double prior = 0.0;   // Σ_E p over existing out-links

  friend bool operator==(const SourceInfo&, const SourceInfo&) = default;
};

struct PlacementProblem {
  std::vector<Candidate> candidates;
  std::map<std::string, SourceInfo> sources;
  int budget = 0;
  Objective objective = Objective::kF1;
  std::optional<int> max_per_source;

  // Throws Error{kInvalidProblem} on duplicates, negative p / weight / prior,
  // a negative budget, or a candidate source without SourceInfo.
  void Validate() const;
  const SourceInfo& Source(std::string_view s) const;
  friend bool operator==(const PlacementProblem&,
                         const PlacementProblem&) = default;
};

// Running per-source quantities: Σ of new p, Π of (1 − p), contribution C.
struct SourceState {
  double sum = 0.0;
  double product = 1.0;
  double contribution = 0.0;

  friend bool operator==(const SourceState&, const SourceState&) = default;
};

struct ChosenLink {
  std::string source;
  std::string target;
  double p = 0.0;
  double marginal_gain = 0.0;

  friend bool operator==(const ChosenLink&, const ChosenLink&) = default;
};

struct PlacementSolution {
  std::vector<ChosenLink> chosen;
  double objective_value = 0.0;
  std::map<std::string, SourceState> per_source_state;

  std::vector<Link> links() const;
  friend bool operator==(const PlacementSolution&,
                         const PlacementSolution&) = default;
};

// ln(1 + c_s)
double SourceWeight(Count views);

double SourceContribution(Objective objective, const SourceInfo& info,
                          double sum, double product);

// State after adding a link with clickthrough p.
SourceState Advance(Objective objective, const SourceInfo& info,
                    const SourceState& state, double p);

// Gain of adding p to a source already in `state`, via the closed-form
// difference of contributions.
double MarginalGain(Objective objective, const SourceInfo& info,
                    const SourceState& state, double p);

// f(A) from scratch. Throws Error{kUnknownCandidate}.
double ObjectiveValue(const PlacementProblem& problem, std::span<const Link> a);

// Order of suggestions: gain descending, then source, then p descending,
// then target.
bool RanksBefore(double gain_a, const Candidate& a, double gain_b,
                 const Candidate& b);

PlacementSolution GreedyPlace(const PlacementProblem& problem);

inline constexpr std::size_t kBruteForceLimit = 20;

// Exhaustive maximizer over all subsets of size ≤ K.
// Throws Error{kTooLarge} above kBruteForceLimit candidates.
PlacementSolution BruteForcePlace(const PlacementProblem& problem);

// Assembles a problem from candidate estimates of one method, page-view
// counts (weights) and existing-link clickthrough rates (priors). Zero
// estimates are dropped.
PlacementProblem BuildProblem(std::span<const CandidateEstimate> estimates,
                              Method method, const TransitionStats& views,
                              const ClickthroughMatrix& existing,
                              Objective objective, int budget);

// One JSON object per line: rank, source, target, p_est, marginal_gain,
// objective (running value).
std::string SolutionJsonl(const PlacementSolution& solution);

std::string ProblemToJson(const PlacementProblem& problem);
PlacementProblem ProblemFromJson(std::string_view text);

}  // namespace linkforge

#endif  // LINKFORGE_LINK_PLACEMENT_HPP_
