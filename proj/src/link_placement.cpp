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

#include "linkforge/link_placement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <queue>
#include <set>

#include <json.hpp>

#include "linkforge/error.hpp"

namespace linkforge {

using Json = nlohmann::json;

std::string_view ObjectiveName(Objective o) {
  switch (o) {
    case Objective::kF1: return "f1";
    case Objective::kF2: return "f2";
    case Objective::kF3: return "f3";
  }
  return "unknown";
}

Objective ParseObjective(std::string_view name) {
  if (name == "f1") return Objective::kF1;
  if (name == "f2") return Objective::kF2;
  if (name == "f3") return Objective::kF3;
  throw Error(ErrorCode::kUsage, "unknown objective '" + std::string(name) + "'");
}

std::vector<Link> PlacementSolution::links() const {
  std::vector<Link> out;
  out.reserve(chosen.size());
  for (const auto& c : chosen) out.push_back({c.source, c.target});
  return out;
}

void PlacementProblem::Validate() const {
  if (budget < 0) throw Error(ErrorCode::kInvalidProblem, "negative budget");
  if (max_per_source && *max_per_source < 0) {
    throw Error(ErrorCode::kInvalidProblem, "negative per-source cap");
  }
  std::set<Link> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.link()).second) {
      throw Error(ErrorCode::kInvalidProblem,
                  "duplicate candidate " + c.source + " -> " + c.target);
    }
    if (!(c.p >= 0.0) || !std::isfinite(c.p)) {
      throw Error(ErrorCode::kInvalidProblem,
                  "bad estimate for " + c.source + " -> " + c.target);
    }
    if (!sources.contains(c.source)) {
      throw Error(ErrorCode::kInvalidProblem,
                  "no weight for source " + c.source);
    }
  }
  for (const auto& [s, info] : sources) {
    if (!(info.weight >= 0.0) || !(info.prior >= 0.0)) {
      throw Error(ErrorCode::kInvalidProblem, "bad weight or prior for " + s);
    }
  }
}

const SourceInfo& PlacementProblem::Source(std::string_view s) const {
  auto it = sources.find(std::string(s));
  if (it == sources.end()) {
    throw Error(ErrorCode::kInvalidProblem, "no weight for source " + std::string(s));
  }
  return it->second;
}

double SourceWeight(Count views) {
  return std::log1p(static_cast<double>(std::max<Count>(views, 0)));
}

double SourceContribution(Objective objective, const SourceInfo& info,
                          double sum, double product) {
  switch (objective) {
    case Objective::kF1:
      return info.weight * sum;
    case Objective::kF2:
      return info.weight * (1.0 - product);
    case Objective::kF3: {
      const double denom = sum + info.prior;
      return denom > 0.0 ? info.weight * sum / denom : 0.0;
    }
  }
  return 0.0;
}

SourceState Advance(Objective objective, const SourceInfo& info,
                    const SourceState& state, double p) {
  SourceState next;
  next.sum = state.sum + p;
  next.product = state.product * (1.0 - p);
  next.contribution =
      SourceContribution(objective, info, next.sum, next.product);
  return next;
}

double MarginalGain(Objective objective, const SourceInfo& info,
                    const SourceState& state, double p) {
  switch (objective) {
    case Objective::kF1:
      return info.weight * p;  // state-free, so f1 gains never move
    case Objective::kF2:
      return info.weight * (state.product - state.product * (1.0 - p));
    case Objective::kF3:
      return SourceContribution(objective, info, state.sum + p, 0.0) -
             SourceContribution(objective, info, state.sum, 0.0);
  }
  return 0.0;
}

bool RanksBefore(double gain_a, const Candidate& a, double gain_b,
                 const Candidate& b) {
  if (gain_a != gain_b) return gain_a > gain_b;
  if (a.source != b.source) return a.source < b.source;
  if (a.p != b.p) return a.p > b.p;
  return a.target < b.target;
}

namespace {

bool ByDescendingP(const Candidate& a, const Candidate& b) {
  if (a.p != b.p) return a.p > b.p;
  return a.target < b.target;
}

// Candidates grouped by source (name order), each group in descending p.
std::map<std::string, std::vector<Candidate>> GroupBySource(
    std::span<const Candidate> candidates) {
  std::map<std::string, std::vector<Candidate>> groups;
  for (const auto& c : candidates) groups[c.source].push_back(c);
  for (auto& [s, g] : groups) std::sort(g.begin(), g.end(), ByDescendingP);
  return groups;
}

}  // namespace

double ObjectiveValue(const PlacementProblem& problem, std::span<const Link> a) {
  std::map<Link, double> p_of;
  for (const auto& c : problem.candidates) p_of.emplace(c.link(), c.p);
  std::vector<Candidate> chosen;
  std::set<Link> unique;
  for (const auto& link : a) {
    auto it = p_of.find(link);
    if (it == p_of.end()) {
      throw Error(ErrorCode::kUnknownCandidate,
                  "not a candidate: " + link.source + " -> " + link.target);
    }
    if (unique.insert(link).second) {
      chosen.push_back({link.source, link.target, it->second});
    }
  }
  double total = 0.0;
  for (const auto& [s, group] : GroupBySource(chosen)) {
    const SourceInfo& info = problem.Source(s);
    SourceState state;
    for (const auto& c : group) state = Advance(problem.objective, info, state, c.p);
    total += state.contribution;
  }
  return total;
}

PlacementSolution GreedyPlace(const PlacementProblem& problem) {
  problem.Validate();
  std::vector<Candidate> usable;
  for (const auto& c : problem.candidates) {
    if (c.p > 0.0) usable.push_back(c);
  }
  auto groups = GroupBySource(usable);

  struct Sequence {
    std::string source;
    std::vector<Candidate> candidates;
    std::vector<double> gains;
    std::vector<SourceState> states;
  };
  std::vector<Sequence> seqs;
  seqs.reserve(groups.size());
  for (auto& [s, g] : groups) {
    if (problem.max_per_source &&
        g.size() > static_cast<std::size_t>(*problem.max_per_source)) {
      g.resize(*problem.max_per_source);
    }
    seqs.push_back(Sequence{s, std::move(g), {}, {}});
  }

  // Per-source gain sequences are independent of each other.
  const auto n = static_cast<std::int64_t>(seqs.size());
#pragma omp parallel for schedule(dynamic) if (n > 256)
  for (std::int64_t i = 0; i < n; ++i) {
    Sequence& seq = seqs[i];
    const SourceInfo& info = problem.Source(seq.source);
    SourceState state;
    for (const auto& c : seq.candidates) {
      SourceState next = Advance(problem.objective, info, state, c.p);
      seq.gains.push_back(MarginalGain(problem.objective, info, state, c.p));
      seq.states.push_back(next);
      state = next;
    }
  }

  // k-way merge of the per-source sequences.
  struct Head {
    std::size_t seq;
    std::size_t pos;
  };
  auto worse = [&](const Head& a, const Head& b) {
    const auto& sa = seqs[a.seq];
    const auto& sb = seqs[b.seq];
    return RanksBefore(sb.gains[b.pos], sb.candidates[b.pos], sa.gains[a.pos],
                       sa.candidates[a.pos]);
  };
  std::priority_queue<Head, std::vector<Head>, decltype(worse)> queue(worse);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (!seqs[i].candidates.empty()) queue.push({i, 0});
  }

  PlacementSolution solution;
  while (!queue.empty() &&
         solution.chosen.size() < static_cast<std::size_t>(problem.budget)) {
    const Head h = queue.top();
    queue.pop();
    const Sequence& seq = seqs[h.seq];
    const Candidate& c = seq.candidates[h.pos];
    solution.chosen.push_back({c.source, c.target, c.p, seq.gains[h.pos]});
    solution.per_source_state[seq.source] = seq.states[h.pos];
    if (h.pos + 1 < seq.candidates.size()) queue.push({h.seq, h.pos + 1});
  }
  const auto links = solution.links();
  solution.objective_value = ObjectiveValue(problem, links);
  return solution;
}

PlacementSolution BruteForcePlace(const PlacementProblem& problem) {
  problem.Validate();
  const auto& cands = problem.candidates;
  if (cands.size() > kBruteForceLimit) {
    throw Error(ErrorCode::kTooLarge,
                std::to_string(cands.size()) + " candidates exceed the limit of " +
                    std::to_string(kBruteForceLimit));
  }
  const std::uint32_t n = static_cast<std::uint32_t>(cands.size());
  const int k = std::min<int>(problem.budget, static_cast<int>(n));
  double best_value = -1.0;
  std::uint32_t best_mask = 0;
  std::vector<Link> subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > k) continue;
    subset.clear();
    std::map<std::string, int> per_source;
    bool capped = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        subset.push_back(cands[i].link());
        if (problem.max_per_source &&
            ++per_source[cands[i].source] > *problem.max_per_source) {
          capped = true;
        }
      }
    }
    if (capped) continue;
    const double value = ObjectiveValue(problem, subset);
    if (value > best_value) {
      best_value = value;
      best_mask = mask;
    }
  }

  std::vector<Candidate> chosen;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) chosen.push_back(cands[i]);
  }
  PlacementSolution solution;
  for (const auto& [s, group] : GroupBySource(chosen)) {
    const SourceInfo& info = problem.Source(s);
    SourceState state;
    for (const auto& c : group) {
      const SourceState next = Advance(problem.objective, info, state, c.p);
      solution.chosen.push_back(
          {c.source, c.target, c.p, next.contribution - state.contribution});
      state = next;
    }
    solution.per_source_state[s] = state;
  }
  solution.objective_value = std::max(best_value, 0.0);
  return solution;
}

PlacementProblem BuildProblem(std::span<const CandidateEstimate> estimates,
                              Method method, const TransitionStats& views,
                              const ClickthroughMatrix& existing,
                              Objective objective, int budget) {
  PlacementProblem problem;
  problem.objective = objective;
  problem.budget = budget;
  std::set<Link> seen;
  for (const auto& e : estimates) {
    if (e.method != method) continue;
    if (!seen.insert({e.source, e.target}).second) {
      throw Error(ErrorCode::kInvalidProblem,
                  "duplicate estimate " + e.source + " -> " + e.target);
    }
    if (!(e.estimate > 0.0)) continue;
    problem.candidates.push_back({e.source, e.target, e.estimate});
    if (!problem.sources.contains(e.source)) {
      SourceInfo info;
      info.weight = SourceWeight(views.Views(e.source));
      if (const auto sid = existing.pages.Find(e.source)) {
        std::vector<std::pair<PageId, double>> row;
        for (const auto& [key, p] : existing.entries) {
          if (LinkSource(key) == *sid) row.emplace_back(LinkTarget(key), p);
        }
        std::sort(row.begin(), row.end());
        for (const auto& [t, p] : row) info.prior += p;
      }
      problem.sources.emplace(e.source, info);
    }
  }
  problem.Validate();
  return problem;
}

std::string SolutionJsonl(const PlacementSolution& solution) {
  // "objective" is the running sum of gains up to and including the line.
  std::string out;
  double running = 0.0;
  int rank = 0;
  for (const auto& c : solution.chosen) {
    running += c.marginal_gain;
    Json j;
    j["rank"] = ++rank;
    j["source"] = c.source;
    j["target"] = c.target;
    j["p_est"] = c.p;
    j["marginal_gain"] = c.marginal_gain;
    j["objective"] = running;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::string ProblemToJson(const PlacementProblem& problem) {
  Json j;
  j["objective"] = ObjectiveName(problem.objective);
  j["budget"] = problem.budget;
  if (problem.max_per_source) j["max_per_source"] = *problem.max_per_source;
  Json cands = Json::array();
  for (const auto& c : problem.candidates) {
    cands.push_back({{"source", c.source}, {"target", c.target}, {"p", c.p}});
  }
  j["candidates"] = std::move(cands);
  Json sources = Json::object();
  for (const auto& [s, info] : problem.sources) {
    sources[s] = {{"weight", info.weight}, {"prior", info.prior}};
  }
  j["sources"] = std::move(sources);
  return j.dump();
}

PlacementProblem ProblemFromJson(std::string_view text) {
  PlacementProblem problem;
  try {
    const Json j = Json::parse(text);
    problem.objective = ParseObjective(j.value("objective", std::string("f1")));
    problem.budget = j.value("budget", 0);
    if (j.contains("max_per_source") && !j["max_per_source"].is_null()) {
      problem.max_per_source = j["max_per_source"].get<int>();
    }
    for (const auto& c : j.at("candidates")) {
      problem.candidates.push_back({c.at("source").get<std::string>(),
                                    c.at("target").get<std::string>(),
                                    c.at("p").get<double>()});
    }
    for (const auto& [s, info] : j.at("sources").items()) {
      problem.sources[s] = {info.value("weight", 0.0), info.value("prior", 0.0)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidProblem, std::string("bad problem: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidProblem, e.what());
  }
  problem.Validate();
  return problem;
}

}  // namespace linkforge
