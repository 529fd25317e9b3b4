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

// Synthetic browsing from a known ground-truth model. Used as the oracle
// for end-to-end recovery tests: traces go through the same log format as
// production data.

#ifndef LINKFORGE_SYNTH_GEN_HPP_
#define LINKFORGE_SYNTH_GEN_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkforge/link_placement.hpp"
#include "linkforge/trace_builder.hpp"

namespace linkforge {

enum class BrowsingMode { kSingleTab, kMultiTab };

struct ModelLink {
  std::string source;
  std::string target;
  double p = 0.0;

  friend bool operator==(const ModelLink&, const ModelLink&) = default;
};

// Demand for a link that does not exist. With probability p a visitor of
// `source` walks `via` (intermediate pages, ending in `target`) instead.
struct HiddenLink {
  std::string source;
  std::string target;
  double p = 0.0;
  std::vector<std::string> via;

  friend bool operator==(const HiddenLink&, const HiddenLink&) = default;
};

struct GroundTruthModel {
  std::vector<std::string> pages;
  std::vector<ModelLink> links;
  std::map<std::string, double> stops;
  BrowsingMode mode = BrowsingMode::kSingleTab;
  std::uint64_t seed = 1;
  std::vector<HiddenLink> hidden;

  // Single-tab: rescales each page's link and hidden probabilities so that
  // they sum to 1 − stop (a page without links always stops). Multi-tab:
  // checks every p ∈ [0, 1] and every column sum < 1.
  // Throws Error{kInvalidProblem}.
  void Normalize();

  friend bool operator==(const GroundTruthModel&,
                         const GroundTruthModel&) = default;
};

struct RandomModelOptions {
  int pages = 50;
  int out_degree = 4;
  double stop_min = 0.3;
  double stop_max = 0.6;
  // Link weights are log-uniform over [1, weight_range] before scaling to
  // 1 − stop, so larger values give more skewed clickthrough rates.
  double weight_range = 5.0;
  // Columns whose sum reaches this are scaled down; the freed mass goes to
  // the sources' stop probabilities.
  double column_limit = 0.4;
  BrowsingMode mode = BrowsingMode::kSingleTab;
  std::uint64_t seed = 1;
};

GroundTruthModel RandomModel(const RandomModelOptions& options);

struct GeneratedTraces {
  std::vector<NavigationTree> trees;
  std::int64_t truncated = 0;  // walks cut by max_depth
};

inline constexpr int kDefaultMaxDepth = 50;
inline constexpr Timestamp kDefaultStepGapMs = 10'000;
inline constexpr Timestamp kDefaultClockStart = 1'420'070'400'000;

// Walk i starts on a uniformly drawn page and uses its own generator derived
// from (model.seed, i). Views are numbered in depth-first order, stamped
// kDefaultClockStart + id * kDefaultStepGapMs, and each walk gets its own
// synthetic user.
GeneratedTraces GenerateTraces(const GroundTruthModel& model,
                               std::int64_t n_walks,
                               int max_depth = kDefaultMaxDepth);
GeneratedTraces GenerateTracesSerial(const GroundTruthModel& model,
                                     std::int64_t n_walks,
                                     int max_depth = kDefaultMaxDepth);

// Re-stamps views as clock_start + id * gap_ms.
std::vector<NavigationTree> Restamp(std::span<const NavigationTree> trees,
                                    Timestamp clock_start, Timestamp gap_ms);

// Seven-column log lines, one per view, in tree order.
std::vector<std::string> EmitSyntheticLog(std::span<const NavigationTree> trees,
                                          Timestamp clock_start = kDefaultClockStart,
                                          Timestamp gap_ms = kDefaultStepGapMs);

struct HideResult {
  GroundTruthModel model;
  std::vector<ModelLink> ground_truth;
};

// Removes `links` from the model and routes their demand along the
// shortest remaining path. Throws Error{kDisconnectedPair} or
// Error{kInvalidProblem} for a pair that is not a model link.
HideResult HideLinks(const GroundTruthModel& model,
                     std::span<const Link> links);

// Picks up to `count` links whose endpoints stay connected once all of them
// are removed, at most one per source. With max_route > 0 every detour must
// take at most that many clicks.
std::vector<Link> ChooseHideableLinks(const GroundTruthModel& model, int count,
                                      std::uint64_t seed, int max_route = 0);

std::string ModelToJson(const GroundTruthModel& model);
GroundTruthModel ModelFromJson(std::string_view text);

// TSV: source, target, p.
std::string GroundTruthTsv(std::span<const ModelLink> rows);
std::vector<ModelLink> ParseGroundTruthTsv(const std::string& contents);

}  // namespace linkforge

#endif  // LINKFORGE_SYNTH_GEN_HPP_
