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

#ifndef LINKFORGE_TRANSITION_STATS_HPP_
#define LINKFORGE_TRANSITION_STATS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "linkforge/trace_builder.hpp"

namespace linkforge {

using PageId = std::uint32_t;
using Count = std::int64_t;

// Packs (source, target) into one hashable key.
constexpr std::uint64_t LinkKey(PageId s, PageId t) {
  return (static_cast<std::uint64_t>(s) << 32) | t;
}
constexpr PageId LinkSource(std::uint64_t key) {
  return static_cast<PageId>(key >> 32);
}
constexpr PageId LinkTarget(std::uint64_t key) {
  return static_cast<PageId>(key & 0xffffffffu);
}

// String interning for page identifiers.
class PageTable {
 public:
  PageId Intern(std::string_view page);
  std::optional<PageId> Find(std::string_view page) const;
  const std::string& Name(PageId id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, PageId> ids_;
};

using PageCounts = std::unordered_map<PageId, Count>;
using PairCounts = std::unordered_map<std::uint64_t, Count>;

struct TimeWindow {
  Timestamp first = 0;
  Timestamp last = 0;
};

struct TransitionStats {
  PageTable pages;
  PageCounts page_views;    // c_s
  PageCounts stops;         // c_s∅
  PairCounts direct;        // c_st
  PairCounts path_counts;   // P_st
  PairCounts search_counts;
  std::unordered_set<std::uint64_t> graph_links;  // E
  std::optional<TimeWindow> window;
  // Depth-1 transitions over pairs absent from a supplied link set.
  Count link_anomalies = 0;

  Count Views(std::string_view s) const;
  Count Stops(std::string_view s) const;
  Count Direct(std::string_view s, std::string_view t) const;
  Count Paths(std::string_view s, std::string_view t) const;
  Count Searches(std::string_view s, std::string_view t) const;
  bool HasLink(std::string_view s, std::string_view t) const;
};

// Order-independent comparison of two stats objects (ids may differ).
bool Equivalent(const TransitionStats& a, const TransitionStats& b);

enum class PathSource { kTrees, kSessions };
enum class PathCountMode { kPerBranch, kPerView };

struct AccumulateOptions {
  PathSource path_source = PathSource::kTrees;
  PathCountMode path_mode = PathCountMode::kPerBranch;
  // Known hyperlinks in addition to the ones implied by direct transitions.
  std::vector<std::pair<std::string, std::string>> existing_links;
};

// Throws Error{kWindowMismatch} when non-empty inputs cover disjoint time
// ranges. Shards trees across threads and merges.
TransitionStats Accumulate(std::span<const NavigationTree> trees,
                           std::span<const Session> sessions,
                           std::span<const SearchEvent> searches,
                           const AccumulateOptions& options = {});

// Single-threaded reference path; must agree with Accumulate exactly.
TransitionStats AccumulateSerial(std::span<const NavigationTree> trees,
                                 std::span<const Session> sessions,
                                 std::span<const SearchEvent> searches,
                                 const AccumulateOptions& options = {});

// Field-wise sum; `into` keeps its ids and absorbs `other`'s.
void Merge(TransitionStats& into, const TransitionStats& other);

struct ClickthroughMatrix {
  PageTable pages;
  std::unordered_map<std::uint64_t, double> entries;  // p_st on E
  std::unordered_map<PageId, double> stop;             // p_s∅

  double P(std::string_view s, std::string_view t) const;
  double Stop(std::string_view s) const;
};

// p_st = c_st / c_s. Throws Error{kZeroViews}.
ClickthroughMatrix BuildClickthroughMatrix(const TransitionStats& stats);

// Σ_t c_st / (c_s − c_s∅). Throws Error{kAllStops}.
double NavigationalDegree(const TransitionStats& stats, std::string_view s);

// TSV writers, rows sorted by page name.
std::string TransitionsTsv(const TransitionStats& stats);   // s t c_st
std::string PathCountsTsv(const TransitionStats& stats);    // s t P_st
std::string SearchCountsTsv(const TransitionStats& stats);  // s t count
std::string PageViewsTsv(const TransitionStats& stats);     // s c_s c_s∅
std::string LinksTsv(const TransitionStats& stats);         // s t
std::string ClickthroughTsv(const ClickthroughMatrix& m);   // s t p_st

struct StatsFiles {
  std::string transitions;
  std::string path_counts;
  std::string search_counts;
  std::string page_views;
  std::string links;
};

void WriteStats(const TransitionStats& stats, const StatsFiles& files);
// Missing optional files (empty path) load as empty tables.
TransitionStats LoadStats(const StatsFiles& files);

// Loads a pairwise transition TSV on its own. c_s becomes the row sum plus
// any "<stop>" pseudo-target row, which is also recorded as c_s∅.
TransitionStats LoadTransitionsOnly(const std::string& path);

inline constexpr std::string_view kStopToken = "<stop>";

}  // namespace linkforge

#endif  // LINKFORGE_TRANSITION_STATS_HPP_
