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

// Per-user reconstruction of navigation trees, sessions and search events
// from time-ordered requests.

#ifndef LINKFORGE_TRACE_BUILDER_HPP_
#define LINKFORGE_TRACE_BUILDER_HPP_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkforge/log_ingest.hpp"

namespace linkforge {

inline constexpr Timestamp kExternalSearchWindowMs = 5 * 60 * 1000;
inline constexpr Timestamp kSessionGapMs = 60 * 60 * 1000;

struct PageView {
  int id = 0;
  std::string page;
  Timestamp timestamp = 0;
  std::optional<int> parent;
  std::vector<int> children;

  friend bool operator==(const PageView&, const PageView&) = default;
};

// Views are stored in topological order; a view's id is its index.
struct NavigationTree {
  UserId user;
  std::vector<PageView> views;
  int root = 0;

  friend bool operator==(const NavigationTree&, const NavigationTree&) = default;
};

enum class SearchKind { kInternal, kExternal };

struct SearchEvent {
  std::string source;
  std::string target;
  SearchKind kind = SearchKind::kExternal;
  Timestamp timestamp = 0;

  friend bool operator==(const SearchEvent&, const SearchEvent&) = default;
};

struct Session {
  UserId user;
  std::vector<std::string> views;
  std::vector<Timestamp> timestamps;

  friend bool operator==(const Session&, const Session&) = default;
};

struct TraceConfig {
  std::set<std::string> engine_domains = {"google.com", "bing.com",
                                          "yahoo.com", "duckduckgo.com"};
  std::string internal_search_pattern = "/search?q=";
  Timestamp session_gap_ms = kSessionGapMs;
  // Referers older than this never become parents.
  Timestamp lookback_ms = kSessionGapMs;
};

bool IsInternalSearch(std::string_view url, const TraceConfig& config);
bool IsSearchEngineHost(std::string_view host,
                        const std::set<std::string>& engine_domains);

// Attaches each request to the most recent earlier view of its referer page.
// Requests with empty, external or unmatched referers start new trees.
std::vector<NavigationTree> BuildTrees(std::span<const LogRecord> records,
                                       const UserId& user,
                                       const TraceConfig& config = {});

// Builds the full candidate-parent DAG (edge weight = time difference) and
// keeps every node's minimum-weight parent. Quadratic; a test oracle.
std::vector<NavigationTree> MstOracle(std::span<const LogRecord> records,
                                      const UserId& user,
                                      const TraceConfig& config = {});

// Sum of parent-to-child time differences across a forest.
Timestamp TotalEdgeWeight(std::span<const NavigationTree> forest);

std::vector<SearchEvent> MineSearchEvents(std::span<const LogRecord> records,
                                          const TraceConfig& config = {});

std::vector<Session> Sessionize(std::span<const LogRecord> records,
                                const UserId& user,
                                const TraceConfig& config = {});

struct TraceResult {
  std::vector<NavigationTree> trees;
  std::vector<Session> sessions;
  std::vector<SearchEvent> searches;
};

// Groups the (user, timestamp)-sorted records by user and processes users in
// parallel. Output order follows user order, so it is deterministic.
TraceResult BuildTraces(std::span<const IngestedRecord> records,
                        const TraceConfig& config = {});

// JSONL: {"user","root","views":[{"id","page","ts","parent"}]}.
std::string TreeToJson(const NavigationTree& tree);
NavigationTree TreeFromJson(std::string_view line);
// Sessions share the tree schema as a chain.
std::string SessionToJson(const Session& session);
Session SessionFromJson(std::string_view line);

// TSV: source, target, kind, timestamp.
std::string SearchEventToTsv(const SearchEvent& e);
SearchEvent SearchEventFromTsv(std::string_view line);

}  // namespace linkforge

#endif  // LINKFORGE_TRACE_BUILDER_HPP_
