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

#include "linkforge/trace_builder.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"

namespace linkforge {
namespace {

using Json = nlohmann::json;

// Referer page for tree joins, or nullopt when the request starts a tree.
std::optional<std::string> InternalRefererPage(const LogRecord& r) {
  if (r.referer.empty() || !UrlHost(r.referer).empty()) return std::nullopt;
  return PageIdentifier(r.referer);
}

std::vector<const LogRecord*> ContentViews(std::span<const LogRecord> records,
                                           const TraceConfig& config) {
  std::vector<const LogRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!IsInternalSearch(r.url, config)) out.push_back(&r);
  }
  return out;
}

// Turns a parent assignment (index into `views`, -1 for roots) into trees,
// ordered by root position.
std::vector<NavigationTree> AssembleForest(
    const std::vector<const LogRecord*>& views, const std::vector<int>& parent,
    const UserId& user) {
  const int n = static_cast<int>(views.size());
  std::vector<int> tree_of(n, -1);
  std::vector<int> local_id(n, -1);
  std::vector<NavigationTree> forest;
  for (int i = 0; i < n; ++i) {
    PageView v;
    v.page = PageIdentifier(views[i]->url);
    v.timestamp = views[i]->timestamp;
    if (parent[i] < 0) {
      tree_of[i] = static_cast<int>(forest.size());
      forest.push_back(NavigationTree{user, {}, 0});
    } else {
      tree_of[i] = tree_of[parent[i]];
      v.parent = local_id[parent[i]];
    }
    auto& tree = forest[tree_of[i]];
    v.id = static_cast<int>(tree.views.size());
    local_id[i] = v.id;
    if (v.parent) tree.views[*v.parent].children.push_back(v.id);
    tree.views.push_back(std::move(v));
  }
  return forest;
}

Json ViewsToJson(const std::vector<PageView>& views) {
  Json arr = Json::array();
  for (const auto& v : views) {
    Json j;
    j["id"] = v.id;
    j["page"] = v.page;
    j["ts"] = v.timestamp;
    j["parent"] = v.parent ? Json(*v.parent) : Json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

bool IsInternalSearch(std::string_view url, const TraceConfig& config) {
  return !config.internal_search_pattern.empty() &&
         url.starts_with(config.internal_search_pattern);
}

bool IsSearchEngineHost(std::string_view host,
                        const std::set<std::string>& engine_domains) {
  for (const auto& d : engine_domains) {
    if (host == d) return true;
    if (host.size() > d.size() && host.ends_with(d) &&
        host[host.size() - d.size() - 1] == '.') {
      return true;
    }
  }
  return false;
}

std::vector<NavigationTree> BuildTrees(std::span<const LogRecord> records,
                                       const UserId& user,
                                       const TraceConfig& config) {
  const auto views = ContentViews(records, config);
  const int n = static_cast<int>(views.size());
  std::vector<int> parent(n, -1);
  // Latest view index per page; input order breaks timestamp ties.
  std::unordered_map<std::string, int> latest;
  for (int i = 0; i < n; ++i) {
    if (auto ref = InternalRefererPage(*views[i])) {
      if (auto it = latest.find(*ref); it != latest.end()) {
        const Timestamp gap = views[i]->timestamp - views[it->second]->timestamp;
        if (gap >= 0 && gap <= config.lookback_ms) parent[i] = it->second;
      }
    }
    latest[PageIdentifier(views[i]->url)] = i;
  }
  return AssembleForest(views, parent, user);
}

std::vector<NavigationTree> MstOracle(std::span<const LogRecord> records,
                                      const UserId& user,
                                      const TraceConfig& config) {
  const auto views = ContentViews(records, config);
  const int n = static_cast<int>(views.size());
  std::vector<int> parent(n, -1);
  for (int i = 0; i < n; ++i) {
    const auto ref = InternalRefererPage(*views[i]);
    if (!ref) continue;
    Timestamp best = std::numeric_limits<Timestamp>::max();
    for (int j = 0; j < i; ++j) {
      if (PageIdentifier(views[j]->url) != *ref) continue;
      const Timestamp w = views[i]->timestamp - views[j]->timestamp;
      if (w < 0 || w > config.lookback_ms) continue;
      if (w <= best) {  // <= keeps the later-ingested parent on ties
        best = w;
        parent[i] = j;
      }
    }
  }
  return AssembleForest(views, parent, user);
}

Timestamp TotalEdgeWeight(std::span<const NavigationTree> forest) {
  Timestamp total = 0;
  for (const auto& tree : forest) {
    for (const auto& v : tree.views) {
      if (v.parent) total += v.timestamp - tree.views[*v.parent].timestamp;
    }
  }
  return total;
}

std::vector<SearchEvent> MineSearchEvents(std::span<const LogRecord> records,
                                          const TraceConfig& config) {
  std::vector<SearchEvent> events;
  const LogRecord* previous_view = nullptr;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LogRecord& r = records[i];
    if (IsInternalSearch(r.url, config)) {
      if (r.referer.empty() || !UrlHost(r.referer).empty()) continue;
      const std::string source = PageIdentifier(r.referer);
      for (std::size_t j = i + 1; j < records.size(); ++j) {
        const LogRecord& next = records[j];
        if (next.timestamp - r.timestamp > config.lookback_ms) break;
        if (IsInternalSearch(next.url, config)) continue;
        if (next.referer == r.url) {
          events.push_back(SearchEvent{source, PageIdentifier(next.url),
                                       SearchKind::kInternal, next.timestamp});
          break;
        }
      }
      continue;
    }
    const std::string host = UrlHost(r.referer);
    if (!host.empty() && IsSearchEngineHost(host, config.engine_domains)) {
      const LogRecord* source = previous_view;
      if (source != nullptr) {
        const Timestamp gap = r.timestamp - source->timestamp;
        if (gap > 0 && gap <= kExternalSearchWindowMs) {
          events.push_back(SearchEvent{PageIdentifier(source->url),
                                       PageIdentifier(r.url),
                                       SearchKind::kExternal, r.timestamp});
        }
      }
    }
    previous_view = &r;
  }
  return events;
}

std::vector<Session> Sessionize(std::span<const LogRecord> records,
                                const UserId& user,
                                const TraceConfig& config) {
  std::vector<Session> sessions;
  Timestamp last = 0;
  for (const auto& r : records) {
    if (IsInternalSearch(r.url, config)) continue;
    if (sessions.empty() || r.timestamp - last > config.session_gap_ms) {
      sessions.push_back(Session{user, {}, {}});
    }
    sessions.back().views.push_back(PageIdentifier(r.url));
    sessions.back().timestamps.push_back(r.timestamp);
    last = r.timestamp;
  }
  return sessions;
}

TraceResult BuildTraces(std::span<const IngestedRecord> records,
                        const TraceConfig& config) {
  // User ranges in the sorted input.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    while (j < records.size() && records[j].user == records[i].user) ++j;
    ranges.emplace_back(i, j);
    i = j;
  }
  const auto users = static_cast<std::int64_t>(ranges.size());
  std::vector<TraceResult> per_user(ranges.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t u = 0; u < users; ++u) {
    const auto [begin, end] = ranges[u];
    std::vector<LogRecord> recs;
    recs.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) recs.push_back(records[i].record);
    const UserId& user = records[begin].user;
    per_user[u].trees = BuildTrees(recs, user, config);
    per_user[u].sessions = Sessionize(recs, user, config);
    per_user[u].searches = MineSearchEvents(recs, config);
  }
  TraceResult out;
  for (auto& r : per_user) {
    std::move(r.trees.begin(), r.trees.end(), std::back_inserter(out.trees));
    std::move(r.sessions.begin(), r.sessions.end(),
              std::back_inserter(out.sessions));
    std::move(r.searches.begin(), r.searches.end(),
              std::back_inserter(out.searches));
  }
  return out;
}

std::string TreeToJson(const NavigationTree& tree) {
  Json j;
  j["user"] = tree.user.digest;
  j["root"] = tree.root;
  j["views"] = ViewsToJson(tree.views);
  return j.dump();
}

NavigationTree TreeFromJson(std::string_view line) {
  NavigationTree tree;
  try {
    const Json j = Json::parse(line);
    tree.user.digest = j.at("user").get<std::string>();
    tree.root = j.at("root").get<int>();
    for (const auto& v : j.at("views")) {
      PageView view;
      view.id = v.at("id").get<int>();
      view.page = v.at("page").get<std::string>();
      view.timestamp = v.at("ts").get<Timestamp>();
      if (!v.at("parent").is_null()) view.parent = v.at("parent").get<int>();
      if (view.id != static_cast<int>(tree.views.size()) ||
          (view.parent && (*view.parent < 0 || *view.parent >= view.id))) {
        throw Error(ErrorCode::kMalformedLine, "tree views out of order");
      }
      if (view.parent) tree.views[*view.parent].children.push_back(view.id);
      tree.views.push_back(std::move(view));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedLine, std::string("bad tree: ") + e.what());
  }
  if (tree.views.empty()) throw Error(ErrorCode::kMalformedLine, "empty tree");
  return tree;
}

std::string SessionToJson(const Session& session) {
  std::vector<PageView> views;
  for (std::size_t i = 0; i < session.views.size(); ++i) {
    PageView v;
    v.id = static_cast<int>(i);
    v.page = session.views[i];
    v.timestamp = session.timestamps[i];
    if (i > 0) v.parent = static_cast<int>(i) - 1;
    views.push_back(std::move(v));
  }
  Json j;
  j["user"] = session.user.digest;
  j["root"] = 0;
  j["views"] = ViewsToJson(views);
  return j.dump();
}

Session SessionFromJson(std::string_view line) {
  const NavigationTree chain = TreeFromJson(line);
  Session s;
  s.user = chain.user;
  for (const auto& v : chain.views) {
    s.views.push_back(v.page);
    s.timestamps.push_back(v.timestamp);
  }
  return s;
}

std::string SearchEventToTsv(const SearchEvent& e) {
  return e.source + "\t" + e.target + "\t" +
         (e.kind == SearchKind::kInternal ? "internal" : "external") + "\t" +
         std::to_string(e.timestamp);
}

SearchEvent SearchEventFromTsv(std::string_view line) {
  const auto cols = SplitTabs(line);
  if (cols.size() != 4) {
    throw Error(ErrorCode::kMalformedLine, "search event needs 4 columns");
  }
  SearchEvent e;
  e.source = cols[0];
  e.target = cols[1];
  if (cols[2] == "internal") {
    e.kind = SearchKind::kInternal;
  } else if (cols[2] == "external") {
    e.kind = SearchKind::kExternal;
  } else {
    throw Error(ErrorCode::kMalformedLine, "unknown search kind");
  }
  e.timestamp = ParseInt(cols[3]);
  return e;
}

}  // namespace linkforge
