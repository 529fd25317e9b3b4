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

#include "linkforge/transition_stats.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"

namespace linkforge {

PageId PageTable::Intern(std::string_view page) {
  if (auto it = ids_.find(std::string(page)); it != ids_.end()) {
    return it->second;
  }
  const auto id = static_cast<PageId>(names_.size());
  names_.emplace_back(page);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<PageId> PageTable::Find(std::string_view page) const {
  if (auto it = ids_.find(std::string(page)); it != ids_.end()) {
    return it->second;
  }
  return std::nullopt;
}

namespace {

Count Lookup(const PageCounts& m, std::optional<PageId> id) {
  if (!id) return 0;
  auto it = m.find(*id);
  return it == m.end() ? 0 : it->second;
}

Count Lookup(const PairCounts& m, std::optional<PageId> s,
             std::optional<PageId> t) {
  if (!s || !t) return 0;
  auto it = m.find(LinkKey(*s, *t));
  return it == m.end() ? 0 : it->second;
}

void Extend(std::optional<TimeWindow>& w, Timestamp ts) {
  if (!w) {
    w = TimeWindow{ts, ts};
  } else {
    w->first = std::min(w->first, ts);
    w->last = std::max(w->last, ts);
  }
}

bool Disjoint(const std::optional<TimeWindow>& a,
              const std::optional<TimeWindow>& b) {
  if (!a || !b) return false;
  return a->last < b->first || b->last < a->first;
}

// Counts first occurrences of each page below `start` at depth >= 2, one per
// branch. Depth-1 children and the start page block their own subtrees.
void CountPathsFrom(const NavigationTree& tree, int start,
                    const std::vector<PageId>& ids, PathCountMode mode,
                    PairCounts& out) {
  const PageId s = ids[start];
  std::unordered_map<PageId, int> on_path;  // pages strictly below start
  std::unordered_set<PageId> seen_this_view;
  struct Frame {
    int view;
    int depth;
    std::size_t next_child;
  };
  std::vector<Frame> stack;
  stack.push_back({start, 0, 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& children = tree.views[f.view].children;
    if (f.next_child == children.size()) {
      if (f.depth > 0 && --on_path[ids[f.view]] == 0) on_path.erase(ids[f.view]);
      stack.pop_back();
      continue;
    }
    const int child = children[f.next_child++];
    const int depth = f.depth + 1;
    const PageId t = ids[child];
    if (depth >= 2 && t != s && !on_path.contains(t)) {
      if (mode == PathCountMode::kPerBranch || seen_this_view.insert(t).second) {
        ++out[LinkKey(s, t)];
      }
    }
    ++on_path[t];
    stack.push_back({child, depth, 0});
  }
}

void AddTree(TransitionStats& st, const NavigationTree& tree,
             const AccumulateOptions& options) {
  std::vector<PageId> ids;
  ids.reserve(tree.views.size());
  for (const auto& v : tree.views) {
    ids.push_back(st.pages.Intern(v.page));
    Extend(st.window, v.timestamp);
  }
  for (std::size_t i = 0; i < tree.views.size(); ++i) {
    const auto& v = tree.views[i];
    ++st.page_views[ids[i]];
    if (v.children.empty()) ++st.stops[ids[i]];
    for (int c : v.children) {
      const auto key = LinkKey(ids[i], ids[c]);
      ++st.direct[key];
      st.graph_links.insert(key);
    }
  }
  if (options.path_source == PathSource::kTrees) {
    for (std::size_t i = 0; i < tree.views.size(); ++i) {
      if (!tree.views[i].children.empty()) {
        CountPathsFrom(tree, static_cast<int>(i), ids, options.path_mode,
                       st.path_counts);
      }
    }
  }
}

void AddSession(TransitionStats& st, const Session& session) {
  std::vector<PageId> ids;
  for (const auto& page : session.views) ids.push_back(st.pages.Intern(page));
  std::unordered_set<std::uint64_t> pairs;
  std::unordered_set<PageId> before;
  for (PageId t : ids) {
    for (PageId s : before) {
      if (s != t) pairs.insert(LinkKey(s, t));
    }
    before.insert(t);
  }
  for (auto key : pairs) ++st.path_counts[key];
}

std::optional<TimeWindow> SessionWindow(std::span<const Session> sessions) {
  std::optional<TimeWindow> w;
  for (const auto& s : sessions) {
    for (auto ts : s.timestamps) Extend(w, ts);
  }
  return w;
}

std::optional<TimeWindow> SearchWindow(std::span<const SearchEvent> searches) {
  std::optional<TimeWindow> w;
  for (const auto& e : searches) Extend(w, e.timestamp);
  return w;
}

std::optional<TimeWindow> TreeWindow(std::span<const NavigationTree> trees) {
  std::optional<TimeWindow> w;
  for (const auto& t : trees) {
    for (const auto& v : t.views) Extend(w, v.timestamp);
  }
  return w;
}

void CheckWindows(std::span<const NavigationTree> trees,
                  std::span<const Session> sessions,
                  std::span<const SearchEvent> searches) {
  const auto tw = TreeWindow(trees);
  const auto sw = SessionWindow(sessions);
  const auto ew = SearchWindow(searches);
  if (Disjoint(tw, sw) || Disjoint(tw, ew) || Disjoint(sw, ew)) {
    throw Error(ErrorCode::kWindowMismatch,
                "trees, sessions and search events cover disjoint time ranges");
  }
}

// Everything except the tree pass.
void AddSideInputs(TransitionStats& st, std::span<const Session> sessions,
                   std::span<const SearchEvent> searches,
                   const AccumulateOptions& options) {
  if (options.path_source == PathSource::kSessions) {
    for (const auto& s : sessions) AddSession(st, s);
  }
  for (const auto& s : sessions) {
    for (auto ts : s.timestamps) Extend(st.window, ts);
  }
  for (const auto& e : searches) {
    ++st.search_counts[LinkKey(st.pages.Intern(e.source),
                               st.pages.Intern(e.target))];
    Extend(st.window, e.timestamp);
  }
}

void ApplyExistingLinks(TransitionStats& st, const AccumulateOptions& options) {
  if (options.existing_links.empty()) return;
  std::unordered_set<std::uint64_t> supplied;
  for (const auto& [s, t] : options.existing_links) {
    supplied.insert(LinkKey(st.pages.Intern(s), st.pages.Intern(t)));
  }
  for (const auto& [key, c] : st.direct) {
    if (!supplied.contains(key)) st.link_anomalies += c;
  }
  st.graph_links.insert(supplied.begin(), supplied.end());
}

}  // namespace

Count TransitionStats::Views(std::string_view s) const {
  return Lookup(page_views, pages.Find(s));
}
Count TransitionStats::Stops(std::string_view s) const {
  return Lookup(stops, pages.Find(s));
}
Count TransitionStats::Direct(std::string_view s, std::string_view t) const {
  return Lookup(direct, pages.Find(s), pages.Find(t));
}
Count TransitionStats::Paths(std::string_view s, std::string_view t) const {
  return Lookup(path_counts, pages.Find(s), pages.Find(t));
}
Count TransitionStats::Searches(std::string_view s, std::string_view t) const {
  return Lookup(search_counts, pages.Find(s), pages.Find(t));
}
bool TransitionStats::HasLink(std::string_view s, std::string_view t) const {
  const auto si = pages.Find(s);
  const auto ti = pages.Find(t);
  return si && ti && graph_links.contains(LinkKey(*si, *ti));
}

void Merge(TransitionStats& into, const TransitionStats& other) {
  std::vector<PageId> remap(other.pages.size());
  for (PageId i = 0; i < other.pages.size(); ++i) {
    remap[i] = into.pages.Intern(other.pages.Name(i));
  }
  auto pair = [&](std::uint64_t key) {
    return LinkKey(remap[LinkSource(key)], remap[LinkTarget(key)]);
  };
  for (const auto& [p, c] : other.page_views) into.page_views[remap[p]] += c;
  for (const auto& [p, c] : other.stops) into.stops[remap[p]] += c;
  for (const auto& [k, c] : other.direct) into.direct[pair(k)] += c;
  for (const auto& [k, c] : other.path_counts) into.path_counts[pair(k)] += c;
  for (const auto& [k, c] : other.search_counts) {
    into.search_counts[pair(k)] += c;
  }
  for (auto k : other.graph_links) into.graph_links.insert(pair(k));
  if (other.window) {
    Extend(into.window, other.window->first);
    Extend(into.window, other.window->last);
  }
  into.link_anomalies += other.link_anomalies;
}

namespace {

using NamedCounts = std::map<std::string, Count>;
using NamedPairs = std::map<std::pair<std::string, std::string>, Count>;

NamedCounts Named(const PageTable& pages, const PageCounts& m) {
  NamedCounts out;
  for (const auto& [p, c] : m) {
    if (c != 0) out[pages.Name(p)] = c;
  }
  return out;
}

NamedPairs Named(const PageTable& pages, const PairCounts& m) {
  NamedPairs out;
  for (const auto& [k, c] : m) {
    if (c != 0) {
      out[{pages.Name(LinkSource(k)), pages.Name(LinkTarget(k))}] = c;
    }
  }
  return out;
}

std::set<std::pair<std::string, std::string>> NamedLinks(
    const TransitionStats& st) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto k : st.graph_links) {
    out.emplace(st.pages.Name(LinkSource(k)), st.pages.Name(LinkTarget(k)));
  }
  return out;
}

}  // namespace

bool Equivalent(const TransitionStats& a, const TransitionStats& b) {
  return Named(a.pages, a.page_views) == Named(b.pages, b.page_views) &&
         Named(a.pages, a.stops) == Named(b.pages, b.stops) &&
         Named(a.pages, a.direct) == Named(b.pages, b.direct) &&
         Named(a.pages, a.path_counts) == Named(b.pages, b.path_counts) &&
         Named(a.pages, a.search_counts) == Named(b.pages, b.search_counts) &&
         NamedLinks(a) == NamedLinks(b);
}

TransitionStats AccumulateSerial(std::span<const NavigationTree> trees,
                                 std::span<const Session> sessions,
                                 std::span<const SearchEvent> searches,
                                 const AccumulateOptions& options) {
  CheckWindows(trees, sessions, searches);
  TransitionStats st;
  for (const auto& tree : trees) AddTree(st, tree, options);
  AddSideInputs(st, sessions, searches, options);
  ApplyExistingLinks(st, options);
  return st;
}

TransitionStats Accumulate(std::span<const NavigationTree> trees,
                           std::span<const Session> sessions,
                           std::span<const SearchEvent> searches,
                           const AccumulateOptions& options) {
  CheckWindows(trees, sessions, searches);
  int shards = 1;
#ifdef _OPENMP
  shards = std::max(1, omp_get_max_threads());
#endif
  const std::size_t n = trees.size();
  shards = static_cast<int>(std::min<std::size_t>(shards, std::max<std::size_t>(n, 1)));
  std::vector<TransitionStats> partial(shards);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < shards; ++i) {
    const std::size_t begin = n * i / shards;
    const std::size_t end = n * (i + 1) / shards;
    for (std::size_t j = begin; j < end; ++j) {
      AddTree(partial[i], trees[j], options);
    }
  }
  TransitionStats st = std::move(partial[0]);
  for (int i = 1; i < shards; ++i) Merge(st, partial[i]);
  AddSideInputs(st, sessions, searches, options);
  ApplyExistingLinks(st, options);
  return st;
}

double ClickthroughMatrix::P(std::string_view s, std::string_view t) const {
  const auto si = pages.Find(s);
  const auto ti = pages.Find(t);
  if (!si || !ti) return 0.0;
  auto it = entries.find(LinkKey(*si, *ti));
  return it == entries.end() ? 0.0 : it->second;
}

double ClickthroughMatrix::Stop(std::string_view s) const {
  const auto si = pages.Find(s);
  if (!si) return 0.0;
  auto it = stop.find(*si);
  return it == stop.end() ? 0.0 : it->second;
}

ClickthroughMatrix BuildClickthroughMatrix(const TransitionStats& stats) {
  ClickthroughMatrix m;
  m.pages = stats.pages;
  for (const auto& [key, c] : stats.direct) {
    const Count views = Lookup(stats.page_views, LinkSource(key));
    if (views <= 0) {
      if (c == 0) continue;
      throw Error(ErrorCode::kZeroViews,
                  "transitions out of '" + stats.pages.Name(LinkSource(key)) +
                      "' without page views");
    }
    m.entries[key] = static_cast<double>(c) / static_cast<double>(views);
  }
  for (const auto& [p, views] : stats.page_views) {
    if (views > 0) {
      m.stop[p] = static_cast<double>(Lookup(stats.stops, p)) /
                  static_cast<double>(views);
    }
  }
  return m;
}

double NavigationalDegree(const TransitionStats& stats, std::string_view s) {
  const auto id = stats.pages.Find(s);
  const Count views = Lookup(stats.page_views, id);
  const Count stops = Lookup(stats.stops, id);
  if (views - stops <= 0) {
    throw Error(ErrorCode::kAllStops,
                "every view of '" + std::string(s) + "' stops");
  }
  Count clicks = 0;
  for (const auto& [key, c] : stats.direct) {
    if (LinkSource(key) == *id) clicks += c;
  }
  return static_cast<double>(clicks) / static_cast<double>(views - stops);
}

namespace {

std::string PairTsv(const PageTable& pages, const PairCounts& m) {
  std::string out;
  for (const auto& [k, c] : Named(pages, m)) {
    out += k.first + "\t" + k.second + "\t" + std::to_string(c) + "\n";
  }
  return out;
}

void ReadPairTsv(const std::string& path, TransitionStats& st, PairCounts& m) {
  if (path.empty()) return;
  for (const auto& line : ReadLines(path)) {
    if (line.empty()) continue;
    const auto cols = SplitTabs(line);
    if (cols.size() != 3) {
      throw Error(ErrorCode::kMalformedLine, path + ": expected 3 columns");
    }
    m[LinkKey(st.pages.Intern(cols[0]), st.pages.Intern(cols[1]))] +=
        ParseInt(cols[2]);
  }
}

}  // namespace

std::string TransitionsTsv(const TransitionStats& stats) {
  return PairTsv(stats.pages, stats.direct);
}
std::string PathCountsTsv(const TransitionStats& stats) {
  return PairTsv(stats.pages, stats.path_counts);
}
std::string SearchCountsTsv(const TransitionStats& stats) {
  return PairTsv(stats.pages, stats.search_counts);
}

std::string PageViewsTsv(const TransitionStats& stats) {
  std::map<std::string, std::pair<Count, Count>> rows;
  for (const auto& [p, c] : stats.page_views) rows[stats.pages.Name(p)].first = c;
  for (const auto& [p, c] : stats.stops) rows[stats.pages.Name(p)].second = c;
  std::string out;
  for (const auto& [page, vs] : rows) {
    out += page + "\t" + std::to_string(vs.first) + "\t" +
           std::to_string(vs.second) + "\n";
  }
  return out;
}

std::string LinksTsv(const TransitionStats& stats) {
  std::string out;
  for (const auto& [s, t] : NamedLinks(stats)) out += s + "\t" + t + "\n";
  return out;
}

std::string ClickthroughTsv(const ClickthroughMatrix& m) {
  std::map<std::pair<std::string, std::string>, double> rows;
  for (const auto& [k, p] : m.entries) {
    rows[{m.pages.Name(LinkSource(k)), m.pages.Name(LinkTarget(k))}] = p;
  }
  std::string out;
  for (const auto& [k, p] : rows) {
    out += k.first + "\t" + k.second + "\t" + FormatDouble(p) + "\n";
  }
  return out;
}

void WriteStats(const TransitionStats& stats, const StatsFiles& files) {
  if (!files.transitions.empty()) {
    WriteFileAtomic(files.transitions, TransitionsTsv(stats));
  }
  if (!files.path_counts.empty()) {
    WriteFileAtomic(files.path_counts, PathCountsTsv(stats));
  }
  if (!files.search_counts.empty()) {
    WriteFileAtomic(files.search_counts, SearchCountsTsv(stats));
  }
  if (!files.page_views.empty()) {
    WriteFileAtomic(files.page_views, PageViewsTsv(stats));
  }
  if (!files.links.empty()) WriteFileAtomic(files.links, LinksTsv(stats));
}

TransitionStats LoadStats(const StatsFiles& files) {
  TransitionStats st;
  if (!files.page_views.empty()) {
    for (const auto& line : ReadLines(files.page_views)) {
      if (line.empty()) continue;
      const auto cols = SplitTabs(line);
      if (cols.size() != 3) {
        throw Error(ErrorCode::kMalformedLine,
                    files.page_views + ": expected 3 columns");
      }
      const PageId p = st.pages.Intern(cols[0]);
      st.page_views[p] += ParseInt(cols[1]);
      if (const Count stops = ParseInt(cols[2]); stops != 0) {
        st.stops[p] += stops;
      }
    }
  }
  ReadPairTsv(files.transitions, st, st.direct);
  ReadPairTsv(files.path_counts, st, st.path_counts);
  ReadPairTsv(files.search_counts, st, st.search_counts);
  for (const auto& [k, c] : st.direct) st.graph_links.insert(k);
  if (!files.links.empty()) {
    for (const auto& line : ReadLines(files.links)) {
      if (line.empty()) continue;
      const auto cols = SplitTabs(line);
      if (cols.size() != 2) {
        throw Error(ErrorCode::kMalformedLine, files.links + ": expected 2 columns");
      }
      st.graph_links.insert(
          LinkKey(st.pages.Intern(cols[0]), st.pages.Intern(cols[1])));
    }
  }
  return st;
}

TransitionStats LoadTransitionsOnly(const std::string& path) {
  TransitionStats st;
  PairCounts raw;
  ReadPairTsv(path, st, raw);
  const auto stop_id = st.pages.Find(kStopToken);
  for (const auto& [k, c] : raw) {
    const PageId s = LinkSource(k);
    st.page_views[s] += c;
    if (stop_id && LinkTarget(k) == *stop_id) {
      st.stops[s] += c;
    } else {
      st.direct[k] += c;
      st.graph_links.insert(k);
    }
  }
  return st;
}

}  // namespace linkforge
