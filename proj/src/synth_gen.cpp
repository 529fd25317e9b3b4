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

#include "linkforge/synth_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"
#include "linkforge/log_ingest.hpp"

namespace linkforge {
namespace {

using Json = nlohmann::json;

constexpr std::string_view kSynthAgent = "linkforge-synth/1.0";
constexpr std::size_t kMaxViewsPerTree = 100000;

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string SynthIp(std::int64_t walk) {
  const auto w = static_cast<std::uint64_t>(walk);
  return "10." + std::to_string((w >> 16) & 0xff) + "." +
         std::to_string((w >> 8) & 0xff) + "." + std::to_string(w & 0xff) +
         (w >> 24 ? ":" + std::to_string(w >> 24) : "");
}

double Uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

struct CompiledHidden {
  int target;
  double p;
  std::vector<int> via;
};

struct CompiledModel {
  std::vector<std::string> names;
  std::vector<std::vector<std::pair<int, double>>> out;
  std::vector<std::vector<CompiledHidden>> hidden;
  std::vector<double> stop;
};

CompiledModel Compile(const GroundTruthModel& model) {
  CompiledModel c;
  std::unordered_map<std::string, int> id;
  for (const auto& p : model.pages) {
    if (id.emplace(p, static_cast<int>(c.names.size())).second) c.names.push_back(p);
  }
  auto lookup = [&](const std::string& p) {
    auto it = id.find(p);
    if (it == id.end()) {
      throw Error(ErrorCode::kInvalidProblem, "model references unknown page " + p);
    }
    return it->second;
  };
  c.out.resize(c.names.size());
  c.hidden.resize(c.names.size());
  c.stop.assign(c.names.size(), 0.0);
  for (const auto& l : model.links) {
    c.out[lookup(l.source)].emplace_back(lookup(l.target), l.p);
  }
  for (const auto& h : model.hidden) {
    CompiledHidden ch{lookup(h.target), h.p, {}};
    for (const auto& v : h.via) ch.via.push_back(lookup(v));
    if (ch.via.empty() || ch.via.back() != ch.target) {
      throw Error(ErrorCode::kInvalidProblem,
                  "hidden link route must end at its target");
    }
    c.hidden[lookup(h.source)].push_back(std::move(ch));
  }
  for (const auto& [p, s] : model.stops) c.stop[lookup(p)] = s;
  return c;
}

class TreeBuilder {
 public:
  TreeBuilder(const CompiledModel& m, NavigationTree& tree)
      : m_(m), tree_(tree) {}

  int Add(int page, std::optional<int> parent) {
    PageView v;
    v.id = static_cast<int>(tree_.views.size());
    v.page = m_.names[page];
    v.timestamp = kDefaultClockStart + v.id * kDefaultStepGapMs;
    v.parent = parent;
    if (parent) tree_.views[*parent].children.push_back(v.id);
    tree_.views.push_back(std::move(v));
    return tree_.views.back().id;
  }
  bool Full() const { return tree_.views.size() >= kMaxViewsPerTree; }

 private:
  const CompiledModel& m_;
  NavigationTree& tree_;
};

// Returns true when the walk was cut short.
bool SingleTabWalk(const CompiledModel& m, int start, int max_depth,
                   std::mt19937_64& rng, NavigationTree& tree) {
  TreeBuilder b(m, tree);
  int node = b.Add(start, std::nullopt);
  int page = start;
  int depth = 0;
  while (true) {
    const double u = Uniform(rng);
    double acc = 0.0;
    const std::vector<int>* route = nullptr;
    int single = -1;
    for (const auto& [t, p] : m.out[page]) {
      acc += p;
      if (u < acc) {
        single = t;
        break;
      }
    }
    if (single < 0) {
      for (const auto& h : m.hidden[page]) {
        acc += h.p;
        if (u < acc) {
          route = &h.via;
          break;
        }
      }
    }
    if (single < 0 && route == nullptr) return false;  // stop
    const std::vector<int> hop{single};
    const std::vector<int>& steps = route ? *route : hop;
    for (int next : steps) {
      if (depth >= max_depth || b.Full()) return true;
      node = b.Add(next, node);
      page = next;
      ++depth;
    }
  }
}

bool MultiTabExpand(const CompiledModel& m, TreeBuilder& b, int node, int page,
                    int depth, int max_depth, std::mt19937_64& rng) {
  bool truncated = false;
  auto follow = [&](const std::vector<int>& steps) {
    int cur = node;
    int d = depth;
    for (int next : steps) {
      if (d >= max_depth || b.Full()) {
        truncated = true;
        return;
      }
      cur = b.Add(next, cur);
      ++d;
    }
    truncated |= MultiTabExpand(m, b, cur, steps.back(), d, max_depth, rng);
  };
  for (const auto& [t, p] : m.out[page]) {
    if (Uniform(rng) < p) follow(std::vector<int>{t});
  }
  for (const auto& h : m.hidden[page]) {
    if (Uniform(rng) < h.p) follow(h.via);
  }
  return truncated;
}

void GenerateOne(const CompiledModel& m, const GroundTruthModel& model,
                 std::int64_t walk, int max_depth, NavigationTree& tree,
                 bool& truncated) {
  std::mt19937_64 rng(SplitMix64(model.seed ^ SplitMix64(static_cast<std::uint64_t>(walk))));
  const int start = std::uniform_int_distribution<int>(
      0, static_cast<int>(m.names.size()) - 1)(rng);
  tree.user = DeriveUserId(SynthIp(walk), "", kSynthAgent);
  tree.root = 0;
  if (model.mode == BrowsingMode::kSingleTab) {
    truncated = SingleTabWalk(m, start, max_depth, rng, tree);
  } else {
    TreeBuilder b(m, tree);
    const int root = b.Add(start, std::nullopt);
    truncated = MultiTabExpand(m, b, root, start, 0, max_depth, rng);
  }
}

// Shortest path s -> t over `adj`, excluding s itself; empty if none.
std::vector<int> ShortestRoute(const std::vector<std::vector<int>>& adj, int s,
                               int t) {
  std::vector<int> prev(adj.size(), -1);
  std::vector<bool> seen(adj.size(), false);
  std::deque<int> q{s};
  seen[s] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    if (u == t) break;
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        prev[v] = u;
        q.push_back(v);
      }
    }
  }
  if (!seen[t] || s == t) return {};
  std::vector<int> route;
  for (int v = t; v != s; v = prev[v]) route.push_back(v);
  std::reverse(route.begin(), route.end());
  return route;
}

std::vector<std::vector<int>> Adjacency(const CompiledModel& m,
                                        const std::set<std::pair<int, int>>& removed) {
  std::vector<std::vector<int>> adj(m.names.size());
  for (std::size_t s = 0; s < m.out.size(); ++s) {
    for (const auto& [t, p] : m.out[s]) {
      if (p > 0.0 && !removed.contains({static_cast<int>(s), t})) {
        adj[s].push_back(t);
      }
    }
    std::sort(adj[s].begin(), adj[s].end());
  }
  return adj;
}

}  // namespace

void GroundTruthModel::Normalize() {
  const CompiledModel c = Compile(*this);
  for (const auto& l : links) {
    if (!(l.p >= 0.0 && l.p <= 1.0)) {
      throw Error(ErrorCode::kInvalidProblem,
                  "link probability outside [0,1]: " + l.source + " -> " + l.target);
    }
  }
  for (const auto& h : hidden) {
    if (!(h.p >= 0.0 && h.p <= 1.0)) {
      throw Error(ErrorCode::kInvalidProblem, "hidden probability outside [0,1]");
    }
  }
  if (mode == BrowsingMode::kSingleTab) {
    std::map<std::string, double> mass;
    for (const auto& l : links) mass[l.source] += l.p;
    for (const auto& h : hidden) mass[h.source] += h.p;
    for (const auto& page : pages) {
      double& stop = stops[page];
      stop = std::clamp(stop, 0.0, 1.0);
      if (mass[page] <= 0.0) stop = 1.0;
    }
    // Rows that already add up are left alone so a saved model reloads
    // bit for bit.
    auto scale = [&](const std::string& s) {
      const double m = mass[s];
      if (m <= 0.0 || std::abs(m - (1.0 - stops[s])) <= 1e-12) return 1.0;
      return (1.0 - stops[s]) / m;
    };
    for (auto& l : links) l.p *= scale(l.source);
    for (auto& h : hidden) h.p *= scale(h.source);
  } else {
    std::vector<double> col(c.names.size(), 0.0);
    for (std::size_t s = 0; s < c.out.size(); ++s) {
      for (const auto& [t, p] : c.out[s]) col[t] += p;
    }
    for (std::size_t t = 0; t < col.size(); ++t) {
      if (!(col[t] < 1.0)) {
        throw Error(ErrorCode::kInvalidProblem,
                    "column sum for " + c.names[t] + " must be < 1");
      }
    }
  }
}

GroundTruthModel RandomModel(const RandomModelOptions& o) {
  if (o.pages < 2 || o.out_degree < 1 || o.out_degree >= o.pages ||
      !(o.weight_range >= 1.0)) {
    throw Error(ErrorCode::kInvalidProblem, "bad random model shape");
  }
  GroundTruthModel m;
  m.mode = o.mode;
  m.seed = o.seed;
  std::mt19937_64 rng(SplitMix64(o.seed));
  char buf[32];
  for (int i = 0; i < o.pages; ++i) {
    std::snprintf(buf, sizeof(buf), "/wiki/P%03d", i);
    m.pages.emplace_back(buf);
  }
  std::vector<double> col(o.pages, 0.0);
  std::vector<std::vector<std::pair<int, double>>> rows(o.pages);
  std::vector<double> stop(o.pages);
  for (int s = 0; s < o.pages; ++s) {
    std::vector<int> others;
    for (int t = 0; t < o.pages; ++t) {
      if (t != s) others.push_back(t);
    }
    for (int k = 0; k < o.out_degree; ++k) {
      const int j = std::uniform_int_distribution<int>(
          k, static_cast<int>(others.size()) - 1)(rng);
      std::swap(others[k], others[j]);
    }
    stop[s] = o.stop_min + (o.stop_max - o.stop_min) * Uniform(rng);
    double total = 0.0;
    for (int k = 0; k < o.out_degree; ++k) {
      const double w = std::exp(std::log(o.weight_range) * Uniform(rng));
      rows[s].emplace_back(others[k], w);
      total += w;
    }
    for (auto& [t, p] : rows[s]) {
      p = (1.0 - stop[s]) * p / total;
      col[t] += p;
    }
  }
  for (int s = 0; s < o.pages; ++s) {
    for (auto& [t, p] : rows[s]) {
      if (col[t] >= o.column_limit) {
        const double scaled = p * o.column_limit * 0.999 / col[t];
        stop[s] += p - scaled;
        p = scaled;
      }
    }
  }
  for (int s = 0; s < o.pages; ++s) {
    std::sort(rows[s].begin(), rows[s].end());
    for (const auto& [t, p] : rows[s]) m.links.push_back({m.pages[s], m.pages[t], p});
    m.stops[m.pages[s]] = std::min(stop[s], 1.0);
  }
  m.Normalize();
  return m;
}

GeneratedTraces GenerateTraces(const GroundTruthModel& model,
                               std::int64_t n_walks, int max_depth) {
  const CompiledModel m = Compile(model);
  GeneratedTraces out;
  if (n_walks <= 0 || m.names.empty()) return out;
  out.trees.resize(static_cast<std::size_t>(n_walks));
  std::int64_t truncated = 0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : truncated)
  for (std::int64_t i = 0; i < n_walks; ++i) {
    bool cut = false;
    GenerateOne(m, model, i, std::max(1, max_depth), out.trees[i], cut);
    truncated += cut ? 1 : 0;
  }
  out.truncated = truncated;
  return out;
}

GeneratedTraces GenerateTracesSerial(const GroundTruthModel& model,
                                     std::int64_t n_walks, int max_depth) {
  const CompiledModel m = Compile(model);
  GeneratedTraces out;
  if (n_walks <= 0 || m.names.empty()) return out;
  out.trees.resize(static_cast<std::size_t>(n_walks));
  for (std::int64_t i = 0; i < n_walks; ++i) {
    bool cut = false;
    GenerateOne(m, model, i, std::max(1, max_depth), out.trees[i], cut);
    out.truncated += cut ? 1 : 0;
  }
  return out;
}

std::vector<NavigationTree> Restamp(std::span<const NavigationTree> trees,
                                    Timestamp clock_start, Timestamp gap_ms) {
  std::vector<NavigationTree> out(trees.begin(), trees.end());
  for (auto& t : out) {
    for (auto& v : t.views) v.timestamp = clock_start + v.id * gap_ms;
  }
  return out;
}

std::vector<std::string> EmitSyntheticLog(std::span<const NavigationTree> trees,
                                          Timestamp clock_start,
                                          Timestamp gap_ms) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const std::string ip = SynthIp(static_cast<std::int64_t>(i));
    for (const auto& v : trees[i].views) {
      std::string line = std::to_string(clock_start + v.id * gap_ms);
      line += "\t" + ip + "\t\t" + std::string(kSynthAgent) + "\t" + v.page + "\t";
      if (v.parent) line += trees[i].views[*v.parent].page;
      line += "\t200";
      lines.push_back(std::move(line));
    }
  }
  return lines;
}

HideResult HideLinks(const GroundTruthModel& model, std::span<const Link> links) {
  const CompiledModel m = Compile(model);
  std::unordered_map<std::string, int> id;
  for (std::size_t i = 0; i < m.names.size(); ++i) id[m.names[i]] = static_cast<int>(i);
  std::set<std::pair<int, int>> removed;
  std::map<std::pair<int, int>, double> p_of;
  for (const auto& l : model.links) p_of[{id.at(l.source), id.at(l.target)}] = l.p;
  for (const auto& l : links) {
    auto si = id.find(l.source);
    auto ti = id.find(l.target);
    if (si == id.end() || ti == id.end() || !p_of.contains({si->second, ti->second})) {
      throw Error(ErrorCode::kInvalidProblem,
                  "not a model link: " + l.source + " -> " + l.target);
    }
    removed.insert({si->second, ti->second});
  }
  const auto adj = Adjacency(m, removed);
  HideResult result;
  result.model = model;
  result.model.links.clear();
  for (const auto& l : model.links) {
    if (!removed.contains({id.at(l.source), id.at(l.target)})) {
      result.model.links.push_back(l);
    }
  }
  for (const auto& [s, t] : removed) {
    const auto route = ShortestRoute(adj, s, t);
    if (route.empty()) {
      throw Error(ErrorCode::kDisconnectedPair,
                  m.names[s] + " cannot reach " + m.names[t] +
                      " once its link is removed");
    }
    HiddenLink h{m.names[s], m.names[t], p_of.at({s, t}), {}};
    for (int v : route) h.via.push_back(m.names[v]);
    result.model.hidden.push_back(h);
    result.ground_truth.push_back({h.source, h.target, h.p});
  }
  return result;
}

std::vector<Link> ChooseHideableLinks(const GroundTruthModel& model, int count,
                                      std::uint64_t seed, int max_route) {
  const CompiledModel m = Compile(model);
  std::unordered_map<std::string, int> id;
  for (std::size_t i = 0; i < m.names.size(); ++i) id[m.names[i]] = static_cast<int>(i);
  std::vector<std::size_t> order(model.links.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(SplitMix64(seed));
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::pair<int, int>> removed;
  std::set<int> used_sources;
  std::vector<Link> chosen;
  for (std::size_t idx : order) {
    if (static_cast<int>(chosen.size()) >= count) break;
    const auto& l = model.links[idx];
    const int s = id.at(l.source);
    const int t = id.at(l.target);
    if (l.p <= 0.0 || used_sources.contains(s)) continue;
    auto trial = removed;
    trial.insert({s, t});
    const auto adj = Adjacency(m, trial);
    bool ok = true;
    for (const auto& [a, b] : trial) {
      const auto route = ShortestRoute(adj, a, b);
      if (route.empty() ||
          (max_route > 0 && static_cast<int>(route.size()) > max_route)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    removed = std::move(trial);
    used_sources.insert(s);
    chosen.push_back({l.source, l.target});
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::string ModelToJson(const GroundTruthModel& model) {
  Json j;
  j["pages"] = model.pages;
  Json links = Json::array();
  for (const auto& l : model.links) {
    links.push_back({{"s", l.source}, {"t", l.target}, {"p", l.p}});
  }
  j["links"] = std::move(links);
  Json stops = Json::object();
  for (const auto& [p, s] : model.stops) stops[p] = s;
  j["stops"] = std::move(stops);
  j["mode"] = model.mode == BrowsingMode::kSingleTab ? "single_tab" : "multi_tab";
  j["seed"] = model.seed;
  if (!model.hidden.empty()) {
    Json hidden = Json::array();
    for (const auto& h : model.hidden) {
      hidden.push_back({{"s", h.source}, {"t", h.target}, {"p", h.p}, {"via", h.via}});
    }
    j["hidden"] = std::move(hidden);
  }
  return j.dump(2);
}

GroundTruthModel ModelFromJson(std::string_view text) {
  GroundTruthModel m;
  try {
    const Json j = Json::parse(text);
    m.pages = j.at("pages").get<std::vector<std::string>>();
    for (const auto& l : j.at("links")) {
      m.links.push_back({l.at("s").get<std::string>(), l.at("t").get<std::string>(),
                         l.at("p").get<double>()});
    }
    if (j.contains("stops")) {
      for (const auto& [p, s] : j.at("stops").items()) m.stops[p] = s.get<double>();
    }
    const std::string mode = j.value("mode", std::string("single_tab"));
    if (mode == "single_tab") {
      m.mode = BrowsingMode::kSingleTab;
    } else if (mode == "multi_tab") {
      m.mode = BrowsingMode::kMultiTab;
    } else {
      throw Error(ErrorCode::kInvalidProblem, "unknown mode " + mode);
    }
    m.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("hidden")) {
      for (const auto& h : j.at("hidden")) {
        m.hidden.push_back({h.at("s").get<std::string>(), h.at("t").get<std::string>(),
                            h.at("p").get<double>(),
                            h.at("via").get<std::vector<std::string>>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidProblem, std::string("bad model: ") + e.what());
  }
  m.Normalize();
  return m;
}

std::string GroundTruthTsv(std::span<const ModelLink> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.source + "\t" + r.target + "\t" + FormatDouble(r.p) + "\n";
  }
  return out;
}

std::vector<ModelLink> ParseGroundTruthTsv(const std::string& contents) {
  std::vector<ModelLink> out;
  std::istringstream in(contents);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = SplitTabs(line);
    if (cols.size() != 3) {
      throw Error(ErrorCode::kMalformedLine, "ground truth row needs 3 columns");
    }
    out.push_back({std::string(cols[0]), std::string(cols[1]), ParseDouble(cols[2])});
  }
  return out;
}

}  // namespace linkforge
