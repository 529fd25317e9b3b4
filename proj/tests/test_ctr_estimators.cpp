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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "linkforge/ctr_estimators.hpp"
#include "linkforge/error.hpp"
#include "oracles.hpp"

using namespace linkforge;

namespace {

constexpr Timestamp kT0 = 1'420'070'400'000;

NavigationTree Chain(const std::vector<std::string>& pages, Timestamp t0 = kT0) {
  NavigationTree t;
  t.user = UserId{"u"};
  for (std::size_t i = 0; i < pages.size(); ++i) {
    PageView v;
    v.id = static_cast<int>(i);
    v.page = pages[i];
    v.timestamp = t0 + static_cast<Timestamp>(i);
    if (i > 0) v.parent = static_cast<int>(i) - 1;
    if (i + 1 < pages.size()) v.children = {static_cast<int>(i) + 1};
    t.views.push_back(v);
  }
  return t;
}

ClickthroughMatrix Matrix(
    const std::vector<std::tuple<std::string, std::string, double>>& entries) {
  ClickthroughMatrix m;
  for (const auto& [s, t, p] : entries) {
    m.entries[LinkKey(m.pages.Intern(s), m.pages.Intern(t))] = p;
  }
  return m;
}

ClickthroughMatrix FromRows(const oracle::Rows& rows) {
  ClickthroughMatrix m;
  for (std::size_t s = 0; s < rows.size(); ++s) m.pages.Intern(oracle::Name("n", s));
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (const auto& [t, p] : rows[s]) {
      m.entries[LinkKey(static_cast<PageId>(s), static_cast<PageId>(t))] = p;
    }
  }
  return m;
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

// Single-tab walks over `rows`, each starting on a uniform page, as chains.
std::vector<NavigationTree> MarkovChains(const oracle::Rows& rows, int walks,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> start(0, static_cast<int>(rows.size()) - 1);
  std::vector<NavigationTree> out;
  out.reserve(walks);
  for (int w = 0; w < walks; ++w) {
    std::vector<std::string> pages;
    int at = start(rng);
    pages.push_back(oracle::Name("n", at));
    for (int step = 0; step < 1000; ++step) {
      const double u = unit(rng);
      double acc = 0.0;
      int next = -1;
      for (const auto& [t, p] : rows[at]) {
        acc += p;
        if (u < acc) {
          next = t;
          break;
        }
      }
      if (next < 0) break;
      at = next;
      pages.push_back(oracle::Name("n", at));
    }
    out.push_back(Chain(pages, kT0 + w));
  }
  return out;
}

}  // namespace

TEST_CASE("search proportion") {
  TransitionStats st;
  const PageId s = st.pages.Intern("S");
  const PageId t = st.pages.Intern("T");
  st.page_views[s] = 1000;
  st.search_counts[LinkKey(s, t)] = 12;
  CHECK(SearchProportion(st, "S", "T") == 0.012);
  CHECK(SearchProportion(st, "S", "U") == 0.0);
  CHECK(CodeOf([&] { SearchProportion(st, "T", "S"); }) == ErrorCode::kUnknownSource);
  CHECK(CodeOf([&] { SearchProportion(st, "nowhere", "S"); }) ==
        ErrorCode::kUnknownSource);
}

TEST_CASE("path proportion") {
  const std::vector<NavigationTree> two = {Chain({"A", "B", "C"}),
                                           Chain({"A", "B"}, kT0 + 10)};
  const auto st = Accumulate(two, {}, {});
  CHECK(PathProportion(st, "A", "C") == 0.5);
  CHECK(PathProportion(st, "C", "A") == 0.0);
  const std::vector<NavigationTree> one = {Chain({"A", "B", "C"})};
  CHECK(PathProportion(Accumulate(one, {}, {}), "A", "C") == 1.0);
  CHECK(CodeOf([&] { PathProportion(st, "Z", "A"); }) == ErrorCode::kUnknownSource);
}

TEST_CASE("path and search proportion") {
  TransitionStats st;
  const PageId s = st.pages.Intern("S");
  const PageId t = st.pages.Intern("T");
  const PageId u = st.pages.Intern("U");
  st.page_views[s] = 1000;
  st.path_counts[LinkKey(s, t)] = 500;
  st.search_counts[LinkKey(s, t)] = 12;
  st.search_counts[LinkKey(s, u)] = 200;
  CHECK(PathAndSearchProportion(st, "S", "T") == doctest::Approx(0.512).epsilon(1e-15));
  CHECK(PathAndSearchProportion(st, "S", "S") == 0.0);
  CHECK(PathAndSearchProportion(st, "S", "U") == 0.2);
  CHECK(CodeOf([&] { PathAndSearchProportion(st, "U", "S"); }) ==
        ErrorCode::kUnknownSource);
}

TEST_CASE("random walk on a chain") {
  const auto m = Matrix({{"s", "u", 0.5}, {"u", "t", 0.4}});
  const RandomWalkSolver solver(m);
  const auto r = solver.Solve("t");
  CHECK(solver.Q(r, "t") == 1.0);
  CHECK(std::abs(solver.Q(r, "s") - 0.2) <= 1e-8);
  CHECK(std::abs(solver.Q(r, "u") - 0.4) <= 1e-8);
  CHECK(solver.Residual(r) <= 1e-8);
  CHECK(r.target == "t");
}

TEST_CASE("random walk sums a direct link and a path") {
  const auto m = Matrix({{"s", "t", 0.3}, {"s", "u", 0.5}, {"u", "t", 0.4}});
  const auto r = RandomWalkEstimate(m, "t");
  const RandomWalkSolver solver(m);
  CHECK(std::abs(solver.Q(r, "s") - 0.5) <= 1e-8);
  CHECK(solver.Q(r, "t") == 1.0);
}

TEST_CASE("random walk with cycles matches a dense linear solve") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 10; ++round) {
    const int n = 8;
    const auto rows = oracle::RandomSubstochastic(rng, n, 3, 0.9);
    const auto m = FromRows(rows);
    const RandomWalkSolver solver(m);
    const int target = round % n;
    const auto r = solver.Solve(oracle::Name("n", target));
    CHECK(solver.Residual(r) <= 1e-8);
    // Gauss-Jordan on (I - P') q = b, P' with the target row removed.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int s = 0; s < n; ++s) {
      a[s][s] = 1.0;
      if (s == target) {
        a[s][n] = 1.0;
        continue;
      }
      for (const auto& [t, p] : rows[s]) a[s][t] -= p;
    }
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int i = c + 1; i < n; ++i) {
        if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
      }
      std::swap(a[c], a[piv]);
      for (int i = 0; i < n; ++i) {
        if (i == c) continue;
        const double f = a[i][c] / a[c][c];
        for (int k = c; k <= n; ++k) a[i][k] -= f * a[c][k];
      }
    }
    for (int s = 0; s < n; ++s) {
      CHECK(std::abs(solver.Q(r, oracle::Name("n", s)) - a[s][n] / a[s][s]) <= 1e-7);
    }
  }
}

TEST_CASE("random walk refuses to diverge") {
  // Column sum of t is 1.2.
  const auto heavy = Matrix({{"a", "t", 0.6}, {"b", "t", 0.6}});
  CHECK(CodeOf([&] { RandomWalkSolver s(heavy); }) == ErrorCode::kNonConvergent);
  // Iteration cap too small for a long chain.
  std::vector<std::tuple<std::string, std::string, double>> chain;
  for (int i = 0; i < 30; ++i) {
    chain.emplace_back(oracle::Name("c", i), oracle::Name("c", i + 1), 0.9);
  }
  RandomWalkOptions tight;
  tight.max_iterations = 3;
  const RandomWalkSolver solver(Matrix(chain), tight);
  CHECK(CodeOf([&] { solver.Solve("c30"); }) == ErrorCode::kNonConvergent);
  CHECK_NOTHROW(RandomWalkSolver(Matrix(chain)).Solve("c30"));
}

TEST_CASE("random walk parallel and serial agree exactly") {
  std::mt19937_64 rng(4);
  const auto rows = oracle::RandomSubstochastic(rng, 300, 5, 0.8);
  const RandomWalkSolver solver(FromRows(rows));
  for (int t : {0, 17, 299}) {
    const auto a = solver.Solve(oracle::Name("n", t));
    const auto b = solver.SolveSerial(oracle::Name("n", t));
    CHECK(a.q == b.q);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("mean baseline") {
  const auto m = Matrix({{"s", "a", 0.1}, {"s", "b", 0.3}, {"x", "a", 0.05}});
  CHECK(MeanBaseline(m, "s") == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(MeanBaseline(m, "x") == 0.05);
  CHECK(CodeOf([&] { MeanBaseline(m, "a"); }) == ErrorCode::kNoExistingLinks);
  CHECK(CodeOf([&] { MeanBaseline(m, "none"); }) == ErrorCode::kNoExistingLinks);
}

TEST_CASE("path proportion converges to the random walk on Markov traces") {
  std::mt19937_64 rng(2026);
  const int n = 5;
  const auto rows = oracle::RandomSubstochastic(rng, n, 2, 0.8);
  const auto traces = MarkovChains(rows, 100'000, rng);
  const auto stats = Accumulate(traces, {}, {});
  const RandomWalkSolver solver(FromRows(rows));
  int compared = 0;
  for (int t = 0; t < n; ++t) {
    const auto r = solver.Solve(oracle::Name("n", t));
    for (int s = 0; s < n; ++s) {
      const auto sn = oracle::Name("n", s);
      const auto tn = oracle::Name("n", t);
      bool linked = false;
      for (const auto& [u, p] : rows[s]) linked |= u == t;
      if (s == t || linked) continue;
      const double path = PathProportion(stats, sn, tn);
      CHECK_MESSAGE(std::abs(path - solver.Q(r, sn)) <= 0.01, sn, " -> ", tn);
      ++compared;
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("estimators ignore tree order") {
  std::mt19937_64 rng(8);
  const auto rows = oracle::RandomSubstochastic(rng, 12, 3, 0.7);
  auto traces = MarkovChains(rows, 3000, rng);
  const auto st = Accumulate(traces, {}, {});
  const auto cands = CandidateUniverse(st);
  REQUIRE_FALSE(cands.empty());
  const auto a = EstimateCandidates(st, cands, AllMethods());
  std::shuffle(traces.begin(), traces.end(), rng);
  const auto shuffled = Accumulate(traces, {}, {});
  const auto b = EstimateCandidates(shuffled, CandidateUniverse(shuffled), AllMethods());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].source == b[i].source);
    CHECK(a[i].target == b[i].target);
    CHECK(a[i].method == b[i].method);
    CHECK(std::abs(a[i].estimate - b[i].estimate) <= 1e-12);
    CHECK(a[i].estimate >= 0.0);
  }
}

TEST_CASE("appending a tree that reaches t raises the path count") {
  const std::vector<NavigationTree> base = {Chain({"A", "B", "C"}),
                                            Chain({"A", "D"}, kT0 + 10)};
  std::vector<NavigationTree> more = base;
  more.push_back(Chain({"A", "D", "E", "C"}, kT0 + 20));
  const auto before = Accumulate(base, {}, {});
  const auto after = Accumulate(more, {}, {});
  CHECK(after.Paths("A", "C") >= before.Paths("A", "C") + 1);
}

TEST_CASE("candidate universe") {
  const std::vector<NavigationTree> trees = {Chain({"A", "B", "C"}),
                                             Chain({"A", "B", "C"}, kT0 + 5),
                                             Chain({"B", "A", "D"}, kT0 + 9)};
  const std::vector<SearchEvent> searches = {
      {"A", "Z", SearchKind::kExternal, kT0 + 1}};
  const auto st = Accumulate(trees, {}, searches);
  const auto all = CandidateUniverse(st);
  using P = std::pair<std::string, std::string>;
  CHECK(all == std::vector<P>{{"A", "C"}, {"A", "Z"}, {"B", "D"}});
  CHECK(CandidateUniverse(st, {2}) == std::vector<P>{{"A", "C"}});
  CHECK(CandidateOptions::PaperEval().min_support == 10);
  CHECK(CandidateUniverse(st, CandidateOptions::PaperEval()).empty());
}

TEST_CASE("estimate batch and tsv round trip") {
  const std::vector<NavigationTree> trees = {
      Chain({"A", "B", "C"}), Chain({"A", "B"}, kT0 + 5), Chain({"A"}, kT0 + 9)};
  const auto st = Accumulate(trees, {}, {});
  const std::vector<std::pair<std::string, std::string>> cands = {{"A", "C"},
                                                                  {"A", "B"}};
  const auto est = EstimateCandidates(st, cands, AllMethods());
  // (A, B) is an existing link and is skipped.
  REQUIRE(est.size() == AllMethods().size());
  for (const auto& e : est) {
    CHECK(e.source == "A");
    CHECK(e.target == "C");
    switch (e.method) {
      case Method::kPath:
      case Method::kPathAndSearch:
        CHECK(e.estimate == 1.0 / 3.0);
        break;
      case Method::kSearch:
        CHECK(e.estimate == 0.0);
        break;
      case Method::kRandomWalk:  // p_AB = 2/3, p_BC = 1/2
        CHECK(std::abs(e.estimate - 1.0 / 3.0) <= 1e-8);
        break;
      case Method::kMeanBaseline:
        CHECK(e.estimate == 2.0 / 3.0);
        break;
    }
  }
  CHECK(ParseEstimatesTsv(EstimatesTsv(est)) == est);
  for (Method m : AllMethods()) CHECK(ParseMethod(MethodName(m)) == m);
  CHECK(CodeOf([] { ParseMethod("nope"); }) == ErrorCode::kUsage);
}
