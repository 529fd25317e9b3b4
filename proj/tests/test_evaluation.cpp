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

#include "linkforge/error.hpp"
#include "linkforge/evaluation.hpp"

using namespace linkforge;

namespace {

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

PairedSeries Series(std::vector<double> p, std::vector<double> t) {
  return PairedSeries{std::move(p), std::move(t)};
}

PairedSeries RandomSeries(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  PairedSeries s;
  for (int i = 0; i < n; ++i) {
    const double t = unit(rng);
    s.truths.push_back(t);
    s.predictions.push_back(std::max(0.0, t + noise(rng)));
  }
  return s;
}

NavigationTree Tree(const std::vector<int>& parents) {
  NavigationTree t;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    PageView v;
    v.id = static_cast<int>(i);
    v.page = "p" + std::to_string(i);
    if (parents[i] >= 0) v.parent = parents[i];
    t.views.push_back(v);
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] >= 0) t.views[parents[i]].children.push_back(static_cast<int>(i));
  }
  return t;
}

}  // namespace

TEST_CASE("mean absolute error") {
  CHECK(MeanAbsoluteError(Series({0.1, 0.2}, {0.1, 0.2})) == 0.0);
  CHECK(MeanAbsoluteError(Series({0.1, 0.3}, {0.2, 0.1})) ==
        doctest::Approx(0.15).epsilon(1e-15));
  CHECK(MeanAbsoluteError(Series({0.5}, {0.0})) == 0.5);
  CHECK(CodeOf([] { MeanAbsoluteError(Series({}, {})); }) == ErrorCode::kEmptySeries);
}

TEST_CASE("correlations") {
  const std::vector<double> x = {0.3, 1.0, -2.0, 4.5, 0.1};
  std::vector<double> twice, neg;
  for (double v : x) {
    twice.push_back(2 * v);
    neg.push_back(-v);
  }
  CHECK(Pearson(Series(x, twice)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Spearman(Series(x, twice)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Pearson(Series(x, neg)) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(Spearman(Series(x, neg)) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(Spearman(Series({1, 2, 3, 4}, {1, 3, 2, 4})) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(CodeOf([] { Pearson(Series({1}, {2})); }) == ErrorCode::kEmptySeries);
  CHECK(CodeOf([] { Spearman(Series({1, 2}, {3, 3})); }) == ErrorCode::kDegenerateVariance);
}

TEST_CASE("average ranks share ties") {
  const std::vector<double> v = {3.0, 1.0, 3.0, 2.0};
  CHECK(AverageRanks(v) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("spearman ignores monotone transforms") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto s = RandomSeries(rng, 40);
    PairedSeries t = s;
    for (auto& v : t.predictions) v = std::exp(3 * v) + 1;
    for (auto& v : t.truths) v = std::cbrt(v) - 7;
    CHECK(Spearman(t) == doctest::Approx(Spearman(s)).epsilon(1e-12));
  }
}

TEST_CASE("bootstrap intervals") {
  const auto constant = Series({0.2, 0.2, 0.2}, {0.1, 0.1, 0.1});
  const auto ci = BootstrapCi(constant, MetricFunction(Metric::kMae));
  CHECK(ci.low == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ci.high == doctest::Approx(0.1).epsilon(1e-12));

  std::mt19937_64 rng(2);
  const auto s = RandomSeries(rng, 60);
  BootstrapOptions opt;
  opt.seed = 99;
  const auto a = BootstrapCi(s, MetricFunction(Metric::kSpearman), opt);
  CHECK(BootstrapCi(s, MetricFunction(Metric::kSpearman), opt) == a);
  CHECK(BootstrapCiSerial(s, MetricFunction(Metric::kSpearman), opt) == a);
  CHECK(a.resamples == 1000);
  CHECK(a.low <= a.high);
  opt.seed = 100;
  CHECK_FALSE(BootstrapCi(s, MetricFunction(Metric::kSpearman), opt) == a);

  BootstrapOptions few;
  few.resamples = 99;
  CHECK(CodeOf([&] { BootstrapCi(s, MetricFunction(Metric::kMae), few); }) ==
        ErrorCode::kUsage);
  BootstrapOptions bad_level;
  bad_level.level = 1.0;
  CHECK(CodeOf([&] { BootstrapCi(s, MetricFunction(Metric::kMae), bad_level); }) ==
        ErrorCode::kUsage);
}

TEST_CASE("bootstrap interval covers the point estimate") {
  std::mt19937_64 rng(3);
  int covered = 0;
  for (int i = 0; i < 100; ++i) {
    const auto s = RandomSeries(rng, 50);
    BootstrapOptions opt;
    opt.seed = static_cast<std::uint64_t>(i) + 1;
    const auto ci = BootstrapCi(s, MetricFunction(Metric::kMae), opt);
    const double point = MeanAbsoluteError(s);
    covered += ci.low <= point && point <= ci.high;
  }
  CHECK(covered == 100);
}

TEST_CASE("bootstrap counts failing resamples") {
  // Two distinct values: some resamples are constant and Pearson throws.
  const auto s = Series({0.0, 1.0, 0.0, 1.0}, {0.0, 1.0, 1.0, 0.0});
  const auto ci = BootstrapCi(s, MetricFunction(Metric::kPearson));
  CHECK(ci.resamples == 1000);
  CHECK(ci.skipped > 0);
  CHECK(ci.skipped < 1000);
}

TEST_CASE("quantiles interpolate") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(Quantile(v, 0.0) == 1.0);
  CHECK(Quantile(v, 1.0) == 4.0);
  CHECK(Quantile(v, 0.5) == 2.5);
}

TEST_CASE("precision at k") {
  const RankedLabels r({{0.9, true}, {0.1, false}, {0.5, false}, {0.7, true}});
  CHECK(PrecisionAtK(r, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(PrecisionAtK(r, 1) == 1.0);
  const RankedLabels all({{0.3, true}, {0.2, true}});
  CHECK(PrecisionAtK(all, 2) == 1.0);
  CHECK(CodeOf([&] { PrecisionAtK(r, 5); }) == ErrorCode::kBadK);
  CHECK(CodeOf([&] { PrecisionAtK(r, 0); }) == ErrorCode::kBadK);

  // Positives as a prefix: non-increasing in k.
  std::vector<std::pair<double, bool>> items;
  for (int i = 0; i < 20; ++i) items.emplace_back(20 - i, i < 7);
  const RankedLabels prefix(items);
  double last = 1.0;
  for (std::size_t k = 1; k <= 20; ++k) {
    const double p = PrecisionAtK(prefix, k);
    CHECK(p <= last);
    CHECK(p >= 0.0);
    last = p;
  }
}

TEST_CASE("solution jaccard") {
  const std::vector<Link> ab = {{"s", "a"}, {"s", "b"}};
  const std::vector<Link> bc = {{"s", "b"}, {"s", "c"}};
  const std::vector<Link> de = {{"s", "d"}, {"s", "e"}};
  CHECK(SolutionJaccard(ab, ab) == 1.0);
  CHECK(SolutionJaccard(ab, de) == 0.0);
  CHECK(SolutionJaccard(ab, bc) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(SolutionJaccard(std::vector<Link>{}, std::vector<Link>{}) == 1.0);
}

TEST_CASE("ccdf") {
  const std::vector<double> v = {1, 1, 2};
  const auto c = Ccdf(v);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == std::pair<double, double>{1.0, 1.0});
  CHECK(c[1].first == 2.0);
  CHECK(c[1].second == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const std::vector<double> one = {4.5};
  CHECK(Ccdf(one) == std::vector<std::pair<double, double>>{{4.5, 1.0}});
  CHECK(CodeOf([] { Ccdf(std::vector<double>{}); }) == ErrorCode::kEmptySeries);

  std::mt19937_64 rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 500; ++i) xs.push_back(std::geometric_distribution<int>(0.3)(rng));
  const auto curve = Ccdf(xs);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].first > curve[i - 1].first);
    CHECK(curve[i].second <= curve[i - 1].second);
  }
  CHECK(CcdfTsv(c) == "1\t1\n2\t0.3333333333333333\n");
}

TEST_CASE("click volume") {
  TransitionStats later;
  const PageId s = later.pages.Intern("s");
  later.direct[LinkKey(s, later.pages.Intern("a"))] = 95;
  later.direct[LinkKey(s, later.pages.Intern("b"))] = 60;
  later.direct[LinkKey(s, later.pages.Intern("c"))] = 40;
  for (const auto& [k, c] : later.direct) later.graph_links.insert(k);

  const std::vector<Link> none = {{"s", "zzz"}};
  CHECK(ClickVolume(none, later).total == 0);
  CHECK(ClickVolume(none, later).links_found == 0);

  const std::vector<Link> one = {{"s", "a"}};
  CHECK(ClickVolume(one, later).total == 95);

  const std::vector<Link> two = {{"s", "b"}, {"s", "c"}};
  const auto r = ClickVolume(two, later);
  CHECK(r.clicks_per_rank == std::vector<Count>{60, 40});
  CHECK(r.links_found == 2);
  REQUIRE(r.average_at_k.size() == 2);
  CHECK(r.average_at_k[0] == 60.0);
  CHECK(r.average_at_k[1] == 50.0);
}

TEST_CASE("tree and page degree series") {
  const std::vector<NavigationTree> trees = {Tree({-1}), Tree({-1, 0, 0, 1})};
  CHECK(TreeSizes(trees) == std::vector<double>{1.0, 4.0});
  // Non-leaf views: root (2 children) and view 1 (1 child).
  CHECK(TreeAverageDegrees(trees) == std::vector<double>{1.5});

  TransitionStats st;
  const PageId a = st.pages.Intern("a");
  const PageId b = st.pages.Intern("b");
  st.page_views[a] = 10;
  st.stops[a] = 4;
  st.direct[LinkKey(a, b)] = 9;
  st.graph_links.insert(LinkKey(a, b));
  st.graph_links.insert(LinkKey(a, st.pages.Intern("c")));
  st.page_views[b] = 3;
  st.stops[b] = 3;
  const auto rows = PageDegrees(st);
  bool saw_a = false, saw_b = false;
  for (const auto& r : rows) {
    if (r.page == "a") {
      saw_a = true;
      CHECK(r.views == 10);
      CHECK(r.stop_probability == 0.4);
      CHECK(r.navigational_degree == 1.5);
      CHECK(r.structural_degree == 2);
    } else if (r.page == "b") {
      saw_b = true;
      CHECK(std::isnan(r.navigational_degree));
      CHECK(r.stop_probability == 1.0);
    }
  }
  CHECK(saw_a);
  CHECK(saw_b);
}
