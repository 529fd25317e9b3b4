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

#include "linkforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"

namespace linkforge {
namespace {

void CheckAligned(const PairedSeries& s, std::size_t min_size) {
  if (s.predictions.size() != s.truths.size()) {
    throw Error(ErrorCode::kUsage, "prediction and truth lengths differ");
  }
  if (s.size() < min_size) {
    throw Error(ErrorCode::kEmptySeries,
                "need at least " + std::to_string(min_size) + " pairs");
  }
}

double PearsonUnchecked(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw Error(ErrorCode::kDegenerateVariance, "zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void CheckBootstrapOptions(const BootstrapOptions& o) {
  if (o.resamples < 100) throw Error(ErrorCode::kUsage, "need B >= 100");
  if (!(o.level > 0.0 && o.level < 1.0)) {
    throw Error(ErrorCode::kUsage, "level must lie in (0, 1)");
  }
}

// NaN marks a failed resample.
double OneResample(const PairedSeries& series, const MetricFn& metric,
                   std::uint64_t seed, int b) {
  std::mt19937_64 rng(SplitMix64(seed ^ SplitMix64(static_cast<std::uint64_t>(b))));
  std::uniform_int_distribution<std::size_t> pick(0, series.size() - 1);
  PairedSeries sample;
  sample.predictions.resize(series.size());
  sample.truths.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t j = pick(rng);
    sample.predictions[i] = series.predictions[j];
    sample.truths[i] = series.truths[j];
  }
  try {
    return metric(sample);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

Interval Summarize(std::vector<double> values, const BootstrapOptions& o) {
  Interval out;
  out.resamples = static_cast<int>(values.size());
  std::vector<double> ok;
  ok.reserve(values.size());
  for (double v : values) {
    if (std::isnan(v)) {
      ++out.skipped;
    } else {
      ok.push_back(v);
    }
  }
  if (ok.empty()) {
    throw Error(ErrorCode::kEmptySeries, "every bootstrap resample failed");
  }
  std::sort(ok.begin(), ok.end());
  const double alpha = (1.0 - o.level) / 2.0;
  out.low = Quantile(ok, alpha);
  out.high = Quantile(ok, 1.0 - alpha);
  return out;
}

}  // namespace

double MeanAbsoluteError(const PairedSeries& series) {
  CheckAligned(series, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += std::abs(series.predictions[i] - series.truths[i]);
  }
  return sum / static_cast<double>(series.size());
}

double Pearson(const PairedSeries& series) {
  CheckAligned(series, 2);
  return PearsonUnchecked(series.predictions, series.truths);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(const PairedSeries& series) {
  CheckAligned(series, 2);
  const auto rx = AverageRanks(series.predictions);
  const auto ry = AverageRanks(series.truths);
  return PearsonUnchecked(rx, ry);
}

std::string_view MetricName(Metric m) {
  switch (m) {
    case Metric::kMae: return "mae";
    case Metric::kPearson: return "pearson";
    case Metric::kSpearman: return "spearman";
  }
  return "unknown";
}

MetricFn MetricFunction(Metric m) {
  switch (m) {
    case Metric::kMae: return MeanAbsoluteError;
    case Metric::kPearson: return Pearson;
    case Metric::kSpearman: return Spearman;
  }
  return MeanAbsoluteError;
}

double Quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptySeries, "empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval BootstrapCi(const PairedSeries& series, const MetricFn& metric,
                     const BootstrapOptions& options) {
  CheckBootstrapOptions(options);
  CheckAligned(series, 1);
  std::vector<double> values(options.resamples);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < options.resamples; ++b) {
    values[b] = OneResample(series, metric, options.seed, b);
  }
  return Summarize(std::move(values), options);
}

Interval BootstrapCiSerial(const PairedSeries& series, const MetricFn& metric,
                           const BootstrapOptions& options) {
  CheckBootstrapOptions(options);
  CheckAligned(series, 1);
  std::vector<double> values(options.resamples);
  for (int b = 0; b < options.resamples; ++b) {
    values[b] = OneResample(series, metric, options.seed, b);
  }
  return Summarize(std::move(values), options);
}

RankedLabels::RankedLabels(std::vector<std::pair<double, bool>> items)
    : items_(std::move(items)) {
  std::stable_sort(items_.begin(), items_.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
}

double PrecisionAtK(const RankedLabels& ranked, std::size_t k) {
  const auto& items = ranked.items();
  if (k < 1 || k > items.size()) {
    throw Error(ErrorCode::kBadK, "k=" + std::to_string(k) + " outside [1, " +
                                      std::to_string(items.size()) + "]");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += items[i].second ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double SolutionJaccard(std::span<const Link> a, std::span<const Link> b) {
  const std::set<Link> sa(a.begin(), a.end());
  const std::set<Link> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& l : sa) inter += sb.contains(l) ? 1 : 0;
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::pair<double, double>> Ccdf(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptySeries, "empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < sorted.size();) {
    out.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / n);
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    i = j;
  }
  return out;
}

ClickVolumeReport ClickVolume(std::span<const Link> chosen,
                              const TransitionStats& later) {
  ClickVolumeReport r;
  double running = 0.0;
  for (const auto& link : chosen) {
    const Count clicks = later.Direct(link.source, link.target);
    if (later.HasLink(link.source, link.target)) ++r.links_found;
    r.clicks_per_rank.push_back(clicks);
    r.total += clicks;
    running += static_cast<double>(clicks);
    r.average_at_k.push_back(running / static_cast<double>(r.clicks_per_rank.size()));
  }
  return r;
}

std::vector<double> TreeSizes(std::span<const NavigationTree> trees) {
  std::vector<double> out;
  out.reserve(trees.size());
  for (const auto& t : trees) out.push_back(static_cast<double>(t.views.size()));
  return out;
}

std::vector<double> TreeAverageDegrees(std::span<const NavigationTree> trees) {
  std::vector<double> out;
  for (const auto& t : trees) {
    if (t.views.size() < 2) continue;
    std::size_t inner = 0, children = 0;
    for (const auto& v : t.views) {
      if (!v.children.empty()) {
        ++inner;
        children += v.children.size();
      }
    }
    out.push_back(static_cast<double>(children) / static_cast<double>(inner));
  }
  return out;
}

std::vector<PageDegreeRow> PageDegrees(const TransitionStats& stats) {
  std::map<std::string, PageDegreeRow> rows;
  std::map<PageId, std::size_t> structural;
  for (auto key : stats.graph_links) ++structural[LinkSource(key)];
  for (const auto& [p, views] : stats.page_views) {
    PageDegreeRow row;
    row.page = stats.pages.Name(p);
    row.views = views;
    const auto stops = stats.Stops(row.page);
    row.stop_probability =
        views > 0 ? static_cast<double>(stops) / static_cast<double>(views) : 0.0;
    try {
      row.navigational_degree = NavigationalDegree(stats, row.page);
    } catch (const Error&) {
      row.navigational_degree = std::numeric_limits<double>::quiet_NaN();
    }
    row.structural_degree = structural[p];
    rows.emplace(row.page, std::move(row));
  }
  std::vector<PageDegreeRow> out;
  for (auto& [name, row] : rows) out.push_back(std::move(row));
  return out;
}

std::string CcdfTsv(std::span<const std::pair<double, double>> curve) {
  std::string out;
  for (const auto& [x, f] : curve) {
    out += FormatDouble(x) + "\t" + FormatDouble(f) + "\n";
  }
  return out;
}

}  // namespace linkforge
