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

#ifndef LINKFORGE_EVALUATION_HPP_
#define LINKFORGE_EVALUATION_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkforge/link_placement.hpp"
#include "linkforge/trace_builder.hpp"
#include "linkforge/transition_stats.hpp"

namespace linkforge {

struct PairedSeries {
  std::vector<double> predictions;
  std::vector<double> truths;

  std::size_t size() const { return predictions.size(); }
};

// Throws Error{kEmptySeries}.
double MeanAbsoluteError(const PairedSeries& series);
// Both throw Error{kEmptySeries} below two points and
// Error{kDegenerateVariance} when a side is constant.
double Pearson(const PairedSeries& series);
double Spearman(const PairedSeries& series);

// 1-based ranks; ties share the mean of the ranks they span.
std::vector<double> AverageRanks(std::span<const double> values);

using MetricFn = std::function<double(const PairedSeries&)>;

enum class Metric { kMae, kPearson, kSpearman };
std::string_view MetricName(Metric m);
MetricFn MetricFunction(Metric m);

struct Interval {
  double low = 0.0;
  double high = 0.0;
  int resamples = 0;
  int skipped = 0;  // resamples where the metric threw

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct BootstrapOptions {
  int resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 1;
};

// Percentile interval over resamples drawn with replacement. Resample b uses
// its own generator seeded from (seed, b), so the parallel and serial
// versions agree exactly. Throws Error{kUsage} for B < 100 or a level
// outside (0, 1), and Error{kEmptySeries} when every resample fails.
Interval BootstrapCi(const PairedSeries& series, const MetricFn& metric,
                     const BootstrapOptions& options = {});
Interval BootstrapCiSerial(const PairedSeries& series, const MetricFn& metric,
                           const BootstrapOptions& options = {});

// Linear interpolation between order statistics (sorted input).
double Quantile(std::span<const double> sorted, double q);

class RankedLabels {
 public:
  // Sorted by score descending; ties keep input order.
  explicit RankedLabels(std::vector<std::pair<double, bool>> items);
  const std::vector<std::pair<double, bool>>& items() const { return items_; }

 private:
  std::vector<std::pair<double, bool>> items_;
};

// Throws Error{kBadK} unless 1 <= k <= |items|.
double PrecisionAtK(const RankedLabels& ranked, std::size_t k);

// |A ∩ B| / |A ∪ B|, 1 when both are empty.
double SolutionJaccard(std::span<const Link> a, std::span<const Link> b);

// (value, fraction of samples >= value) at each distinct value, ascending.
// Throws Error{kEmptySeries}.
std::vector<std::pair<double, double>> Ccdf(std::span<const double> values);

struct ClickVolumeReport {
  std::vector<Count> clicks_per_rank;
  Count total = 0;
  std::size_t links_found = 0;  // chosen links present in the later window
  std::vector<double> average_at_k;  // mean clicks over the top k
};

ClickVolumeReport ClickVolume(std::span<const Link> chosen,
                              const TransitionStats& later);

// Analysis series for CCDF inspection.
std::vector<double> TreeSizes(std::span<const NavigationTree> trees);
// Mean child count over non-leaf views, for trees with at least two views.
std::vector<double> TreeAverageDegrees(std::span<const NavigationTree> trees);

struct PageDegreeRow {
  std::string page;
  Count views = 0;
  double stop_probability = 0.0;
  double navigational_degree = 0.0;  // NaN when every view stops
  std::size_t structural_degree = 0;
};

std::vector<PageDegreeRow> PageDegrees(const TransitionStats& stats);

std::string CcdfTsv(std::span<const std::pair<double, double>> curve);

}  // namespace linkforge

#endif  // LINKFORGE_EVALUATION_HPP_
