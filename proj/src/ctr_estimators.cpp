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

#include "linkforge/ctr_estimators.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "linkforge/error.hpp"
#include "linkforge/io_util.hpp"

namespace linkforge {

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kSearch: return "search";
    case Method::kPath: return "path";
    case Method::kPathAndSearch: return "path_and_search";
    case Method::kRandomWalk: return "random_walk";
    case Method::kMeanBaseline: return "mean_baseline";
  }
  return "unknown";
}

Method ParseMethod(std::string_view name) {
  for (Method m : AllMethods()) {
    if (MethodName(m) == name) return m;
  }
  throw Error(ErrorCode::kUsage, "unknown method '" + std::string(name) + "'");
}

const std::vector<Method>& AllMethods() {
  static const std::vector<Method> kAll = {
      Method::kSearch, Method::kPath, Method::kPathAndSearch,
      Method::kRandomWalk, Method::kMeanBaseline};
  return kAll;
}

namespace {

Count RequireViews(const TransitionStats& stats, std::string_view s) {
  const Count views = stats.Views(s);
  if (views <= 0) {
    throw Error(ErrorCode::kUnknownSource,
                "no page views for source '" + std::string(s) + "'");
  }
  return views;
}

}  // namespace

double SearchProportion(const TransitionStats& stats, std::string_view s,
                        std::string_view t) {
  const Count views = RequireViews(stats, s);
  return static_cast<double>(stats.Searches(s, t)) /
         static_cast<double>(views);
}

double PathProportion(const TransitionStats& stats, std::string_view s,
                      std::string_view t) {
  const Count views = RequireViews(stats, s);
  return static_cast<double>(stats.Paths(s, t)) / static_cast<double>(views);
}

double PathAndSearchProportion(const TransitionStats& stats,
                               std::string_view s, std::string_view t) {
  return PathProportion(stats, s, t) + SearchProportion(stats, s, t);
}

double MeanBaseline(const ClickthroughMatrix& matrix, std::string_view s) {
  const auto id = matrix.pages.Find(s);
  double sum = 0.0;
  std::size_t n = 0;
  if (id) {
    // Sorted so the floating-point sum does not depend on hash order.
    std::vector<std::pair<PageId, double>> row;
    for (const auto& [key, p] : matrix.entries) {
      if (LinkSource(key) == *id) row.emplace_back(LinkTarget(key), p);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [t, p] : row) sum += p;
    n = row.size();
  }
  if (n == 0) {
    throw Error(ErrorCode::kNoExistingLinks,
                "no existing out-links for '" + std::string(s) + "'");
  }
  return sum / static_cast<double>(n);
}

RandomWalkSolver::RandomWalkSolver(const ClickthroughMatrix& matrix,
                                   RandomWalkOptions options)
    : pages_(matrix.pages), options_(options) {
  if (!(options_.epsilon > 0.0)) {
    throw Error(ErrorCode::kNonConvergent, "epsilon must be positive");
  }
  const std::size_t n = pages_.size();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> by_row(n);
  for (const auto& [key, p] : matrix.entries) {
    by_row[LinkSource(key)].emplace_back(LinkTarget(key), p);
  }
  rows_.rows = n;
  rows_.offsets.assign(1, 0);
  for (auto& row : by_row) {
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      rows_.cols.push_back(c);
      rows_.values.push_back(v);
    }
    rows_.offsets.push_back(rows_.cols.size());
  }
  const auto sums = kernels::ColumnSums(rows_);
  for (std::size_t t = 0; t < n; ++t) {
    if (!(sums[t] < 1.0)) {
      throw Error(ErrorCode::kNonConvergent,
                  "column sum for '" + pages_.Name(static_cast<PageId>(t)) +
                      "' is " + FormatDouble(sums[t]) + " (must be < 1)");
    }
  }
}

RandomWalkResult RandomWalkSolver::Run(std::string_view target,
                                       bool parallel) const {
  RandomWalkResult result;
  result.target = std::string(target);
  const std::size_t n = rows_.rows;
  result.q.assign(n, 0.0);
  const auto tid = pages_.Find(target);
  if (!tid) return result;
  const std::size_t t = *tid;
  std::vector<double> next(n, 0.0);
  result.q[t] = 1.0;
  for (int it = 1; it <= options_.max_iterations; ++it) {
    if (parallel) {
      kernels::SpmvParallel(rows_, result.q, next);
    } else {
      kernels::SpmvSerial(rows_, result.q, next);
    }
    next[t] = 1.0;
    // The step size is exactly the residual of the current iterate.
    const double diff = parallel
                            ? kernels::MaxAbsDiffParallel(next, result.q, t)
                            : kernels::MaxAbsDiffSerial(next, result.q, t);
    result.iterations = it;
    result.residual = diff;
    if (diff <= options_.epsilon) return result;
    result.q.swap(next);
  }
  throw Error(ErrorCode::kNonConvergent,
              "power iteration for '" + std::string(target) + "' hit " +
                  std::to_string(options_.max_iterations) + " iterations");
}

RandomWalkResult RandomWalkSolver::Solve(std::string_view target) const {
  return Run(target, true);
}

RandomWalkResult RandomWalkSolver::SolveSerial(std::string_view target) const {
  return Run(target, false);
}

double RandomWalkSolver::Q(const RandomWalkResult& r,
                           std::string_view source) const {
  const auto id = pages_.Find(source);
  return id ? r.q[*id] : 0.0;
}

double RandomWalkSolver::Residual(const RandomWalkResult& r) const {
  std::vector<double> y(rows_.rows, 0.0);
  kernels::SpmvSerial(rows_, r.q, y);
  const auto tid = pages_.Find(r.target);
  const std::size_t skip = tid ? *tid : rows_.rows;
  return kernels::MaxAbsDiffSerial(y, r.q, skip);
}

RandomWalkResult RandomWalkEstimate(const ClickthroughMatrix& matrix,
                                    std::string_view target,
                                    RandomWalkOptions options) {
  return RandomWalkSolver(matrix, options).Solve(target);
}

std::vector<std::pair<std::string, std::string>> CandidateUniverse(
    const TransitionStats& stats, const CandidateOptions& options) {
  std::set<std::pair<std::string, std::string>> out;
  auto consider = [&](const PairCounts& m) {
    for (const auto& [key, c] : m) {
      if (c < options.min_support) continue;
      if (LinkSource(key) == LinkTarget(key)) continue;
      if (stats.graph_links.contains(key)) continue;
      out.emplace(stats.pages.Name(LinkSource(key)),
                  stats.pages.Name(LinkTarget(key)));
    }
  };
  consider(stats.path_counts);
  consider(stats.search_counts);
  return {out.begin(), out.end()};
}

std::vector<CandidateEstimate> EstimateCandidates(
    const TransitionStats& stats,
    std::span<const std::pair<std::string, std::string>> candidates,
    std::span<const Method> methods, const RandomWalkOptions& rw) {
  const bool wants_walk =
      std::find(methods.begin(), methods.end(), Method::kRandomWalk) !=
      methods.end();
  const bool wants_baseline =
      std::find(methods.begin(), methods.end(), Method::kMeanBaseline) !=
      methods.end();
  std::optional<ClickthroughMatrix> matrix;
  if (wants_walk || wants_baseline) matrix = BuildClickthroughMatrix(stats);

  // One power iteration per distinct target.
  std::unordered_map<std::string, std::size_t> target_index;
  std::vector<std::string> targets;
  std::vector<RandomWalkResult> walks;
  std::optional<RandomWalkSolver> solver;
  if (wants_walk) {
    solver.emplace(*matrix, rw);
    for (const auto& [s, t] : candidates) {
      if (target_index.emplace(t, targets.size()).second) targets.push_back(t);
    }
    walks.resize(targets.size());
    std::vector<std::string> errors(targets.size());
    const auto n = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        walks[i] = solver->SolveSerial(targets[i]);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw Error(ErrorCode::kNonConvergent, e);
    }
  }

  std::vector<CandidateEstimate> out;
  for (const auto& [s, t] : candidates) {
    if (stats.HasLink(s, t) || s == t) continue;
    const bool has_views = stats.Views(s) > 0;
    for (Method m : methods) {
      CandidateEstimate e{s, t, 0.0, m};
      switch (m) {
        case Method::kSearch:
          if (!has_views) continue;
          e.estimate = SearchProportion(stats, s, t);
          break;
        case Method::kPath:
          if (!has_views) continue;
          e.estimate = PathProportion(stats, s, t);
          break;
        case Method::kPathAndSearch:
          if (!has_views) continue;
          e.estimate = PathAndSearchProportion(stats, s, t);
          break;
        case Method::kRandomWalk:
          e.estimate = solver->Q(walks[target_index.at(t)], s);
          break;
        case Method::kMeanBaseline:
          try {
            e.estimate = MeanBaseline(*matrix, s);
          } catch (const Error&) {
            continue;
          }
          break;
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::string EstimatesTsv(std::span<const CandidateEstimate> estimates) {
  std::string out;
  for (const auto& e : estimates) {
    out += e.source + "\t" + e.target + "\t" + std::string(MethodName(e.method)) +
           "\t" + FormatDouble(e.estimate) + "\n";
  }
  return out;
}

std::vector<CandidateEstimate> ParseEstimatesTsv(const std::string& contents) {
  std::vector<CandidateEstimate> out;
  std::istringstream in(contents);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = SplitTabs(line);
    if (cols.size() != 4) {
      throw Error(ErrorCode::kMalformedLine, "estimate row needs 4 columns");
    }
    Method m;
    try {
      m = ParseMethod(cols[2]);
    } catch (const Error&) {
      throw Error(ErrorCode::kMalformedLine,
                  "unknown method '" + std::string(cols[2]) + "'");
    }
    out.push_back(CandidateEstimate{std::string(cols[0]), std::string(cols[1]),
                                    ParseDouble(cols[3]), m});
  }
  return out;
}

}  // namespace linkforge
