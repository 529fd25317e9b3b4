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

// Clickthrough-rate predictors for links that do not exist yet.

#ifndef LINKFORGE_CTR_ESTIMATORS_HPP_
#define LINKFORGE_CTR_ESTIMATORS_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkforge/kernels.hpp"
#include "linkforge/transition_stats.hpp"

namespace linkforge {

enum class Method {
  kSearch,
  kPath,
  kPathAndSearch,
  kRandomWalk,
  kMeanBaseline,
};

std::string_view MethodName(Method m);
Method ParseMethod(std::string_view name);  // throws Error{kUsage}
const std::vector<Method>& AllMethods();

struct CandidateEstimate {
  std::string source;
  std::string target;
  double estimate = 0.0;
  Method method = Method::kPath;

  friend bool operator==(const CandidateEstimate&,
                         const CandidateEstimate&) = default;
};

// All three throw Error{kUnknownSource} when c_s = 0.
double SearchProportion(const TransitionStats& stats, std::string_view s,
                        std::string_view t);
double PathProportion(const TransitionStats& stats, std::string_view s,
                      std::string_view t);
double PathAndSearchProportion(const TransitionStats& stats,
                               std::string_view s, std::string_view t);

// Arithmetic mean of p over the existing out-links of s.
// Throws Error{kNoExistingLinks}.
double MeanBaseline(const ClickthroughMatrix& matrix, std::string_view s);

struct RandomWalkOptions {
  double epsilon = 1e-8;
  int max_iterations = 10000;
};

struct RandomWalkResult {
  std::string target;
  std::vector<double> q;  // indexed by the solver's page ids
  int iterations = 0;
  double residual = 0.0;
};

// Expected number of paths to a fixed target under the existing-link
// clickthrough matrix, found by power iteration with the target pinned to 1.
class RandomWalkSolver {
 public:
  // Throws Error{kNonConvergent} unless every column sum is < 1.
  explicit RandomWalkSolver(const ClickthroughMatrix& matrix,
                            RandomWalkOptions options = {});

  // Throws Error{kNonConvergent} when the iteration cap is reached. Unknown
  // targets give the zero vector with q[target] undefined.
  RandomWalkResult Solve(std::string_view target) const;
  RandomWalkResult SolveSerial(std::string_view target) const;

  double Q(const RandomWalkResult& r, std::string_view source) const;
  // max_{s != t} |q_s - Σ_u p_su q_u|
  double Residual(const RandomWalkResult& r) const;

  const PageTable& pages() const { return pages_; }
  const kernels::SparseRows& rows() const { return rows_; }

 private:
  RandomWalkResult Run(std::string_view target, bool parallel) const;

  PageTable pages_;
  kernels::SparseRows rows_;
  RandomWalkOptions options_;
};

RandomWalkResult RandomWalkEstimate(const ClickthroughMatrix& matrix,
                                    std::string_view target,
                                    RandomWalkOptions options = {});

struct CandidateOptions {
  // Minimum P_st or search count for a pair to become a candidate.
  Count min_support = 1;

  static CandidateOptions Default() { return {}; }
  // At least 10 indirect paths or searches.
  static CandidateOptions PaperEval() { return {10}; }
};

// Nonexistent links (s != t, (s,t) not in E) with enough indirect evidence,
// sorted by (source, target).
std::vector<std::pair<std::string, std::string>> CandidateUniverse(
    const TransitionStats& stats, const CandidateOptions& options = {});

// Estimates every candidate under each requested method. Random-walk runs
// are batched per distinct target and run in parallel. Candidates whose
// source has no views (or no existing links, for the baseline) are skipped.
std::vector<CandidateEstimate> EstimateCandidates(
    const TransitionStats& stats,
    std::span<const std::pair<std::string, std::string>> candidates,
    std::span<const Method> methods, const RandomWalkOptions& rw = {});

// TSV: source, target, method, estimate.
std::string EstimatesTsv(std::span<const CandidateEstimate> estimates);
std::vector<CandidateEstimate> ParseEstimatesTsv(const std::string& contents);

}  // namespace linkforge

#endif  // LINKFORGE_CTR_ESTIMATORS_HPP_
