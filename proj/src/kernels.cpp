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

#include "linkforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace linkforge::kernels {

void SpmvSerial(const SparseRows& a, std::span<const double> x,
                std::span<double> y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      acc += a.values[k] * x[a.cols[k]];
    }
    y[r] = acc;
  }
}

void SpmvParallel(const SparseRows& a, std::span<const double> x,
                  std::span<double> y) {
  const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static) if (rows > 4096)
  for (std::int64_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
      acc += a.values[k] * x[a.cols[k]];
    }
    y[r] = acc;
  }
}

double MaxAbsDiffSerial(std::span<const double> a, std::span<const double> b,
                        std::size_t skip) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i != skip) m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

double MaxAbsDiffParallel(std::span<const double> a, std::span<const double> b,
                          std::size_t skip) {
  const auto n = static_cast<std::int64_t>(a.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static) if (n > 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    if (static_cast<std::size_t>(i) != skip) {
      m = std::max(m, std::abs(a[i] - b[i]));
    }
  }
  return m;
}

std::vector<double> ColumnSums(const SparseRows& a) {
  std::vector<double> sums(a.rows, 0.0);
  for (std::size_t k = 0; k < a.cols.size(); ++k) sums[a.cols[k]] += a.values[k];
  return sums;
}

void ConfigureThreadsFromEnv() {
#ifdef _OPENMP
  if (const char* env = std::getenv("LINKFORGE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (const std::exception&) {
    }
  }
#endif
}

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace linkforge::kernels
