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

#include <cmath>
#include <cstdlib>
#include <random>

#include "linkforge/kernels.hpp"

using namespace linkforge::kernels;

namespace {

SparseRows RandomRows(std::mt19937_64& rng, std::size_t n, int per_row) {
  SparseRows a;
  a.rows = n;
  std::uniform_int_distribution<std::uint32_t> col(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (int k = 0; k < per_row; ++k) {
      a.cols.push_back(col(rng));
      a.values.push_back(val(rng));
    }
    a.offsets.push_back(a.cols.size());
  }
  return a;
}

}  // namespace

TEST_CASE("spmv matches a direct loop and its serial twin") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 7u, 1000u, 20000u}) {
    const auto a = RandomRows(rng, n, 5);
    std::vector<double> x(n);
    for (auto& v : x) v = std::uniform_real_distribution<double>(-2, 2)(rng);
    std::vector<double> ys(n), yp(n), direct(n, 0.0);
    SpmvSerial(a, x, ys);
    SpmvParallel(a, x, yp);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = a.offsets[r]; k < a.offsets[r + 1]; ++k) {
        direct[r] += a.values[k] * x[a.cols[k]];
      }
    }
    CHECK(ys == yp);
    CHECK(ys == direct);
  }
}

TEST_CASE("max abs diff skips one index") {
  const std::vector<double> a = {1.0, 5.0, 2.0, 0.0};
  const std::vector<double> b = {1.5, -5.0, 2.0, 0.25};
  CHECK(MaxAbsDiffSerial(a, b, 99) == 10.0);
  CHECK(MaxAbsDiffSerial(a, b, 1) == 0.5);
  CHECK(MaxAbsDiffParallel(a, b, 1) == 0.5);
  std::mt19937_64 rng(2);
  std::vector<double> x(50000), y(50000);
  for (auto& v : x) v = std::uniform_real_distribution<double>(0, 1)(rng);
  for (auto& v : y) v = std::uniform_real_distribution<double>(0, 1)(rng);
  CHECK(MaxAbsDiffSerial(x, y, 123) == MaxAbsDiffParallel(x, y, 123));
}

TEST_CASE("column sums") {
  SparseRows a;
  a.rows = 2;
  a.cols = {0, 1, 1};
  a.values = {0.25, 0.5, 0.125};
  a.offsets = {0, 2, 3};
  CHECK(ColumnSums(a) == std::vector<double>{0.25, 0.625});
}

TEST_CASE("thread cap from the environment") {
  const int before = MaxThreads();
  ::setenv("LINKFORGE_THREADS", "3", 1);
  ConfigureThreadsFromEnv();
#ifdef _OPENMP
  CHECK(MaxThreads() == 3);
#endif
  ::setenv("LINKFORGE_THREADS", "junk", 1);
  CHECK_NOTHROW(ConfigureThreadsFromEnv());
  ::setenv("LINKFORGE_THREADS", std::to_string(before).c_str(), 1);
  ConfigureThreadsFromEnv();
  ::unsetenv("LINKFORGE_THREADS");
  CHECK(MaxThreads() == before);
}
