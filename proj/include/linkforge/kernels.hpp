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

// Data-parallel inner loops. Each OpenMP kernel has a serial twin with the
// same arithmetic order per output element, so results match bit for bit.

#ifndef LINKFORGE_KERNELS_HPP_
#define LINKFORGE_KERNELS_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace linkforge::kernels {

// Compressed sparse rows: row r holds entries [offsets[r], offsets[r+1]).
struct SparseRows {
  std::size_t rows = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
};

// y = A x
void SpmvSerial(const SparseRows& a, std::span<const double> x,
                std::span<double> y);
void SpmvParallel(const SparseRows& a, std::span<const double> x,
                  std::span<double> y);

// max_i |a_i - b_i| over i != skip.
double MaxAbsDiffSerial(std::span<const double> a, std::span<const double> b,
                        std::size_t skip);
double MaxAbsDiffParallel(std::span<const double> a, std::span<const double> b,
                          std::size_t skip);

// Column sums of A.
std::vector<double> ColumnSums(const SparseRows& a);

// Applies LINKFORGE_THREADS, if set, as the OpenMP thread cap.
void ConfigureThreadsFromEnv();
int MaxThreads();

}  // namespace linkforge::kernels

#endif  // LINKFORGE_KERNELS_HPP_
