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


// Serial reference vs OpenMP kernel for each parallel hot spot. Run with
// LINKFORGE_THREADS to pin the thread count.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "linkforge/ctr_estimators.hpp"
#include "linkforge/evaluation.hpp"
#include "linkforge/kernels.hpp"
#include "linkforge/synth_gen.hpp"
#include "linkforge/transition_stats.hpp"

namespace {

using namespace linkforge;

kernels::SparseRows RandomRows(std::size_t n, int degree) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint32_t> col(0, static_cast<std::uint32_t>(n - 1));
  std::uniform_real_distribution<double> val(0.0, 0.1);
  kernels::SparseRows a;
  a.rows = n;
  for (std::size_t r = 0; r < n; ++r) {
    for (int k = 0; k < degree; ++k) {
      a.cols.push_back(col(rng));
      a.values.push_back(val(rng));
    }
    a.offsets.push_back(a.cols.size());
  }
  return a;
}

template <bool kParallel>
void BM_Spmv(benchmark::State& state) {
  const auto a = RandomRows(static_cast<std::size_t>(state.range(0)), 8);
  std::vector<double> x(a.rows, 1.0), y(a.rows);
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::SpmvParallel(a, x, y);
    } else {
      kernels::SpmvSerial(a, x, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Spmv<true>)->Name("spmv/parallel")->Arg(1 << 16)->Arg(1 << 20);

GroundTruthModel Model(int pages) {
  RandomModelOptions o;
  o.pages = pages;
  o.out_degree = 6;
  o.seed = 5;
  return RandomModel(o);
}

ClickthroughMatrix WalkMatrix(int pages) {
  const auto model = Model(pages);
  ClickthroughMatrix m;
  for (const auto& p : model.pages) m.pages.Intern(p);
  for (const auto& l : model.links) {
    m.entries[LinkKey(*m.pages.Find(l.source), *m.pages.Find(l.target))] = l.p;
  }
  return m;
}

template <bool kParallel>
void BM_PowerIteration(benchmark::State& state) {
  const RandomWalkSolver solver(WalkMatrix(static_cast<int>(state.range(0))));
  const std::string target = solver.pages().Name(0);
  for (auto _ : state) {
    auto r = kParallel ? solver.Solve(target) : solver.SolveSerial(target);
    benchmark::DoNotOptimize(r.q.data());
  }
}
BENCHMARK(BM_PowerIteration<false>)->Name("power_iteration/serial")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerIteration<true>)->Name("power_iteration/parallel")->Arg(20000)->Unit(benchmark::kMillisecond);

const GeneratedTraces& Traces() {
  static const GeneratedTraces t = GenerateTraces(Model(500), 200000);
  return t;
}

template <bool kParallel>
void BM_Accumulate(benchmark::State& state) {
  const auto& trees = Traces().trees;
  for (auto _ : state) {
    auto s = kParallel ? Accumulate(trees, {}, {}) : AccumulateSerial(trees, {}, {});
    benchmark::DoNotOptimize(&s);
  }
}
BENCHMARK(BM_Accumulate<false>)->Name("accumulate/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Accumulate<true>)->Name("accumulate/parallel")->Unit(benchmark::kMillisecond);

template <bool kParallel>
void BM_Bootstrap(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  PairedSeries s;
  for (int i = 0; i < 2000; ++i) {
    const double t = n(rng);
    s.truths.push_back(t);
    s.predictions.push_back(t + n(rng));
  }
  const auto metric = MetricFunction(Metric::kSpearman);
  for (auto _ : state) {
    auto ci = kParallel ? BootstrapCi(s, metric) : BootstrapCiSerial(s, metric);
    benchmark::DoNotOptimize(&ci);
  }
}
BENCHMARK(BM_Bootstrap<false>)->Name("bootstrap/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bootstrap<true>)->Name("bootstrap/parallel")->Unit(benchmark::kMillisecond);

template <bool kParallel>
void BM_Generate(benchmark::State& state) {
  const auto model = Model(500);
  for (auto _ : state) {
    auto g = kParallel ? GenerateTraces(model, 100000) : GenerateTracesSerial(model, 100000);
    benchmark::DoNotOptimize(&g);
  }
}
BENCHMARK(BM_Generate<false>)->Name("generate_traces/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Generate<true>)->Name("generate_traces/parallel")->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  kernels::ConfigureThreadsFromEnv();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
