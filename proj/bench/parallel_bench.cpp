/*
 * SPDX-FileCopyrightText: Copyright 2026 The tcsim Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// OpenMP kernels against their serial references.

#include "tcsim/chanbench.h"
#include "tcsim/leakage.h"

#include <benchmark/benchmark.h>

namespace {

tcsim::BenchConfig config(tcsim::Component c, std::size_t samples) {
    tcsim::BenchConfig cfg;
    cfg.component = c;
    cfg.samples_per_secret = samples;
    cfg.seed = 42;
    return cfg;
}

void BM_ChannelParallel(benchmark::State &state) {
    const auto cfg = config(static_cast<tcsim::Component>(state.range(0)), 200);
    for (auto _ : state)
        benchmark::DoNotOptimize(tcsim::run_bench(cfg));
}

void BM_ChannelSerial(benchmark::State &state) {
    const auto cfg = config(static_cast<tcsim::Component>(state.range(0)), 200);
    for (auto _ : state)
        benchmark::DoNotOptimize(tcsim::run_bench_serial(cfg));
}

void BM_BoundParallel(benchmark::State &state) {
    const auto m = tcsim::run_bench(config(tcsim::Component::L1d, 200));
    for (auto _ : state)
        benchmark::DoNotOptimize(tcsim::zero_leakage_bound(m, 20, 0.95, 7));
}

void BM_BoundSerial(benchmark::State &state) {
    const auto m = tcsim::run_bench(config(tcsim::Component::L1d, 200));
    for (auto _ : state)
        benchmark::DoNotOptimize(tcsim::zero_leakage_bound_serial(m, 20, 0.95, 7));
}

constexpr auto kL1d = static_cast<int>(tcsim::Component::L1d);
constexpr auto kRat = static_cast<int>(tcsim::Component::Rat);

} // namespace

BENCHMARK(BM_ChannelParallel)->Arg(kL1d)->Arg(kRat)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChannelSerial)->Arg(kL1d)->Arg(kRat)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
