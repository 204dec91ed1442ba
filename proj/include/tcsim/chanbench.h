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

#pragma once

#include "tcsim/channel_matrix.h"
#include "tcsim/fence.h"
#include "tcsim/kernel.h"

#include <optional>
#include <random>
#include <vector>

/// \file chanbench.h
/// Trojan/spy channel bench. A trial is: spy primes, trojan encodes its
/// secret, the context switch applies the mitigation under test, spy
/// probes and reports its own run time. Trojan and spy share one
/// MicroarchState; that sharing is the channel.

namespace tcsim {

using Rng = std::mt19937_64;

struct BenchConfig {
    Component component = Component::L1d;
    /// 0 selects default_secret_count().
    std::size_t secret_count = 0;
    std::size_t samples_per_secret = 1000;
    FenceConfig mitigation = FenceConfig::none();
    std::uint64_t seed = 1;
    /// Uniform jitter in [0, noise_cycles] added to every observation.
    Cycles noise_cycles = 0;
    /// Fixed-width time bucketing of the result (0 keeps exact times).
    Cycles bucket_width = 0;
    UarchConfig uarch{};
    EngineConfig engine{};

    std::size_t effective_secret_count() const;
    /// Geometry, counts, mitigation and pad budget. Throws ConfigError.
    void validate() const;
};

/// Capacity + 1 for caches and the RAT, BHT entries + 1 capped at 129.
std::size_t default_secret_count(Component c, const UarchConfig &cfg);

/// Architectural state every trial starts from.
ArchState bench_initial_arch();

/// Independent worker context: one ArchState/MicroarchState pair that
/// successive trials run on.
class TrialContext {
  public:
    explicit TrialContext(const BenchConfig &cfg);

    /// PadOverrun propagates. secret must be < the secret count.
    Sample run_trial(std::size_t secret, Rng &rng);

    /// Keep a copy of the state the spy probe starts from.
    void record_pre_probe(bool on) { record_ = on; }
    const std::optional<MicroarchState> &pre_probe_uarch() const { return pre_probe_; }
    const RunResult &last_probe() const { return last_probe_; }
    const MicroarchState &uarch() const { return uarch_; }

  private:
    const BenchConfig &cfg_;
    std::size_t secrets_;
    ArchState arch0_;
    ArchState arch_;
    MicroarchState uarch_;
    Kernel probe_;
    std::vector<Kernel> primes_;
    bool record_ = false;
    std::optional<MicroarchState> pre_probe_;
    RunResult last_probe_;
};

/// Trials per worker context. Each chunk starts from reset state with its
/// own RNG substream, so the matrix does not depend on the thread count.
constexpr std::size_t kTrialsPerChunk = 2048;

/// Sweeps every secret samples_per_secret times in seeded random order.
/// Chunks run in parallel (OpenMP).
ChannelMatrix run_bench(const BenchConfig &cfg);

/// Reference implementation: the same chunks, one after another.
ChannelMatrix run_bench_serial(const BenchConfig &cfg);

/// The seeded trial order both implementations use.
std::vector<std::size_t> trial_order(const BenchConfig &cfg);

} // namespace tcsim
