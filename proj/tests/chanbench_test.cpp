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

#include "tcsim/chanbench.h"

#include <gtest/gtest.h>

#include <omp.h>

namespace tcsim {
namespace {

BenchConfig small(Component c, std::size_t samples = 10) {
    BenchConfig cfg;
    cfg.component = c;
    cfg.uarch.l1d.sets = cfg.uarch.l1i.sets = 8;
    cfg.uarch.bht.index_bits = 4;
    cfg.samples_per_secret = samples;
    cfg.seed = 99;
    return cfg;
}

TEST(SecretCount, Defaults) {
    const UarchConfig u;
    EXPECT_EQ(default_secret_count(Component::L1d, u), 129u);
    EXPECT_EQ(default_secret_count(Component::L1i, u), 129u);
    EXPECT_EQ(default_secret_count(Component::Bht, u), 129u);
    EXPECT_EQ(default_secret_count(Component::Rat, u), 33u);
    UarchConfig big;
    big.bht.index_bits = 10;
    EXPECT_EQ(default_secret_count(Component::Bht, big), 129u);
}

TEST(BenchConfig, Validation) {
    BenchConfig cfg = small(Component::L1d);
    cfg.secret_count = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.secret_count = 18;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.secret_count = 4;
    cfg.samples_per_secret = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.samples_per_secret = 1;
    cfg.mitigation = FenceConfig::fence_t_s(500);
    EXPECT_THROW(cfg.validate(), PadOverrun);
}

TEST(Trial, UnmitigatedExtremesDiffer) {
    for (Component c : {Component::L1d, Component::L1i, Component::Bht, Component::Rat}) {
        BenchConfig cfg;
        cfg.component = c;
        TrialContext ctx(cfg);
        Rng rng(1);
        const std::size_t last = cfg.effective_secret_count() - 1;
        EXPECT_NE(ctx.run_trial(0, rng).time, ctx.run_trial(last, rng).time) << to_string(c);
    }
}

TEST(Trial, OutOfRangeSecret) {
    const BenchConfig cfg = small(Component::L1d);
    TrialContext ctx(cfg);
    Rng rng(1);
    EXPECT_THROW(ctx.run_trial(cfg.effective_secret_count(), rng), ContractViolation);
}

TEST(Trial, BhtMispredictsDependOnlyOnSecret) {
    BenchConfig cfg;
    cfg.component = Component::Bht;
    TrialContext ctx(cfg);
    Rng rng(3);
    const std::size_t entries = cfg.uarch.bht.entries();
    for (std::size_t s : {5u, 0u, 128u, 64u, 5u, 1u}) {
        ctx.run_trial(s, rng);
        EXPECT_EQ(ctx.last_probe().mispredicts, entries + s);
    }
}

TEST(Trial, FencedSpyStateIsIdentical) {
    for (Component c : {Component::L1d, Component::L1i, Component::Bht, Component::Rat}) {
        BenchConfig cfg;
        cfg.component = c;
        cfg.mitigation = FenceConfig::fence_t_s();
        TrialContext ctx(cfg);
        ctx.record_pre_probe(true);
        Rng rng(4);
        ctx.run_trial(0, rng);
        const MicroarchState first = *ctx.pre_probe_uarch();
        const Cycles t = ctx.last_probe().cycles;
        for (std::size_t s = 1; s < cfg.effective_secret_count(); s += 3) {
            ctx.run_trial(s, rng);
            ASSERT_EQ(*ctx.pre_probe_uarch(), first) << to_string(c) << " " << s;
            ASSERT_EQ(ctx.last_probe().cycles, t);
        }
    }
}

TEST(Bench, RowSumsAreSamplesPerSecret) {
    BenchConfig cfg = small(Component::L1d);
    cfg.secret_count = 4;
    const ChannelMatrix m = run_bench(cfg);
    ASSERT_EQ(m.secret_count(), 4u);
    for (std::size_t s = 0; s < 4; ++s)
        EXPECT_EQ(m.row_sum(s), 10u);
    EXPECT_EQ(m.total_samples(), 40u);
}

TEST(Bench, SameSeedSameMatrix) {
    BenchConfig cfg = small(Component::L1d, 200);
    cfg.noise_cycles = 7;
    EXPECT_EQ(run_bench(cfg), run_bench(cfg));
}

TEST(Bench, ParallelMatchesSerial) {
    for (Component c : {Component::L1d, Component::Bht, Component::Rat}) {
        BenchConfig cfg = small(c, 300);
        cfg.noise_cycles = 5;
        const ChannelMatrix serial = run_bench_serial(cfg);
        for (int threads : {1, 2, 4}) {
            omp_set_num_threads(threads);
            EXPECT_EQ(run_bench(cfg), serial) << to_string(c) << " threads " << threads;
        }
    }
}

TEST(Bench, OrderDoesNotChangeMatrix) {
    BenchConfig a = small(Component::L1i, 50);
    BenchConfig b = a;
    b.seed = 12345;
    ASSERT_NE(trial_order(a), trial_order(b));
    EXPECT_EQ(run_bench(a), run_bench(b));
}

TEST(Bench, TrialOrderIsAPermutation) {
    const BenchConfig cfg = small(Component::Bht, 7);
    auto order = trial_order(cfg);
    std::vector<std::size_t> seen(cfg.effective_secret_count(), 0);
    for (std::size_t s : order)
        ++seen[s];
    for (std::size_t n : seen)
        EXPECT_EQ(n, 7u);
}

TEST(Bench, FencedMatrixHasOneColumn) {
    for (Component c : {Component::L1d, Component::L1i, Component::Bht, Component::Rat}) {
        BenchConfig cfg = small(c, 20);
        cfg.mitigation = FenceConfig::fence_t_s();
        EXPECT_EQ(run_bench(cfg).nonzero_columns(), 1u) << to_string(c);
    }
}

TEST(Bench, UnmitigatedDirectMappedIsInjective) {
    BenchConfig cfg = small(Component::L1d, 3);
    cfg.uarch.l1d.ways = 1;
    const ChannelMatrix m = run_bench(cfg);
    EXPECT_EQ(m.bin_count(), m.secret_count());
    for (std::size_t s = 0; s < m.secret_count(); ++s)
        EXPECT_EQ(m.count(s, s), 3u);
}

TEST(Bench, NoiseStaysInRange) {
    BenchConfig quiet = small(Component::L1d, 100);
    quiet.mitigation = FenceConfig::fence_t_s();
    BenchConfig noisy = quiet;
    noisy.noise_cycles = 9;
    const Cycles base = run_bench(quiet).time_bins().front();
    const ChannelMatrix m = run_bench(noisy);
    EXPECT_GE(m.time_bins().front(), base);
    EXPECT_LE(m.time_bins().back(), base + 9);
    EXPECT_GT(m.bin_count(), 1u);
}

TEST(Bench, BucketWidthApplied) {
    BenchConfig cfg = small(Component::L1d, 5);
    cfg.bucket_width = 100;
    const ChannelMatrix m = run_bench(cfg);
    EXPECT_GT(m.bin_count(), 1u);
    for (Cycles t : m.time_bins())
        EXPECT_EQ(t % 100, 0u);
}

TEST(Bench, NaiveFenceStillConstantTime) {
    BenchConfig cfg = small(Component::L1d, 10);
    cfg.mitigation = FenceConfig::naive_hw();
    EXPECT_EQ(run_bench(cfg).nonzero_columns(), 1u);
}

} // namespace
} // namespace tcsim
