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

#include <cstdint>
#include <span>
#include <vector>

/// \file leakage.h
/// Leakage quantification for a channel matrix.
///
/// M is the plug-in (empirical) mutual information between secret and
/// observed time, in millibits. Finite samples bias M upwards even for a
/// channel that carries nothing, so M is compared against M0: the
/// `confidence` quantile of M over matrices resampled with the same
/// per-secret counts but times drawn independently of the secret from the
/// observed time marginal. M > M0 flags a timing channel.

namespace tcsim {

constexpr std::size_t kDefaultM0Trials = 100;
constexpr double kDefaultM0Confidence = 0.95;

struct LeakageReport {
    double mi_millibits = 0.0;
    double m0_millibits = 0.0;
    std::size_t trials = 0;
    double confidence = 0.0;
    bool leaky = false;
    std::uint64_t sample_count = 0;
};

/// Plug-in MI of a dense rows x cols count table, in millibits. Zero
/// cells contribute nothing. Throws ContractViolation on an empty table.
double mutual_information(std::size_t rows, std::size_t cols,
                          std::span<const std::uint64_t> counts);
double mutual_information(const ChannelMatrix &m);

/// One channel-less resample of m (same row sums, times from the column
/// marginal), as a dense count table with m's shape.
std::vector<std::uint64_t> resample_without_channel(const ChannelMatrix &m,
                                                    std::uint64_t seed,
                                                    std::size_t trial);

/// Nearest-rank quantile: the ceil(q * n)-th smallest value.
double nearest_rank_quantile(std::vector<double> values, double q);

/// Trials run in parallel (OpenMP); each trial has its own RNG substream
/// so the result does not depend on scheduling.
double zero_leakage_bound(const ChannelMatrix &m, std::size_t trials,
                          double confidence, std::uint64_t seed);
/// Serial reference of zero_leakage_bound(); bit-identical result.
double zero_leakage_bound_serial(const ChannelMatrix &m, std::size_t trials,
                                 double confidence, std::uint64_t seed);

LeakageReport detect(const ChannelMatrix &m,
                     std::size_t trials = kDefaultM0Trials,
                     double confidence = kDefaultM0Confidence,
                     std::uint64_t seed = 1);

} // namespace tcsim
