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

#include "tcsim/leakage.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace tcsim {

double mutual_information(std::size_t rows, std::size_t cols,
                          std::span<const std::uint64_t> counts) {
    if (counts.size() != rows * cols)
        throw ContractViolation("count table does not match its shape");
    std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto n = static_cast<double>(counts[r * cols + c]);
            row_sum[r] += n;
            col_sum[c] += n;
            total += n;
        }
    }
    if (total == 0.0)
        throw ContractViolation("mutual information of an empty matrix");

    double bits = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto n = static_cast<double>(counts[r * cols + c]);
            if (n == 0.0)
                continue;
            bits += n * std::log2(n * total / (row_sum[r] * col_sum[c]));
        }
    }
    // Plug-in MI is non-negative; clamp rounding noise around zero.
    return std::max(0.0, 1000.0 * bits / total);
}

double mutual_information(const ChannelMatrix &m) {
    return mutual_information(m.secret_count(), m.bin_count(), m.counts());
}

std::vector<std::uint64_t> resample_without_channel(const ChannelMatrix &m,
                                                    std::uint64_t seed,
                                                    std::size_t trial) {
    const std::size_t rows = m.secret_count(), cols = m.bin_count();
    std::vector<double> marginal(cols);
    for (std::size_t b = 0; b < cols; ++b)
        marginal[b] = static_cast<double>(m.column_sum(b));

    std::seed_seq seq{seed, std::uint64_t{trial}};
    std::mt19937_64 rng(seq);
    std::discrete_distribution<std::size_t> draw(marginal.begin(), marginal.end());

    std::vector<std::uint64_t> counts(rows * cols, 0);
    for (std::size_t s = 0; s < rows; ++s) {
        const std::uint64_t n = m.row_sum(s);
        for (std::uint64_t i = 0; i < n; ++i)
            ++counts[s * cols + draw(rng)];
    }
    return counts;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
    if (values.empty())
        throw ContractViolation("quantile of an empty set");
    if (!(q > 0.0 && q <= 1.0))
        throw ContractViolation("quantile must be in (0, 1]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

namespace {

void check_bound_args(const ChannelMatrix &m, std::size_t trials, double confidence) {
    if (m.total_samples() == 0)
        throw ContractViolation("zero-leakage bound of an empty matrix");
    if (trials < 1)
        throw ContractViolation("zero-leakage bound needs >= 1 trial");
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw ContractViolation("confidence must be in (0, 1]");
}

double resampled_mi(const ChannelMatrix &m, std::uint64_t seed, std::size_t trial) {
    const auto counts = resample_without_channel(m, seed, trial);
    return mutual_information(m.secret_count(), m.bin_count(), counts);
}

} // namespace

double zero_leakage_bound(const ChannelMatrix &m, std::size_t trials,
                          double confidence, std::uint64_t seed) {
    check_bound_args(m, trials, confidence);
    std::vector<double> mis(trials);
#pragma omp parallel for schedule(static)
    for (std::size_t t = 0; t < trials; ++t)
        mis[t] = resampled_mi(m, seed, t);
    return nearest_rank_quantile(std::move(mis), confidence);
}

double zero_leakage_bound_serial(const ChannelMatrix &m, std::size_t trials,
                                 double confidence, std::uint64_t seed) {
    check_bound_args(m, trials, confidence);
    std::vector<double> mis;
    mis.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t)
        mis.push_back(resampled_mi(m, seed, t));
    return nearest_rank_quantile(std::move(mis), confidence);
}

LeakageReport detect(const ChannelMatrix &m, std::size_t trials,
                     double confidence, std::uint64_t seed) {
    LeakageReport r;
    r.mi_millibits = mutual_information(m);
    r.m0_millibits = zero_leakage_bound(m, trials, confidence, seed);
    r.trials = trials;
    r.confidence = confidence;
    r.leaky = r.mi_millibits > r.m0_millibits;
    r.sample_count = m.total_samples();
    return r;
}

} // namespace tcsim
