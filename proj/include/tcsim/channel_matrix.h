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

#include "tcsim/error.h"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tcsim {

struct Sample {
    std::size_t secret = 0;
    Cycles time = 0;

    bool operator==(const Sample &) const = default;
};

/// Joint histogram of (secret, observed spy time).
///
/// Columns are the sorted distinct observed times (or bucket lower edges).
/// Counts are stored row-major: counts()[secret * bin_count() + bin].
class ChannelMatrix {
  public:
    ChannelMatrix() = default;
    explicit ChannelMatrix(std::size_t secret_count);

    static ChannelMatrix from_samples(std::size_t secret_count,
                                      std::span<const Sample> samples);

    void add(std::size_t secret, Cycles time, std::uint64_t count = 1);
    /// Order-free: merging in any order gives the same matrix.
    void merge(const ChannelMatrix &other);

    /// Rebins times onto multiples of width (width 0 returns a copy).
    ChannelMatrix bucketed(Cycles width) const;

    std::size_t secret_count() const { return secrets_; }
    std::size_t bin_count() const { return bins_.size(); }
    const std::vector<Cycles> &time_bins() const { return bins_; }
    const std::vector<std::uint64_t> &counts() const { return counts_; }
    std::uint64_t count(std::size_t secret, std::size_t bin) const;

    std::uint64_t total_samples() const { return total_; }
    std::uint64_t row_sum(std::size_t secret) const;
    std::uint64_t column_sum(std::size_t bin) const;
    std::size_t nonzero_columns() const;

    bool operator==(const ChannelMatrix &) const = default;

  private:
    std::size_t bin_index_or_insert(Cycles time);

    std::size_t secrets_ = 0;
    std::vector<Cycles> bins_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// Malformed matrix CSV; line() is 1-based.
class MatrixFormatError : public ConfigError {
  public:
    MatrixFormatError(std::size_t line, const std::string &what)
        : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

/// `secret,time_cycles,count`, rows sorted by (secret, time), LF endings,
/// zero cells omitted.
void write_matrix_csv(std::ostream &out, const ChannelMatrix &m);
std::string matrix_csv(const ChannelMatrix &m);

/// Secret count is one past the largest secret seen.
ChannelMatrix read_matrix_csv(std::istream &in);

} // namespace tcsim
