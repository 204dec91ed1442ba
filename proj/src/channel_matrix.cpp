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

#include "tcsim/channel_matrix.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

namespace tcsim {

ChannelMatrix::ChannelMatrix(std::size_t secret_count) : secrets_(secret_count) {}

ChannelMatrix ChannelMatrix::from_samples(std::size_t secret_count,
                                          std::span<const Sample> samples) {
    ChannelMatrix m(secret_count);
    for (const Sample &s : samples)
        m.add(s.secret, s.time);
    return m;
}

std::size_t ChannelMatrix::bin_index_or_insert(Cycles time) {
    auto it = std::lower_bound(bins_.begin(), bins_.end(), time);
    const auto index = static_cast<std::size_t>(it - bins_.begin());
    if (it != bins_.end() && *it == time)
        return index;

    const std::size_t old_bins = bins_.size();
    bins_.insert(it, time);
    std::vector<std::uint64_t> grown(secrets_ * bins_.size(), 0);
    for (std::size_t s = 0; s < secrets_; ++s)
        for (std::size_t b = 0; b < old_bins; ++b)
            grown[s * bins_.size() + b + (b >= index ? 1 : 0)] =
                counts_[s * old_bins + b];
    counts_ = std::move(grown);
    return index;
}

void ChannelMatrix::add(std::size_t secret, Cycles time, std::uint64_t count) {
    if (secret >= secrets_)
        throw ContractViolation("secret " + std::to_string(secret) +
                                " outside [0, " + std::to_string(secrets_) + ")");
    if (count == 0)
        return;
    const std::size_t b = bin_index_or_insert(time);
    counts_[secret * bins_.size() + b] += count;
    total_ += count;
}

void ChannelMatrix::merge(const ChannelMatrix &other) {
    if (other.secrets_ != secrets_)
        throw ContractViolation("merging matrices with different secret counts");
    for (std::size_t s = 0; s < secrets_; ++s)
        for (std::size_t b = 0; b < other.bin_count(); ++b)
            add(s, other.bins_[b], other.count(s, b));
}

ChannelMatrix ChannelMatrix::bucketed(Cycles width) const {
    if (width == 0)
        return *this;
    ChannelMatrix m(secrets_);
    for (std::size_t s = 0; s < secrets_; ++s)
        for (std::size_t b = 0; b < bin_count(); ++b)
            m.add(s, bins_[b] / width * width, count(s, b));
    return m;
}

std::uint64_t ChannelMatrix::count(std::size_t secret, std::size_t bin) const {
    return counts_.at(secret * bins_.size() + bin);
}

std::uint64_t ChannelMatrix::row_sum(std::size_t secret) const {
    std::uint64_t sum = 0;
    for (std::size_t b = 0; b < bin_count(); ++b)
        sum += count(secret, b);
    return sum;
}

std::uint64_t ChannelMatrix::column_sum(std::size_t bin) const {
    std::uint64_t sum = 0;
    for (std::size_t s = 0; s < secrets_; ++s)
        sum += count(s, bin);
    return sum;
}

std::size_t ChannelMatrix::nonzero_columns() const {
    std::size_t n = 0;
    for (std::size_t b = 0; b < bin_count(); ++b)
        n += column_sum(b) > 0 ? 1 : 0;
    return n;
}

// ---------------------------------------------------------------------------

void write_matrix_csv(std::ostream &out, const ChannelMatrix &m) {
    out << "secret,time_cycles,count\n";
    for (std::size_t s = 0; s < m.secret_count(); ++s)
        for (std::size_t b = 0; b < m.bin_count(); ++b)
            if (const auto c = m.count(s, b))
                out << s << ',' << m.time_bins()[b] << ',' << c << '\n';
}

std::string matrix_csv(const ChannelMatrix &m) {
    std::ostringstream os;
    write_matrix_csv(os, m);
    return os.str();
}

namespace {

std::uint64_t parse_field(std::string_view text, std::size_t line,
                          const char *what) {
    std::uint64_t v = 0;
    const char *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw MatrixFormatError(line, std::string("bad ") + what + " '" +
                                          std::string(text) + "'");
    return v;
}

} // namespace

ChannelMatrix read_matrix_csv(std::istream &in) {
    std::string text;
    std::size_t line_no = 0;
    if (!std::getline(in, text))
        throw MatrixFormatError(1, "empty input");
    ++line_no;
    if (!text.empty() && text.back() == '\r')
        text.pop_back();
    if (text != "secret,time_cycles,count")
        throw MatrixFormatError(1, "expected header 'secret,time_cycles,count'");

    struct Cell {
        std::uint64_t secret, time, count;
    };
    std::vector<Cell> cells;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    std::uint64_t max_secret = 0;

    while (std::getline(in, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r')
            text.pop_back();
        if (text.empty())
            continue;
        const auto c1 = text.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : text.find(',', c1 + 1);
        if (c2 == std::string::npos || text.find(',', c2 + 1) != std::string::npos)
            throw MatrixFormatError(line_no, "expected 3 comma-separated fields");
        std::string_view view(text);
        const Cell cell{parse_field(view.substr(0, c1), line_no, "secret"),
                        parse_field(view.substr(c1 + 1, c2 - c1 - 1), line_no,
                                    "time_cycles"),
                        parse_field(view.substr(c2 + 1), line_no, "count")};
        if (cell.secret > 1'000'000)
            throw MatrixFormatError(line_no, "secret out of range");
        if (!seen.insert({cell.secret, cell.time}).second)
            throw MatrixFormatError(line_no, "duplicate (secret, time_cycles)");
        max_secret = std::max(max_secret, cell.secret);
        cells.push_back(cell);
    }
    if (cells.empty())
        throw MatrixFormatError(line_no, "no data rows");

    ChannelMatrix m(static_cast<std::size_t>(max_secret) + 1);
    for (const Cell &c : cells)
        m.add(static_cast<std::size_t>(c.secret), c.time, c.count);
    return m;
}

} // namespace tcsim
