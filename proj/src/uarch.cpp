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

#include "tcsim/uarch.h"

#include <algorithm>
#include <bit>
#include <numeric>

namespace tcsim {

// ---------------------------------------------------------------------------
// CacheGeometry / CacheState

void CacheGeometry::validate(const std::string &name) const {
    auto fail = [&](const std::string &what) {
        throw ConfigError(name + ": " + what);
    };
    if (sets < 1)
        fail("sets must be >= 1");
    if (ways < 1)
        fail("ways must be >= 1");
    if (line_bytes < 4 || !std::has_single_bit(line_bytes))
        fail("line_bytes must be a power of two >= 4");
    if (miss_latency <= hit_latency)
        fail("miss_latency must exceed hit_latency");
    if (writeback_latency < 1)
        fail("writeback_latency must be >= 1");
}

CacheState::CacheState(const CacheGeometry &geometry, CacheKind kind)
    : geometry_(geometry), kind_(kind),
      lines_(std::size_t{geometry.sets} * geometry.ways) {
    geometry_.validate(kind == CacheKind::Data ? "l1d" : "l1i");
}

std::uint32_t CacheState::set_index(Address address) const {
    return static_cast<std::uint32_t>((address / geometry_.line_bytes) %
                                      geometry_.sets);
}

std::uint64_t CacheState::tag_of(Address address) const {
    return (address / geometry_.line_bytes) / geometry_.sets;
}

const CacheLine &CacheState::line(std::uint32_t set, std::uint32_t way) const {
    return lines_.at(std::size_t{set} * geometry_.ways + way);
}

CacheLine &CacheState::at(std::uint32_t set, std::uint32_t way) {
    return lines_[std::size_t{set} * geometry_.ways + way];
}

void CacheState::touch(std::uint32_t set, std::uint32_t way) {
    const std::uint32_t rank = at(set, way).lru_rank;
    for (std::uint32_t w = 0; w < geometry_.ways; ++w) {
        CacheLine &other = at(set, w);
        if (w != way && other.valid && other.lru_rank < rank)
            ++other.lru_rank;
    }
    at(set, way).lru_rank = 0;
}

AccessResult CacheState::access(Address address, AccessKind kind) {
    const bool fetch = kind == AccessKind::Fetch;
    if (fetch != (kind_ == CacheKind::Instruction))
        throw ContractViolation(fetch ? "fetch on a data cache"
                                      : "read/write on an instruction cache");

    const std::uint32_t set = set_index(address);
    const std::uint64_t tag = tag_of(address);

    for (std::uint32_t w = 0; w < geometry_.ways; ++w) {
        CacheLine &l = at(set, w);
        if (l.valid && l.tag == tag) {
            touch(set, w);
            if (kind == AccessKind::Write)
                l.dirty = true;
            return {true, geometry_.hit_latency, false};
        }
    }

    // Miss: fill the first invalid way, else evict the LRU line.
    std::uint32_t victim = geometry_.ways;
    for (std::uint32_t w = 0; w < geometry_.ways && victim == geometry_.ways;
         ++w)
        if (!at(set, w).valid)
            victim = w;
    if (victim == geometry_.ways) {
        victim = 0;
        for (std::uint32_t w = 1; w < geometry_.ways; ++w)
            if (at(set, w).lru_rank > at(set, victim).lru_rank)
                victim = w;
    }

    CacheLine &v = at(set, victim);
    const bool evicted_dirty = v.valid && v.dirty;
    for (std::uint32_t w = 0; w < geometry_.ways; ++w) {
        CacheLine &other = at(set, w);
        if (w != victim && other.valid)
            ++other.lru_rank;
    }
    v = CacheLine{tag, true, kind == AccessKind::Write, 0};

    Cycles latency = geometry_.miss_latency;
    if (evicted_dirty)
        latency += geometry_.writeback_latency;
    return {false, latency, evicted_dirty};
}

Cycles CacheState::clean_all() {
    if (kind_ != CacheKind::Data)
        throw ContractViolation("clean_all on an instruction cache");
    Cycles dirty = 0;
    for (CacheLine &l : lines_) {
        if (l.dirty) {
            ++dirty;
            l.dirty = false;
        }
    }
    return geometry_.clean_base_cost + dirty * geometry_.writeback_latency;
}

Cycles CacheState::invalidate_all() {
    std::fill(lines_.begin(), lines_.end(), CacheLine{});
    return geometry_.invalidate_latency;
}

bool CacheState::contains(Address address) const {
    const std::uint32_t set = set_index(address);
    const std::uint64_t tag = tag_of(address);
    for (std::uint32_t w = 0; w < geometry_.ways; ++w)
        if (line(set, w).valid && line(set, w).tag == tag)
            return true;
    return false;
}

std::size_t CacheState::valid_count() const {
    return std::count_if(lines_.begin(), lines_.end(),
                         [](const CacheLine &l) { return l.valid; });
}

std::size_t CacheState::dirty_count() const {
    return std::count_if(lines_.begin(), lines_.end(),
                         [](const CacheLine &l) { return l.dirty; });
}

// ---------------------------------------------------------------------------
// BHT

void BhtGeometry::validate() const {
    if (index_bits < 1 || index_bits > 20)
        throw ConfigError("bht: index_bits must be in [1, 20]");
    if (reset_value > 3)
        throw ConfigError("bht: reset_value must be a 2-bit counter value");
}

BhtState::BhtState(const BhtGeometry &geometry)
    : geometry_(geometry), counters_(geometry.entries(), geometry.reset_value) {
    geometry_.validate();
}

std::size_t BhtState::index_of(Address pc) const {
    return static_cast<std::size_t>((pc >> 2) & (geometry_.entries() - 1));
}

BranchOutcome BhtState::predict_and_update(Address pc, bool actual_taken) {
    std::uint8_t &c = counters_[index_of(pc)];
    const bool predicted = c >= 2;
    if (actual_taken) {
        if (c < 3)
            ++c;
    } else if (c > 0) {
        --c;
    }
    return {predicted, predicted != actual_taken};
}

Cycles BhtState::invalidate() {
    std::fill(counters_.begin(), counters_.end(), geometry_.reset_value);
    return geometry_.invalidate_latency;
}

// ---------------------------------------------------------------------------
// RAT

void RatGeometry::validate() const {
    if (phys_count <= kLogicalRegs)
        throw ConfigError("rat: phys_count must exceed 32");
    if (phys_count > 4096)
        throw ConfigError("rat: phys_count must be <= 4096");
}

RatState::RatState(const RatGeometry &geometry) : geometry_(geometry) {
    geometry_.validate();
    clear();
}

void RatState::clear() {
    std::iota(map_.begin(), map_.end(), 0u);
    free_.clear();
    for (unsigned p = kLogicalRegs; p < geometry_.phys_count; ++p)
        free_.push_back(p);
    in_flight_.clear();
}

Cycles RatState::occupancy_penalty(std::size_t free_length) const {
    const std::size_t threshold = geometry_.pressure_threshold();
    return free_length > threshold ? 0 : threshold - free_length;
}

std::optional<RatAllocation> RatState::allocate(unsigned logical) {
    if (logical >= kLogicalRegs)
        throw ContractViolation("logical register index out of range");
    if (free_.empty())
        return std::nullopt;
    const Cycles latency =
        geometry_.rename_base + occupancy_penalty(free_.size());
    const unsigned physical = free_.front();
    free_.pop_front();
    in_flight_.push_back(map_[logical]);
    map_[logical] = physical;
    return RatAllocation{physical, latency};
}

std::size_t RatState::retire_all() {
    const std::size_t n = in_flight_.size();
    free_.insert(free_.end(), in_flight_.begin(), in_flight_.end());
    in_flight_.clear();
    return n;
}

bool RatState::is_identity() const { return renamed().none(); }

std::bitset<kLogicalRegs> RatState::renamed() const {
    std::bitset<kLogicalRegs> r;
    for (unsigned i = 0; i < kLogicalRegs; ++i)
        r[i] = map_[i] != i;
    return r;
}

bool RatState::is_consistent() const {
    std::vector<int> seen(geometry_.phys_count, 0);
    auto mark = [&](unsigned p) {
        if (p >= seen.size())
            return false;
        return ++seen[p] == 1;
    };
    for (unsigned p : map_)
        if (!mark(p))
            return false;
    for (unsigned p : free_)
        if (!mark(p))
            return false;
    for (unsigned p : in_flight_)
        if (!mark(p))
            return false;
    return std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; });
}

// ---------------------------------------------------------------------------
// Residual flip-flops

ResidualState::ResidualState()
    : regs_{{"store_buffer_occupancy", 4, 1, 0}, {"prefetch_stride", 8, 0, 0}} {}

void ResidualState::note_store() {
    auto &sb = regs_[kStoreBuffer].value;
    if (sb < kStoreBufferMax)
        ++sb;
}

void ResidualState::set_prefetch_stride(std::uint64_t stride) {
    set_value(kPrefetchStride, stride);
}

void ResidualState::set_value(std::size_t which, std::uint64_t value) {
    ResidualRegister &r = regs_.at(which);
    r.value = value & ((std::uint64_t{1} << r.bits) - 1);
}

Cycles ResidualState::timing_influence() const {
    Cycles total = 0;
    for (const auto &r : regs_)
        total += r.value * r.cycles_per_unit;
    return total;
}

Cycles ResidualState::consume_influence() {
    const Cycles influence = timing_influence();
    regs_[kStoreBuffer].value = 0;
    return influence;
}

Cycles ResidualState::ff_clear(Cycles latency) {
    for (auto &r : regs_)
        r.value = 0;
    return latency;
}

bool ResidualState::all_zero() const {
    return std::all_of(regs_.begin(), regs_.end(),
                       [](const ResidualRegister &r) { return r.value == 0; });
}

// ---------------------------------------------------------------------------

void UarchConfig::validate() const {
    l1d.validate("l1d");
    l1i.validate("l1i");
    bht.validate();
    rat.validate();
}

MicroarchState reset_state(const UarchConfig &config) {
    config.validate();
    return MicroarchState{CacheState(config.l1d, CacheKind::Data),
                          CacheState(config.l1i, CacheKind::Instruction),
                          BhtState(config.bht), RatState(config.rat),
                          ResidualState(), config.ff_clear_latency};
}

Cycles clear_everything(MicroarchState &state) {
    Cycles c = state.l1d.clean_all();
    c += state.l1d.invalidate_all();
    c += state.l1i.invalidate_all();
    c += state.bht.invalidate();
    c += state.residual.ff_clear(state.ff_clear_latency);
    state.rat.clear();
    return c;
}

} // namespace tcsim
