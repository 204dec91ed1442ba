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

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

/// \file uarch.h
/// Models of the on-core state a timing channel can go through: the L1
/// caches, a branch history table, the register alias table and a small
/// pool of residual flip-flops. Every structure has a timing contract (what
/// an access costs given the current state) and a clear contract (what it
/// looks like after the corresponding invalidation).

namespace tcsim {

constexpr unsigned kLogicalRegs = 32;

struct CacheGeometry {
    std::uint32_t sets = 64;
    std::uint32_t ways = 2;
    std::uint32_t line_bytes = 64;
    Cycles hit_latency = 2;
    Cycles miss_latency = 20;
    /// Added to a miss for every dirty victim, and per line by clean_all().
    Cycles writeback_latency = 8;
    Cycles clean_base_cost = 10;
    Cycles invalidate_latency = 4;

    std::uint32_t lines() const { return sets * ways; }
    std::uint64_t capacity_bytes() const {
        return std::uint64_t{lines()} * line_bytes;
    }

    /// Throws ConfigError naming the first violated constraint.
    void validate(const std::string &name = "cache") const;

    bool operator==(const CacheGeometry &) const = default;
};

enum class CacheKind { Data, Instruction };
enum class AccessKind { Read, Write, Fetch };

struct CacheLine {
    std::uint64_t tag = 0;
    bool valid = false;
    bool dirty = false;
    /// 0 is most recently used. Distinct among the valid lines of a set.
    std::uint32_t lru_rank = 0;

    bool operator==(const CacheLine &) const = default;
};

struct AccessResult {
    bool hit = false;
    Cycles latency = 0;
    bool evicted_dirty = false;
};

/// Set-associative write-back cache with true LRU replacement.
class CacheState {
  public:
    CacheState(const CacheGeometry &geometry, CacheKind kind);

    /// Read/Write are data-cache accesses, Fetch is instruction-cache only.
    /// Any other pairing throws ContractViolation.
    AccessResult access(Address address, AccessKind kind);

    /// Writes back every dirty line, keeping tags and valid bits. Data
    /// caches only.
    Cycles clean_all();

    /// Drops every line, dirty data included. Callers that need the data
    /// must clean_all() first.
    Cycles invalidate_all();

    const CacheGeometry &geometry() const { return geometry_; }
    CacheKind kind() const { return kind_; }

    std::uint32_t set_index(Address address) const;
    std::uint64_t tag_of(Address address) const;
    const CacheLine &line(std::uint32_t set, std::uint32_t way) const;

    bool contains(Address address) const;
    std::size_t valid_count() const;
    std::size_t dirty_count() const;

    bool operator==(const CacheState &) const = default;

  private:
    CacheLine &at(std::uint32_t set, std::uint32_t way);
    void touch(std::uint32_t set, std::uint32_t way);

    CacheGeometry geometry_;
    CacheKind kind_;
    std::vector<CacheLine> lines_;
};

struct BhtGeometry {
    unsigned index_bits = 7;
    std::uint8_t reset_value = 1; // weakly not-taken
    Cycles invalidate_latency = 4;

    std::size_t entries() const { return std::size_t{1} << index_bits; }
    void validate() const;

    bool operator==(const BhtGeometry &) const = default;
};

struct BranchOutcome {
    bool predicted_taken = false;
    bool mispredict = false;
};

/// Table of 2-bit saturating counters indexed by (pc / 4) mod entries.
class BhtState {
  public:
    explicit BhtState(const BhtGeometry &geometry);

    BranchOutcome predict_and_update(Address pc, bool actual_taken);
    Cycles invalidate();

    std::size_t index_of(Address pc) const;
    std::uint8_t counter(std::size_t index) const { return counters_.at(index); }
    const BhtGeometry &geometry() const { return geometry_; }

    bool operator==(const BhtState &) const = default;

  private:
    BhtGeometry geometry_;
    std::vector<std::uint8_t> counters_;
};

struct RatGeometry {
    unsigned phys_count = 64;
    Cycles rename_base = 1;
    /// Charged by the engine when an allocation finds the free list empty
    /// and has to wait for in-flight registers to retire.
    Cycles stall_penalty = 8;

    /// Free-list length at or below which allocations get slower.
    unsigned pressure_threshold() const { return phys_count / 4; }
    void validate() const;

    bool operator==(const RatGeometry &) const = default;
};

struct RatAllocation {
    unsigned physical = 0;
    Cycles latency = 0;
};

/// Register alias table with a FIFO free list.
///
/// A physical register superseded by a new mapping is not reusable until
/// the renaming instruction retires. Those registers sit in the in-flight
/// list until retire_all(); map, free list and in-flight list together
/// always form a permutation of 0..phys_count-1.
class RatState {
  public:
    explicit RatState(const RatGeometry &geometry);

    /// nullopt when the free list is empty (allocation stall).
    std::optional<RatAllocation> allocate(unsigned logical);

    /// Moves every in-flight register to the free-list tail, oldest first.
    std::size_t retire_all();

    /// Identity map, free list 32..phys_count-1, nothing in flight.
    void clear();

    Cycles occupancy_penalty(std::size_t free_length) const;

    unsigned mapping(unsigned logical) const { return map_.at(logical); }
    bool is_identity() const;
    /// Bit i set when logical register i is not mapped to physical i.
    std::bitset<kLogicalRegs> renamed() const;

    const std::deque<unsigned> &free_list() const { return free_; }
    const std::deque<unsigned> &in_flight() const { return in_flight_; }
    const RatGeometry &geometry() const { return geometry_; }

    /// True when map/free/in-flight are a permutation of all registers.
    bool is_consistent() const;

    bool operator==(const RatState &) const = default;

  private:
    RatGeometry geometry_;
    std::array<unsigned, kLogicalRegs> map_{};
    std::deque<unsigned> free_;
    std::deque<unsigned> in_flight_;
};

struct ResidualRegister {
    std::string name;
    unsigned bits = 0;
    Cycles cycles_per_unit = 0;
    std::uint64_t value = 0;

    bool operator==(const ResidualRegister &) const = default;
};

/// Flip-flop state outside the SRAMs that still affects timing.
class ResidualState {
  public:
    static constexpr std::size_t kStoreBuffer = 0;
    static constexpr std::size_t kPrefetchStride = 1;
    static constexpr std::uint64_t kStoreBufferMax = 15;

    ResidualState();

    /// Saturating increment of the store-buffer occupancy.
    void note_store();
    void set_prefetch_stride(std::uint64_t stride);
    /// Applied once at kernel start: returns the timing influence and
    /// drains the store buffer.
    Cycles consume_influence();

    Cycles timing_influence() const;
    Cycles ff_clear(Cycles latency);

    bool all_zero() const;
    const std::vector<ResidualRegister> &registers() const { return regs_; }
    std::uint64_t value(std::size_t which) const { return regs_.at(which).value; }
    void set_value(std::size_t which, std::uint64_t value);

    bool operator==(const ResidualState &) const = default;

  private:
    std::vector<ResidualRegister> regs_;
};

struct UarchConfig {
    CacheGeometry l1d{};
    CacheGeometry l1i{};
    BhtGeometry bht{};
    RatGeometry rat{};
    Cycles ff_clear_latency = 4;

    void validate() const;
    bool operator==(const UarchConfig &) const = default;
};

struct MicroarchState {
    CacheState l1d;
    CacheState l1i;
    BhtState bht;
    RatState rat;
    ResidualState residual;
    Cycles ff_clear_latency = 4;

    bool operator==(const MicroarchState &) const = default;
};

/// Validates the configuration (ConfigError) and builds the power-on state.
MicroarchState reset_state(const UarchConfig &config);

/// Clean and invalidate both caches, reset BHT, RAT and residual state.
/// Ignores architectural consequences of the RAT clear; see fence.h for
/// the version that accounts for them.
Cycles clear_everything(MicroarchState &state);

/// Software-visible state. Must come out of any fence bit-identical apart
/// from the fence's own scratch CSRs and stack frame.
struct ArchState {
    std::array<std::uint64_t, kLogicalRegs> regs{};
    unsigned sp_index = 2;
    std::uint64_t scratch_csr = 0;
    std::uint64_t resume_csr = 0;
    std::map<Address, std::uint64_t> memory;
    /// Registers whose value was lost by clearing the RAT underneath them.
    std::bitset<kLogicalRegs> destroyed;

    bool operator==(const ArchState &) const = default;
};

/// Value left in a register whose physical copy was dropped.
constexpr std::uint64_t kCorruptedValue = 0xDEADDEADDEADDEADull;

} // namespace tcsim
