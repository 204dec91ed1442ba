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

#include "tcsim/uarch.h"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tcsim {

enum class Csr { Scratch, Resume };

namespace op {
struct Load {
    Address address;
    bool operator==(const Load &) const = default;
};
struct Store {
    Address address;
    bool operator==(const Store &) const = default;
};
struct Fetch {
    Address address;
    bool operator==(const Fetch &) const = default;
};
struct Branch {
    Address pc;
    bool taken;
    bool operator==(const Branch &) const = default;
};
struct AllocReg {
    unsigned logical;
    bool operator==(const AllocReg &) const = default;
};
/// Store a register to its slot in the frame below sp.
struct Spill {
    unsigned logical;
    bool operator==(const Spill &) const = default;
};
/// Reload a register from its slot in the frame below sp.
struct Restore {
    unsigned logical;
    bool operator==(const Restore &) const = default;
};
struct WriteCsr {
    Csr which;
    std::uint64_t value;
    bool operator==(const WriteCsr &) const = default;
};
/// Idle cycles. Also a retirement point: in-flight renames are released.
struct Nop {
    Cycles cycles;
    bool operator==(const Nop &) const = default;
};
} // namespace op

using KernelOp = std::variant<op::Load, op::Store, op::Fetch, op::Branch,
                              op::AllocReg, op::Spill, op::Restore,
                              op::WriteCsr, op::Nop>;

class Kernel {
  public:
    /// Throws ContractViolation on an empty op list, a zero-cycle Nop or a
    /// register index out of range.
    Kernel(std::string name, std::vector<KernelOp> ops);

    const std::string &name() const { return name_; }
    const std::vector<KernelOp> &ops() const { return ops_; }
    std::size_t size() const { return ops_.size(); }

  private:
    std::string name_;
    std::vector<KernelOp> ops_;
};

struct EngineConfig {
    Cycles mispredict_penalty = 12;
    Cycles branch_latency = 1;
    Cycles csr_latency = 1;

    bool operator==(const EngineConfig &) const = default;
};

struct RunResult {
    Cycles cycles = 0;
    std::uint64_t mispredicts = 0;
    std::uint64_t misses = 0;
    std::uint64_t stalls = 0;
    /// A Spill read, or a Restore produced, a destroyed register value.
    bool corrupted = false;

    bool operator==(const RunResult &) const = default;
};

/// Frame the Spill/Restore ops use: one 8-byte slot per logical register,
/// directly below the stack pointer.
constexpr Address kSpillFrameBytes = 8 * kLogicalRegs;
Address spill_slot_address(std::uint64_t sp_value, unsigned logical);

/// Op-at-a-time execution against borrowed state. execute() is the usual
/// entry point; the overhead model drives an Executor directly so it can
/// preempt a long op stream at slice boundaries.
class Executor {
  public:
    Executor(ArchState &arch, MicroarchState &uarch, const EngineConfig &cfg);

    /// Kernel start: charges the residual-state influence and drains the
    /// store buffer.
    Cycles begin();
    Cycles step(const KernelOp &op);

    const RunResult &result() const { return result_; }

  private:
    ArchState &arch_;
    MicroarchState &uarch_;
    EngineConfig cfg_;
    RunResult result_;
    std::optional<std::uint64_t> last_load_line_;
};

RunResult execute(const Kernel &kernel, ArchState &arch, MicroarchState &uarch,
                  const EngineConfig &cfg = {});

// ---------------------------------------------------------------------------
// Prime-and-probe kernels

enum class Component { L1d, L1i, Bht, Rat };

std::string_view to_string(Component c);
/// Throws ConfigError on an unknown name.
Component parse_component(std::string_view name);

/// Lines, BHT entries or renameable physical registers.
std::size_t component_capacity(Component c, const UarchConfig &cfg);

/// Base addresses of the spy's and trojan's regions. Both are multiples of
/// sets * line_bytes (resp. 4 * BHT entries), so line k of either region
/// lands in set k mod sets: the two domains contend for the same sets.
Address spy_region(const CacheGeometry &g);
Address trojan_region(const CacheGeometry &g);
Address spy_branch_base(const BhtGeometry &g);
Address trojan_branch_base(const BhtGeometry &g);

/// Trojan encoding kernel: touch `intensity` distinct lines / entries /
/// registers. Intensity 0 is a single Nop. Throws ConfigError above the
/// component's capacity.
Kernel make_prime_kernel(Component c, std::size_t intensity,
                         const UarchConfig &cfg);

/// Spy kernel that sweeps the whole component; its run time is the spy's
/// observation. The BHT probe runs not-taken, not-taken, taken at every
/// entry, which leaves any counter in {1, 2} back at 1. The RAT probe
/// allocates every renameable register, then retires.
Kernel make_probe_kernel(Component c, const UarchConfig &cfg);

} // namespace tcsim
