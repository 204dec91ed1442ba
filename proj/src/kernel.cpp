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

#include "tcsim/kernel.h"

#include <type_traits>

namespace tcsim {

namespace {

template <class... Ts> struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

void check_reg(unsigned logical) {
    if (logical >= kLogicalRegs)
        throw ContractViolation("register index " + std::to_string(logical) +
                                " out of range");
}

} // namespace

Kernel::Kernel(std::string name, std::vector<KernelOp> ops)
    : name_(std::move(name)), ops_(std::move(ops)) {
    if (ops_.empty())
        throw ContractViolation("kernel '" + name_ + "' is empty");
    for (const KernelOp &o : ops_) {
        std::visit(Overloaded{
                       [](const op::Nop &n) {
                           if (n.cycles < 1)
                               throw ContractViolation("Nop needs >= 1 cycle");
                       },
                       [](const op::AllocReg &a) { check_reg(a.logical); },
                       [](const op::Spill &s) { check_reg(s.logical); },
                       [](const op::Restore &r) { check_reg(r.logical); },
                       [](const auto &) {},
                   },
                   o);
    }
}

Address spill_slot_address(std::uint64_t sp_value, unsigned logical) {
    return sp_value - kSpillFrameBytes + Address{8} * logical;
}

Executor::Executor(ArchState &arch, MicroarchState &uarch,
                   const EngineConfig &cfg)
    : arch_(arch), uarch_(uarch), cfg_(cfg) {}

Cycles Executor::begin() {
    const Cycles c = uarch_.residual.consume_influence();
    result_.cycles += c;
    return c;
}

Cycles Executor::step(const KernelOp &o) {
    auto data_access = [&](Address a, AccessKind k) {
        const AccessResult r = uarch_.l1d.access(a, k);
        if (!r.hit)
            ++result_.misses;
        return r.latency;
    };
    auto slot = [&](unsigned logical) {
        if (arch_.destroyed[arch_.sp_index])
            result_.corrupted = true;
        return spill_slot_address(arch_.regs[arch_.sp_index], logical);
    };

    const Cycles c = std::visit(
        Overloaded{
            [&](const op::Load &l) {
                const std::uint64_t line = l.address / uarch_.l1d.geometry().line_bytes;
                if (last_load_line_)
                    uarch_.residual.set_prefetch_stride(line - *last_load_line_);
                last_load_line_ = line;
                return data_access(l.address, AccessKind::Read);
            },
            [&](const op::Store &s) {
                uarch_.residual.note_store();
                return data_access(s.address, AccessKind::Write);
            },
            [&](const op::Fetch &f) {
                const AccessResult r = uarch_.l1i.access(f.address, AccessKind::Fetch);
                if (!r.hit)
                    ++result_.misses;
                return r.latency;
            },
            [&](const op::Branch &b) {
                const BranchOutcome r = uarch_.bht.predict_and_update(b.pc, b.taken);
                Cycles lat = cfg_.branch_latency;
                if (r.mispredict) {
                    ++result_.mispredicts;
                    lat += cfg_.mispredict_penalty;
                }
                return lat;
            },
            [&](const op::AllocReg &a) {
                Cycles lat = 0;
                auto got = uarch_.rat.allocate(a.logical);
                if (!got) {
                    // Wait for the in-flight renames to retire, then retry.
                    ++result_.stalls;
                    lat += uarch_.rat.geometry().stall_penalty;
                    uarch_.rat.retire_all();
                    got = uarch_.rat.allocate(a.logical);
                }
                return lat + got->latency;
            },
            [&](const op::Spill &s) {
                if (arch_.destroyed[s.logical])
                    result_.corrupted = true;
                const Address a = slot(s.logical);
                arch_.memory[a] = arch_.regs[s.logical];
                uarch_.residual.note_store();
                return data_access(a, AccessKind::Write);
            },
            [&](const op::Restore &r) {
                const Address a = slot(r.logical);
                const Cycles lat = data_access(a, AccessKind::Read);
                const auto it = arch_.memory.find(a);
                if (it != arch_.memory.end() && !arch_.destroyed[arch_.sp_index]) {
                    arch_.regs[r.logical] = it->second;
                    arch_.destroyed.reset(r.logical);
                } else {
                    result_.corrupted = true;
                    arch_.regs[r.logical] = kCorruptedValue;
                    arch_.destroyed.set(r.logical);
                }
                return lat;
            },
            [&](const op::WriteCsr &w) {
                (w.which == Csr::Scratch ? arch_.scratch_csr : arch_.resume_csr) =
                    w.value;
                return cfg_.csr_latency;
            },
            [&](const op::Nop &n) {
                uarch_.rat.retire_all();
                return n.cycles;
            },
        },
        o);
    result_.cycles += c;
    return c;
}

RunResult execute(const Kernel &kernel, ArchState &arch, MicroarchState &uarch,
                  const EngineConfig &cfg) {
    Executor ex(arch, uarch, cfg);
    ex.begin();
    for (const KernelOp &o : kernel.ops())
        ex.step(o);
    return ex.result();
}

// ---------------------------------------------------------------------------

std::string_view to_string(Component c) {
    switch (c) {
    case Component::L1d:
        return "l1d";
    case Component::L1i:
        return "l1i";
    case Component::Bht:
        return "bht";
    case Component::Rat:
        return "rat";
    }
    return "?";
}

Component parse_component(std::string_view name) {
    for (Component c : {Component::L1d, Component::L1i, Component::Bht,
                        Component::Rat})
        if (to_string(c) == name)
            return c;
    throw ConfigError("unknown component '" + std::string(name) + "'");
}

std::size_t component_capacity(Component c, const UarchConfig &cfg) {
    switch (c) {
    case Component::L1d:
        return cfg.l1d.lines();
    case Component::L1i:
        return cfg.l1i.lines();
    case Component::Bht:
        return cfg.bht.entries();
    case Component::Rat:
        return cfg.rat.phys_count - kLogicalRegs;
    }
    return 0;
}

Address spy_region(const CacheGeometry &g) {
    return Address{1024} * g.sets * g.line_bytes;
}

Address trojan_region(const CacheGeometry &g) {
    return Address{2048} * g.sets * g.line_bytes;
}

Address spy_branch_base(const BhtGeometry &g) {
    return Address{1024} * 4 * g.entries();
}

Address trojan_branch_base(const BhtGeometry &g) {
    return Address{2048} * 4 * g.entries();
}

Kernel make_prime_kernel(Component c, std::size_t intensity,
                         const UarchConfig &cfg) {
    const std::size_t cap = component_capacity(c, cfg);
    if (intensity > cap)
        throw ConfigError("intensity " + std::to_string(intensity) +
                          " exceeds " + std::string(to_string(c)) +
                          " capacity " + std::to_string(cap));
    const std::string name = "trojan-" + std::string(to_string(c));
    if (intensity == 0)
        return Kernel(name, {op::Nop{1}});

    std::vector<KernelOp> ops;
    ops.reserve(intensity);
    for (std::size_t k = 0; k < intensity; ++k) {
        switch (c) {
        case Component::L1d:
            ops.emplace_back(op::Store{trojan_region(cfg.l1d) + k * cfg.l1d.line_bytes});
            break;
        case Component::L1i:
            ops.emplace_back(op::Fetch{trojan_region(cfg.l1i) + k * cfg.l1i.line_bytes});
            break;
        case Component::Bht:
            ops.emplace_back(op::Branch{trojan_branch_base(cfg.bht) + 4 * k, true});
            break;
        case Component::Rat:
            ops.emplace_back(op::AllocReg{static_cast<unsigned>(k % kLogicalRegs)});
            break;
        }
    }
    return Kernel(name, std::move(ops));
}

Kernel make_probe_kernel(Component c, const UarchConfig &cfg) {
    const std::size_t cap = component_capacity(c, cfg);
    std::vector<KernelOp> ops;
    switch (c) {
    case Component::L1d:
        for (std::size_t j = 0; j < cap; ++j)
            ops.emplace_back(op::Load{spy_region(cfg.l1d) + j * cfg.l1d.line_bytes});
        break;
    case Component::L1i:
        for (std::size_t j = 0; j < cap; ++j)
            ops.emplace_back(op::Fetch{spy_region(cfg.l1i) + j * cfg.l1i.line_bytes});
        break;
    case Component::Bht:
        for (std::size_t j = 0; j < cap; ++j) {
            const Address pc = spy_branch_base(cfg.bht) + 4 * j;
            ops.emplace_back(op::Branch{pc, false});
            ops.emplace_back(op::Branch{pc, false});
            ops.emplace_back(op::Branch{pc, true});
        }
        break;
    case Component::Rat:
        for (std::size_t j = 0; j < cap; ++j)
            ops.emplace_back(op::AllocReg{static_cast<unsigned>(j % kLogicalRegs)});
        ops.emplace_back(op::Nop{1});
        break;
    }
    return Kernel("spy-" + std::string(to_string(c)), std::move(ops));
}

} // namespace tcsim
