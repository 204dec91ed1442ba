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

#include "tcsim/overhead.h"

#include "tcsim/chanbench.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <random>

namespace tcsim {

std::string_view to_string(WorkloadKind k) {
    switch (k) {
    case WorkloadKind::PointerChase:
        return "pointer_chase";
    case WorkloadKind::Streaming:
        return "streaming";
    case WorkloadKind::BranchHeavy:
        return "branch_heavy";
    case WorkloadKind::Mixed:
        return "mixed";
    }
    return "?";
}

std::vector<WorkloadKind> all_workloads() {
    return {WorkloadKind::PointerChase, WorkloadKind::Streaming,
            WorkloadKind::BranchHeavy, WorkloadKind::Mixed};
}

WorkloadKind parse_workload(std::string_view name) {
    for (WorkloadKind k : all_workloads())
        if (to_string(k) == name)
            return k;
    throw ConfigError("unknown workload '" + std::string(name) + "'");
}

namespace {

Address data_region(const CacheGeometry &g) { return Address{4096} * g.sets * g.line_bytes; }
Address code_region(const CacheGeometry &g) { return Address{8192} * g.sets * g.line_bytes; }
Address branch_region(const BhtGeometry &g) { return Address{4096} * 4 * g.entries(); }

} // namespace

Workload make_workload(WorkloadKind kind, const UarchConfig &cfg,
                       std::uint64_t seed, std::size_t working_set) {
    cfg.validate();
    const CacheGeometry &d = cfg.l1d;
    const CacheGeometry &i = cfg.l1i;
    if (working_set == 0)
        working_set = kind == WorkloadKind::BranchHeavy ? cfg.bht.entries() / 2
                                                        : d.lines() / 2;
    working_set = std::max<std::size_t>(working_set, 1);

    std::mt19937_64 rng(seed);
    auto line = [&](std::size_t k) { return data_region(d) + k * d.line_bytes; };
    auto code = [&](std::size_t k) {
        return code_region(i) + (k % std::max<std::size_t>(i.lines() / 2, 1)) * i.line_bytes;
    };
    auto site = [&](std::size_t k) {
        return branch_region(cfg.bht) + 4 * (k % cfg.bht.entries());
    };
    std::bernoulli_distribution coin(0.5);

    std::vector<KernelOp> ops;
    switch (kind) {
    case WorkloadKind::PointerChase: {
        std::vector<std::size_t> perm(working_set);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t k = 0; k < working_set; ++k) {
            ops.emplace_back(op::Fetch{code(k / 4)});
            ops.emplace_back(op::Load{line(perm[k])});
            ops.emplace_back(op::Nop{2});
        }
        ops.emplace_back(op::Branch{site(0), true});
        break;
    }
    case WorkloadKind::Streaming:
        for (std::size_t k = 0; k < working_set; ++k) {
            ops.emplace_back(op::Fetch{code(k / 4)});
            ops.emplace_back(op::Load{line(k)});
            ops.emplace_back(op::Store{line(k) + 8});
            ops.emplace_back(op::Nop{1});
        }
        ops.emplace_back(op::Branch{site(0), true});
        break;
    case WorkloadKind::BranchHeavy:
        for (std::size_t k = 0; k < working_set; ++k) {
            ops.emplace_back(op::Fetch{code(k / 8)});
            ops.emplace_back(op::Branch{site(k), coin(rng)});
            ops.emplace_back(op::Nop{2});
        }
        break;
    case WorkloadKind::Mixed: {
        // A loop whose code fills the L1I, with a data working set and
        // biased branches: everything it keeps warm is worth keeping.
        std::vector<std::size_t> perm(working_set);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::size_t iterations = std::max<std::size_t>(working_set, i.lines());
        for (std::size_t k = 0; k < iterations; ++k) {
            const std::size_t w = k % working_set;
            ops.emplace_back(op::Fetch{code_region(i) + (k % i.lines()) * i.line_bytes});
            ops.emplace_back(op::Load{line(perm[w])});
            ops.emplace_back(op::Branch{site(k), k % 4 != 0});
            ops.emplace_back(op::Store{line(w) + 8});
            ops.emplace_back(op::AllocReg{static_cast<unsigned>(1 + k % 31)});
            ops.emplace_back(op::Nop{2});
        }
        break;
    }
    }
    std::string name(to_string(kind));
    return Workload{name, kind, working_set, Kernel(name, std::move(ops))};
}

double OverheadReport::direct_cost_percent() const {
    if (fences == 0)
        return 0.0;
    return 100.0 * static_cast<double>(direct_cost_cycles) /
           static_cast<double>(fences * slice_cycles);
}

namespace {

struct Schedule {
    Cycles fg_exec = 0;      // foreground execution cycles
    Cycles fg_fence = 0;     // fence cycles paid by foreground windows
    std::size_t fences = 0;  // ... and how many fences that was
    std::uint64_t ops = 0;   // foreground ops completed
};

// Runs the alternating schedule until the foreground has either executed
// exec_limit cycles or completed op_limit ops, whichever is set.
Schedule simulate(const Workload &w, Cycles slice, const FenceConfig &fence,
                  const UarchConfig &ucfg, const EngineConfig &ecfg,
                  std::optional<Cycles> exec_limit,
                  std::optional<std::uint64_t> op_limit) {
    MicroarchState uarch = reset_state(ucfg);
    ArchState fg = bench_initial_arch();
    ArchState idle = bench_initial_arch();
    const auto &body = w.body.ops();

    Schedule s;
    std::size_t pc = 0;
    Cycles carry = 0;
    auto done = [&] {
        return (exec_limit && s.fg_exec >= *exec_limit) ||
               (op_limit && s.ops >= *op_limit);
    };

    for (std::size_t window = 0; !done(); window += 2) {
        // Foreground window.
        Cycles used = std::exchange(carry, 0);
        if (window > 0 && fence.variant != FenceVariant::None) {
            const Cycles f = apply_mitigation(fg, uarch, fence, ecfg).padded_cycles;
            used += f;
            s.fg_fence += f;
            ++s.fences;
        }
        Executor ex(fg, uarch, ecfg);
        const Cycles start = ex.begin();
        used += start;
        s.fg_exec += start;
        while (used < slice && !done()) {
            const Cycles c = ex.step(body[pc]);
            pc = (pc + 1) % body.size();
            ++s.ops;
            s.fg_exec += c;
            used += c;
        }
        if (done())
            break;
        carry = used - slice;

        // Idle window: the outgoing foreground context is fenced, then the
        // idle domain spins.
        Cycles idle_used = 0;
        if (fence.variant != FenceVariant::None)
            idle_used += apply_mitigation(fg, uarch, fence, ecfg).padded_cycles;
        Executor idler(idle, uarch, ecfg);
        idler.begin();
        if (idle_used < slice)
            idler.step(op::Nop{slice - idle_used});
    }
    return s;
}

} // namespace

OverheadReport run_overhead(const Workload &workload, Cycles slice_cycles,
                            const FenceConfig &cfg, std::size_t total_slices,
                            const UarchConfig &uarch, const EngineConfig &engine) {
    cfg.validate();
    if (total_slices < 2)
        throw ConfigError("total_slices must be >= 2");
    if (cfg.variant != FenceVariant::None) {
        if (slice_cycles < cfg.pad_target * 10)
            throw ConfigError("slice_cycles must be at least 10 x pad_target");
        worst_case_raw_cycles(cfg, uarch, engine, bench_initial_arch().sp_index);
    }
    if (slice_cycles == 0)
        throw ConfigError("slice_cycles must be > 0");

    const Cycles target = total_slices * slice_cycles - slice_cycles / 2;
    const Schedule base = simulate(workload, slice_cycles, FenceConfig::none(),
                                   uarch, engine, target, std::nullopt);
    const Schedule mit = simulate(workload, slice_cycles, cfg, uarch, engine,
                                  std::nullopt, base.ops);

    OverheadReport r;
    r.slice_cycles = slice_cycles;
    r.fences = mit.fences;
    r.baseline_cycles = base.fg_exec;
    r.mitigated_cycles = mit.fg_exec + mit.fg_fence;
    r.direct_cost_cycles = mit.fg_fence;
    r.indirect_cost_cycles = static_cast<std::int64_t>(r.mitigated_cycles) -
                             static_cast<std::int64_t>(r.baseline_cycles) -
                             static_cast<std::int64_t>(r.direct_cost_cycles);
    r.slowdown_percent = 100.0 *
                         (static_cast<double>(r.mitigated_cycles) -
                          static_cast<double>(r.baseline_cycles)) /
                         static_cast<double>(r.baseline_cycles);
    return r;
}

} // namespace tcsim
