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

#include "tcsim/fence.h"

#include <algorithm>
#include <utility>
#include <set>

namespace tcsim {

std::string_view to_string(FenceVariant v) {
    switch (v) {
    case FenceVariant::FenceTS:
        return "fence.t.s";
    case FenceVariant::NaiveHw:
        return "naive";
    case FenceVariant::None:
        return "none";
    }
    return "?";
}

FenceVariant parse_mitigation(std::string_view name) {
    for (FenceVariant v :
         {FenceVariant::FenceTS, FenceVariant::NaiveHw, FenceVariant::None})
        if (to_string(v) == name)
            return v;
    throw ConfigError("unknown mitigation '" + std::string(name) +
                      "' (expected none, fence.t.s or naive)");
}

std::string_view to_string(FenceStep s) {
    switch (s) {
    case FenceStep::SpillRegs:
        return "spill_regs";
    case FenceStep::SaveSp:
        return "save_sp";
    case FenceStep::SetResume:
        return "set_resume";
    case FenceStep::CleanL1d:
        return "clean_l1d";
    case FenceStep::InvalidateSrams:
        return "invalidate_srams";
    case FenceStep::ClearFfs:
        return "clear_ffs";
    case FenceStep::ClearRat:
        return "clear_rat";
    case FenceStep::RestoreSp:
        return "restore_sp";
    case FenceStep::RestoreRegs:
        return "restore_regs";
    case FenceStep::Pad:
        return "pad";
    }
    return "?";
}

FenceConfig FenceConfig::fence_t_s(Cycles pad_target) {
    return {FenceVariant::FenceTS, FenceSteps{}, pad_target};
}

FenceConfig FenceConfig::naive_hw(Cycles pad_target) {
    FenceSteps s;
    s.spill_regs = false;
    s.restore_regs = false;
    return {FenceVariant::NaiveHw, s, pad_target};
}

FenceConfig FenceConfig::none() {
    return {FenceVariant::None,
            FenceSteps{false, false, false, false, false, false, false}, 0};
}

void FenceConfig::validate() const {
    if (steps.pad && pad_target == 0)
        throw ConfigError("pad_target must be > 0 when padding is enabled");
    if (variant == FenceVariant::FenceTS && !(steps == FenceSteps{}))
        throw ConfigError("fence.t.s requires every step enabled");
    if (variant == FenceVariant::NaiveHw &&
        (steps.spill_regs || steps.restore_regs))
        throw ConfigError("the naive fence does not spill or restore");
}

std::vector<FenceStep> fence_t_s_sequence() {
    return {FenceStep::SpillRegs,       FenceStep::SaveSp,
            FenceStep::SetResume,       FenceStep::CleanL1d,
            FenceStep::InvalidateSrams, FenceStep::ClearFfs,
            FenceStep::ClearRat,        FenceStep::RestoreSp,
            FenceStep::RestoreRegs,     FenceStep::Pad};
}

std::vector<FenceStep> fence_sequence(const FenceConfig &cfg) {
    if (cfg.variant == FenceVariant::None)
        return {};
    const FenceSteps &s = cfg.steps;
    std::vector<FenceStep> seq;
    if (s.spill_regs) {
        seq.push_back(FenceStep::SpillRegs);
        seq.push_back(FenceStep::SaveSp);
        seq.push_back(FenceStep::SetResume);
    }
    if (s.clean_l1d)
        seq.push_back(FenceStep::CleanL1d);
    if (s.invalidate_srams)
        seq.push_back(FenceStep::InvalidateSrams);
    if (s.clear_ffs)
        seq.push_back(FenceStep::ClearFfs);
    if (s.clear_rat)
        seq.push_back(FenceStep::ClearRat);
    if (s.restore_regs) {
        seq.push_back(FenceStep::RestoreSp);
        seq.push_back(FenceStep::RestoreRegs);
    }
    if (s.pad)
        seq.push_back(FenceStep::Pad);
    return seq;
}

namespace {

void check_stack_pointer(const ArchState &arch) {
    if (arch.sp_index >= kLogicalRegs)
        throw ContractViolation("sp_index out of range");
    const std::uint64_t sp = arch.regs[arch.sp_index];
    if (arch.destroyed[arch.sp_index] || sp % 8 != 0 || sp < kSpillFrameBytes)
        throw ContractViolation("stack pointer does not hold a valid stack "
                                "address");
}

// Clearing the RAT points every logical register back at its reset
// physical register; whatever a renamed register held is gone.
void clear_rat(ArchState &arch, MicroarchState &uarch) {
    const auto lost = uarch.rat.renamed();
    uarch.rat.clear();
    for (unsigned i = 0; i < kLogicalRegs; ++i) {
        if (lost[i]) {
            arch.regs[i] = kCorruptedValue;
            arch.destroyed.set(i);
        }
    }
}

} // namespace

FenceResult run_fence_steps(ArchState &arch, MicroarchState &uarch,
                            std::span<const FenceStep> steps,
                            const FenceConfig &cfg, const EngineConfig &engine) {
    FenceResult result;
    Executor ex(arch, uarch, engine);
    Cycles entry = ex.begin();
    bool padded = false;

    for (FenceStep step : steps) {
        Cycles c = std::exchange(entry, 0);
        switch (step) {
        case FenceStep::SpillRegs:
            for (unsigned i = 0; i < kLogicalRegs; ++i)
                if (i != arch.sp_index)
                    c += ex.step(op::Spill{i});
            break;
        case FenceStep::SaveSp:
            c += ex.step(op::WriteCsr{Csr::Scratch, arch.regs[arch.sp_index]});
            break;
        case FenceStep::SetResume:
            c += ex.step(op::WriteCsr{Csr::Resume, kFenceResumeAddress});
            break;
        case FenceStep::CleanL1d:
            c += uarch.l1d.clean_all();
            break;
        case FenceStep::InvalidateSrams:
            c += uarch.l1d.invalidate_all();
            c += uarch.l1i.invalidate_all();
            c += uarch.bht.invalidate();
            break;
        case FenceStep::ClearFfs:
            c += uarch.residual.ff_clear(uarch.ff_clear_latency);
            break;
        case FenceStep::ClearRat:
            clear_rat(arch, uarch);
            break;
        case FenceStep::RestoreSp:
            arch.regs[arch.sp_index] = arch.scratch_csr;
            arch.destroyed.reset(arch.sp_index);
            c += engine.csr_latency;
            break;
        case FenceStep::RestoreRegs:
            for (unsigned i = 0; i < kLogicalRegs; ++i)
                if (i != arch.sp_index)
                    c += ex.step(op::Restore{i});
            break;
        case FenceStep::Pad:
            result.raw_cycles += c;
            result.padded_cycles = pad_time(result.raw_cycles, cfg.pad_target);
            padded = true;
            result.step_costs.push_back({step, result.padded_cycles - result.raw_cycles});
            continue;
        }
        result.raw_cycles += c;
        result.step_costs.push_back({step, c});
    }
    result.raw_cycles += entry;
    if (!padded)
        result.padded_cycles = result.raw_cycles;
    result.corrupted = ex.result().corrupted || arch.destroyed.any();
    return result;
}

FenceResult fence_t_s(ArchState &arch, MicroarchState &uarch,
                      const FenceConfig &cfg, const EngineConfig &engine) {
    if (cfg.variant != FenceVariant::FenceTS)
        throw ContractViolation("fence_t_s called with a different variant");
    cfg.validate();
    check_stack_pointer(arch);
    const auto seq = fence_t_s_sequence();
    return run_fence_steps(arch, uarch, seq, cfg, engine);
}

FenceResult naive_hw_fence(ArchState &arch, MicroarchState &uarch,
                           const FenceConfig &cfg, const EngineConfig &engine) {
    if (cfg.variant != FenceVariant::NaiveHw)
        throw ContractViolation("naive_hw_fence called with a different variant");
    cfg.validate();
    const auto seq = fence_sequence(cfg);
    return run_fence_steps(arch, uarch, seq, cfg, engine);
}

FenceResult apply_mitigation(ArchState &arch, MicroarchState &uarch,
                             const FenceConfig &cfg, const EngineConfig &engine) {
    switch (cfg.variant) {
    case FenceVariant::FenceTS:
        return fence_t_s(arch, uarch, cfg, engine);
    case FenceVariant::NaiveHw:
        return naive_hw_fence(arch, uarch, cfg, engine);
    case FenceVariant::None:
        break;
    }
    return {};
}

Cycles pad_time(Cycles raw, Cycles target) {
    if (target == 0)
        throw ContractViolation("pad target must be > 0");
    if (raw > target)
        throw PadOverrun(raw, target);
    return target;
}

std::size_t worst_case_frame_lines(const CacheGeometry &l1d, unsigned sp_index) {
    std::size_t worst = 0;
    // The frame base is 8-byte aligned; only its offset within a line
    // matters.
    for (Address offset = 0; offset < std::max<Address>(l1d.line_bytes, 8);
         offset += 8) {
        std::set<Address> lines;
        for (unsigned i = 0; i < kLogicalRegs; ++i)
            if (i != sp_index)
                lines.insert((offset + Address{8} * i) / l1d.line_bytes);
        worst = std::max(worst, lines.size());
    }
    return worst;
}

Cycles worst_case_raw_bound(const UarchConfig &uarch, const EngineConfig &engine,
                            unsigned sp_index) {
    uarch.validate();
    if (sp_index >= kLogicalRegs)
        throw ConfigError("sp_index out of range");
    const CacheGeometry &d = uarch.l1d;
    const Cycles lines = worst_case_frame_lines(d, sp_index);
    const Cycles slots = kLogicalRegs - 1;

    Cycles residual = 0;
    const ResidualState fresh;
    for (const ResidualRegister &r : fresh.registers()) {
        std::uint64_t max_value = (std::uint64_t{1} << r.bits) - 1;
        if (r.name == "store_buffer_occupancy")
            max_value = std::min(max_value, ResidualState::kStoreBufferMax);
        residual += max_value * r.cycles_per_unit;
    }

    const Cycles spill = lines * (d.miss_latency + d.writeback_latency) +
                         (slots - lines) * d.hit_latency;
    const Cycles csrs = 3 * engine.csr_latency; // save sp, resume, restore sp
    const Cycles clean = d.clean_base_cost + Cycles{d.lines()} * d.writeback_latency;
    const Cycles invalidate = d.invalidate_latency + uarch.l1i.invalidate_latency +
                              uarch.bht.invalidate_latency;
    const Cycles restore = lines * d.miss_latency + (slots - lines) * d.hit_latency;

    return residual + spill + csrs + clean + invalidate + uarch.ff_clear_latency +
           restore;
}

Cycles worst_case_raw_cycles(const FenceConfig &cfg, const UarchConfig &uarch,
                             const EngineConfig &engine, unsigned sp_index) {
    const Cycles bound = worst_case_raw_bound(uarch, engine, sp_index);
    if (cfg.variant != FenceVariant::None && cfg.steps.pad && bound > cfg.pad_target)
        throw PadOverrun(bound, cfg.pad_target);
    return bound;
}

} // namespace tcsim
