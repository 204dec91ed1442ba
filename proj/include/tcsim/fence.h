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

#include "tcsim/kernel.h"
#include "tcsim/uarch.h"

#include <span>
#include <string_view>
#include <vector>

/// \file fence.h
/// Temporal fences applied at a context switch.
///
/// fence_t_s() is the software-supported fence: the registers are spilled
/// before anything is cleared, so clearing the RAT (mixed state) cannot
/// lose architectural values, and the whole sequence is padded to a fixed
/// worst-case time. naive_hw_fence() clears the same structures in one go
/// without the spill and shows what that does to renamed registers.
///
/// Each step is also available on its own through run_fence_steps().

namespace tcsim {

enum class FenceVariant { FenceTS, NaiveHw, None };

std::string_view to_string(FenceVariant v);
/// Accepts "fence.t.s", "naive" and "none". Throws ConfigError otherwise.
FenceVariant parse_mitigation(std::string_view name);

struct FenceSteps {
    bool spill_regs = true;
    bool clean_l1d = true;
    bool invalidate_srams = true;
    bool clear_ffs = true;
    bool clear_rat = true;
    bool restore_regs = true;
    bool pad = true;

    bool operator==(const FenceSteps &) const = default;
};

constexpr Cycles kDefaultPadTarget = 15000;

struct FenceConfig {
    FenceVariant variant = FenceVariant::FenceTS;
    FenceSteps steps{};
    Cycles pad_target = kDefaultPadTarget;

    static FenceConfig fence_t_s(Cycles pad_target = kDefaultPadTarget);
    static FenceConfig naive_hw(Cycles pad_target = kDefaultPadTarget);
    static FenceConfig none();

    void validate() const;
    bool operator==(const FenceConfig &) const = default;
};

enum class FenceStep {
    SpillRegs,       // every non-sp register to the frame below sp
    SaveSp,          // scratch CSR <- sp
    SetResume,       // resume CSR <- post-clear resume address
    CleanL1d,        // write back dirty L1D lines
    InvalidateSrams, // L1D, L1I, BHT
    ClearFfs,        // residual flip-flops (CSRs exempt)
    ClearRat,        // identity map; renamed registers lose their value
    RestoreSp,       // sp <- scratch CSR
    RestoreRegs,     // every non-sp register from the frame
    Pad,             // stretch to pad_target
};

std::string_view to_string(FenceStep s);

struct StepCost {
    FenceStep step;
    Cycles cycles;

    bool operator==(const StepCost &) const = default;
};

struct FenceResult {
    Cycles raw_cycles = 0;
    Cycles padded_cycles = 0;
    bool corrupted = false;
    std::vector<StepCost> step_costs;

    bool operator==(const FenceResult &) const = default;
};

/// Where execution resumes after the flip-flop clear.
constexpr std::uint64_t kFenceResumeAddress = 0xFFFFFFFFF0000040ull;

/// The steps of fence_t_s in order.
std::vector<FenceStep> fence_t_s_sequence();
/// Steps implied by the config's variant and step flags.
std::vector<FenceStep> fence_sequence(const FenceConfig &cfg);

/// Runs an arbitrary step sequence. Pad uses cfg.pad_target and throws
/// PadOverrun when the raw time so far exceeds it. corrupted is set if a
/// step read a destroyed register or one is still destroyed at the end.
FenceResult run_fence_steps(ArchState &arch, MicroarchState &uarch,
                            std::span<const FenceStep> steps,
                            const FenceConfig &cfg,
                            const EngineConfig &engine = {});

/// Requires a valid stack pointer (8-byte aligned, room for the spill
/// frame, not destroyed) and cfg.variant == FenceTS.
FenceResult fence_t_s(ArchState &arch, MicroarchState &uarch,
                      const FenceConfig &cfg, const EngineConfig &engine = {});

/// Requires cfg.variant == NaiveHw.
FenceResult naive_hw_fence(ArchState &arch, MicroarchState &uarch,
                           const FenceConfig &cfg,
                           const EngineConfig &engine = {});

/// Dispatch on cfg.variant; None costs nothing and touches nothing.
FenceResult apply_mitigation(ArchState &arch, MicroarchState &uarch,
                             const FenceConfig &cfg,
                             const EngineConfig &engine = {});

/// target if raw <= target, PadOverrun otherwise.
Cycles pad_time(Cycles raw, Cycles target);

/// Largest number of distinct lines the spill frame can straddle over all
/// 8-byte stack alignments.
std::size_t worst_case_frame_lines(const CacheGeometry &l1d, unsigned sp_index);

/// Exact worst-case raw time of fence_t_s: residual influence saturated,
/// every spill line missing onto a dirty victim, a fully dirty L1D to
/// clean, cold restores. Does not check the pad target.
Cycles worst_case_raw_bound(const UarchConfig &uarch,
                            const EngineConfig &engine = {},
                            unsigned sp_index = 2);

/// worst_case_raw_bound(), rejecting a padded config whose pad_target is
/// below it with PadOverrun(bound, pad_target).
Cycles worst_case_raw_cycles(const FenceConfig &cfg, const UarchConfig &uarch,
                             const EngineConfig &engine = {},
                             unsigned sp_index = 2);

} // namespace tcsim
