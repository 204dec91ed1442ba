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

#include "tcsim/fence.h"
#include "tcsim/kernel.h"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

/// \file overhead.h
/// Cost of fencing every context switch for a foreground workload that is
/// round-robin scheduled against an idle domain.
///
/// Time is cut into fixed windows of slice_cycles, alternating foreground
/// and idle. A fence runs at the start of every window after the first and
/// is paid out of the incoming window. The foreground's cycles are its own
/// execution plus the fences paid out of its windows. The baseline runs
/// the same schedule unfenced for (total_slices - 1/2) foreground windows;
/// the mitigated run executes the same number of ops.

namespace tcsim {

enum class WorkloadKind { PointerChase, Streaming, BranchHeavy, Mixed };

std::string_view to_string(WorkloadKind k);
WorkloadKind parse_workload(std::string_view name);
std::vector<WorkloadKind> all_workloads();

/// A loop body the scheduler runs over and over.
struct Workload {
    std::string name;
    WorkloadKind kind;
    std::size_t working_set; // data lines, or branch sites for BranchHeavy
    Kernel body;
};

/// working_set 0 picks the default: half the L1D lines (half the BHT
/// entries for BranchHeavy).
Workload make_workload(WorkloadKind kind, const UarchConfig &cfg,
                       std::uint64_t seed = 1, std::size_t working_set = 0);

struct OverheadReport {
    Cycles baseline_cycles = 0;
    Cycles mitigated_cycles = 0;
    Cycles direct_cost_cycles = 0;
    std::int64_t indirect_cost_cycles = 0;
    double slowdown_percent = 0.0;

    std::size_t fences = 0; // fences paid out of foreground windows
    Cycles slice_cycles = 0;

    /// Share of each fenced foreground window taken by the fence itself.
    double direct_cost_percent() const;
};

/// Throws ConfigError when slice_cycles < 10 x pad_target for a fenced
/// config or total_slices < 2; PadOverrun propagates.
OverheadReport run_overhead(const Workload &workload, Cycles slice_cycles,
                            const FenceConfig &cfg, std::size_t total_slices,
                            const UarchConfig &uarch = {},
                            const EngineConfig &engine = {});

} // namespace tcsim
