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

#include "tcsim/chanbench.h"
#include "tcsim/fence.h"
#include "tcsim/leakage.h"
#include "tcsim/overhead.h"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace tcsim {

constexpr int kConfigVersionMajor = 1;

/// Everything a run can be configured with. Loaded from a JSON document
/// (see README for the schema); command-line flags override it.
struct SimConfig {
    UarchConfig uarch{};
    EngineConfig engine{};
    Cycles pad_target = kDefaultPadTarget;

    Component component = Component::L1d;
    std::size_t secrets = 0; // 0: component default
    std::size_t samples = 1000;
    FenceVariant mitigation = FenceVariant::None;
    Cycles noise_cycles = 0;
    Cycles bucket_width = 0;

    std::size_t trials = kDefaultM0Trials;
    double confidence = kDefaultM0Confidence;

    Cycles slice_cycles = 10'000'000;
    std::size_t slices = 10;
    WorkloadKind workload = WorkloadKind::Mixed;

    std::optional<std::uint64_t> seed;

    FenceConfig fence_config() const;
    FenceConfig fence_config(FenceVariant variant) const;
    BenchConfig bench_config(std::uint64_t seed) const;

    /// Geometry, leakage knobs, and the worst-case fence time against
    /// pad_target. Throws ConfigError.
    void validate() const;
};

/// Parses a config document. Unknown keys anywhere, a missing version or a
/// major version other than kConfigVersionMajor are ConfigErrors.
SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::filesystem::path &path);

/// Full document with every field, suitable for parse_config().
std::string dump_config(const SimConfig &cfg);

} // namespace tcsim
