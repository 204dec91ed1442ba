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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tcsim {

using Cycles = std::uint64_t;
using Address = std::uint64_t;

/// A caller broke an operation's precondition (wrong cache kind, empty
/// matrix, ...). This is a programming error, not a runtime condition.
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Invalid geometry, latency table, bench or config document.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The fence ran longer than its padding budget. Treated as a failed run:
/// padding to a shorter target would expose the fence latency.
class PadOverrun : public std::runtime_error {
  public:
    PadOverrun(Cycles raw, Cycles target)
        : std::runtime_error("fence raw time " + std::to_string(raw) +
                             " cycles exceeds pad target " +
                             std::to_string(target)),
          raw_(raw), target_(target) {}

    Cycles raw() const { return raw_; }
    Cycles target() const { return target_; }

  private:
    Cycles raw_;
    Cycles target_;
};

} // namespace tcsim
