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

#include "tcsim/channel_matrix.h"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace tcsim {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitPadOverrun = 3,
    kExitLeaky = 10,
};

/// Entry point of the `tcsim` tool. Results go to out, diagnostics and the
/// drawn seed (when --seed is omitted) to err.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Binary PGM (P5): one column per secret, one row per time bin with row 0
/// the smallest time, grey level 255 * count / max count.
std::string render_pgm(const ChannelMatrix &m);

/// Writes to a temporary sibling, then renames over path.
void write_file_atomically(const std::filesystem::path &path, std::string_view content);

} // namespace tcsim
