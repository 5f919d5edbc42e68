/*
 * Copyright 2026 The chcntk Authors
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

#include <iosfwd>
#include <string>

#include "chcntk/eval.hpp"

namespace chcntk::cli {

enum class ConfigKind { Simulate, Sweep };

/// Parsed run configuration. Simulate uses one pattern; sweep uses all.
struct RunConfig {
    SweepConfig sweep;
    bool has_seed = false;
    /// Every cell is a pilot (simulate only).
    bool full_mask = false;
    std::string output;
};

/// Defaults for a command before any config or flag is applied.
RunConfig default_config(ConfigKind kind);

/// Applies a JSON document on top of `base`. Errors are ConfigParse and name
/// the line and column, or the offending field.
RunConfig parse_config(const std::string &text, const std::string &source, RunConfig base);
RunConfig load_config(const std::string &path, ConfigKind kind);

/// Output path after the CHCNTK_OUTPUT_DIR override (relative paths only).
std::string resolve_output(const std::string &path);

/// Entry point shared by the executable and the tests. Returns the exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace chcntk::cli
