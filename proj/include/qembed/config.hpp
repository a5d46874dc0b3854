// Copyright 2026 The qembed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qembed/errors.hpp"
#include "qembed/integrators.hpp"
#include "qembed/model.hpp"
#include "qembed/verify.hpp"

namespace qembed {

/// One problem found in a config document. `path` is a dotted location such
/// as "model.baths[1].L1[0]"; `reason` starts with the failed check.
struct ConfigIssue {
    std::string path;
    std::string reason;
};

/// Raised by parse_config with every issue found, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

struct RunOptions {
    std::size_t N = 1000;
    /// Resolved observables; the defaults for the principal when unset.
    std::vector<Observable> observables;
    Representation representation = Representation::blocks;
    std::size_t threads = 1;
    std::size_t checkpoints = 10;
    bool mutation_check = true;
};

struct ExperimentConfig {
    EmbeddingModel model;
    JointState initial;
    SimConfig sim;
    RunOptions run;
};

/// Reads and validates a JSON experiment description. Throws ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view text);

/// Explicit form of a parsed config: shorthands expanded, defaults filled in,
/// initial state as a joint matrix. Reparses to an equal config.
std::string emit_normalized(const ExperimentConfig& config);

} // namespace qembed
