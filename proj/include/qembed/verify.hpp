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
#include <span>
#include <string>
#include <vector>

#include "qembed/generators.hpp"
#include "qembed/integrators.hpp"
#include "qembed/model.hpp"

namespace qembed {

/// rho^{j;k} = (I (x) <j|) rho (I (x) |k>), read off as strided sub-blocks.
BlockState blocks_from_joint(const JointState& js);
/// Inverse of blocks_from_joint.
JointState joint_from_blocks(const BlockState& bs);

/// Product state rho_s (x) rho_1 (x) ... (x) rho_M.
JointState product_state(const CMatrix& principal, std::span<const CMatrix> aux);

/// Runs the joint and block SMEs on one shared noise path and returns
/// sup_n fro_dist(joint_from_blocks(blocks_n), joint_n). `fault` is injected
/// into the block path only.
double crosscheck_paths(const EmbeddingModel& model, const StateSnapshot& init,
                        const SimConfig& cfg, BlockFault fault = BlockFault::none);

/// Exact unitary evolution of a closed model (no probe, no field couplings),
/// traced down to the principal at each requested time. Times must be
/// non-decreasing and non-negative. Piecewise-constant schedules are
/// propagated segment by segment.
std::vector<CMatrix> closed_system_oracle(const EmbeddingModel& model, const JointState& init,
                                          std::span<const double> times);

struct Observable {
    std::string name;
    CMatrix op;
};

/// Pauli x, y, z for a qubit principal; level populations otherwise.
std::vector<Observable> default_observables(std::size_t principal_dim);

struct EnsembleSummary {
    std::size_t N = 0;
    std::vector<std::string> names;
    std::vector<double> checkpoints;
    std::vector<std::vector<double>> mean_obs;    // [checkpoint][observable]
    std::vector<std::vector<double>> stderr_obs;  // [checkpoint][observable]
    std::vector<std::vector<double>> qme_obs;     // [checkpoint][observable]
    double innovation_mean = 0.0;  // mean of I_{t_end} over trajectories
    double innovation_var = 0.0;   // sample variance of I_{t_end}
};

struct EnsembleOptions {
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    std::size_t threads = 1;
    Representation representation = Representation::blocks;
    std::size_t num_checkpoints = 10;
};

/// Step indices of `count` evenly spaced checkpoints in (0, t_end].
std::vector<std::size_t> checkpoint_steps(std::size_t steps, std::size_t count);

/// Runs trajectories 0..N-1 (noise stream = trajectory index) and compares
/// the ensemble mean of each observable with the RK4 solution of the coupled
/// QME. Aggregation is a fold in trajectory order, so the result does not
/// depend on the thread count.
EnsembleSummary ensemble_average(const EmbeddingModel& model, const StateSnapshot& init,
                                 const SimConfig& cfg, std::size_t N,
                                 const std::vector<Observable>& observables,
                                 const EnsembleOptions& options = {});

} // namespace qembed
