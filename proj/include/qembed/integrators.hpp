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
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "qembed/generators.hpp"
#include "qembed/model.hpp"

namespace qembed {

enum class Scheme { euler_maruyama, rk4 };
enum class Measurement { none, amplitude, phase };
enum class Representation { joint, blocks };

struct SimConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::euler_maruyama;
    Measurement measurement = Measurement::none;
    std::uint64_t seed = 0;
    std::size_t snapshot_stride = 1;
    /// Trajectory index; selects the noise stream for a given seed.
    std::uint64_t stream = 0;

    /// Throws ModelError on dt <= 0, t_end < 0, stride 0, t_end not a multiple
    /// of dt (1e-12), or rk4 combined with a measurement.
    void validate() const;
    std::size_t steps() const;
    double time_at(std::size_t step) const { return static_cast<double>(step) * dt; }
};

std::optional<Quadrature> quadrature_of(Measurement m);

using StateSnapshot = std::variant<JointState, BlockState>;

/// sum_i rho^{i;i} or Tr_aux(rho), whichever applies.
CMatrix reduced_state(const StateSnapshot& s);
JointState as_joint(const StateSnapshot& s);

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> times;     // start time of every step
    std::vector<double> dY;        // measurement record increments
    std::vector<double> dI;        // innovations, dY - mval dt
    std::vector<double> mvals;
    std::vector<double> snapshot_times;
    std::vector<StateSnapshot> snapshots;
};

template <class State>
struct StepResult {
    State state;
    std::optional<double> dY;
    std::optional<double> dI;
    std::optional<double> mval;
};

/// One Euler-Maruyama step of the joint SME followed by hermitization and
/// trace renormalization. With `quadrature` empty the step is deterministic.
StepResult<JointState> em_step_joint(const EmbeddingModel& model, double t,
                                     const JointState& state, double dt, double dW,
                                     std::optional<Quadrature> quadrature = Quadrature::amplitude);

StepResult<BlockState> em_step_blocks(const BlockGenerator& gen, const BlockState& bs, double dt,
                                      double dW, std::optional<Quadrature> quadrature);
StepResult<BlockState> em_step_blocks(const EmbeddingModel& model, double t, const BlockState& bs,
                                      double dt, double dW,
                                      std::optional<Quadrature> quadrature = Quadrature::amplitude);

inline CMatrix axpy(const CMatrix& y, double c, const CMatrix& k) { return y + c * k; }

/// Classical four-stage Runge-Kutta step for y' = f(t, y).
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double dt) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const State k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const State k4 = f(t + dt, axpy(y, dt, k3));
    State sum = axpy(k1, 2.0, k2);
    sum = axpy(sum, 2.0, k3);
    sum = axpy(sum, 1.0, k4);
    return axpy(y, dt / 6.0, sum);
}

/// RK4 step of the coupled block QME. No renormalization.
BlockState rk4_step_qme(const EmbeddingModel& model, double t, const BlockState& bs, double dt);
/// RK4 step of the joint-space master equation. No renormalization.
JointState rk4_step_joint(const EmbeddingModel& model, double t, const JointState& state, double dt);

/// What happened during one step of integrate_path.
struct StepInfo {
    std::size_t step = 0;  // 0-based index of the completed step
    double t = 0.0;        // start time of the step
    std::optional<double> dY, dI, mval;
};

/// Advances `state` through cfg.steps() steps with the scheme and
/// representation requested, calling `on_step` after every step. Noise comes
/// from GaussianStream(cfg.seed, cfg.stream). Step failures are rethrown as
/// StepError carrying the step index.
void integrate_path(const EmbeddingModel& model, StateSnapshot& state, const SimConfig& cfg,
                    Representation representation,
                    const std::function<void(const StepInfo&, const StateSnapshot&)>& on_step,
                    BlockFault fault = BlockFault::none);

TrajectoryRecord simulate_trajectory(const EmbeddingModel& model, const StateSnapshot& init,
                                     const SimConfig& cfg, Representation representation);

struct QmeSample {
    double t = 0.0;
    BlockState state;
    CMatrix reduced;
};

/// Coupled QME solved with RK4; one sample every snapshot_stride steps plus
/// the initial state.
std::vector<QmeSample> solve_qme(const EmbeddingModel& model, const BlockState& init,
                                 const SimConfig& cfg);

/// Reuses a BlockGenerator while the model's schedule segments are unchanged.
class GeneratorCache {
public:
    explicit GeneratorCache(const EmbeddingModel& model, BlockFault fault = BlockFault::none)
        : model_(&model), fault_(fault) {}
    const BlockGenerator& at(double t);

private:
    const EmbeddingModel* model_;
    BlockFault fault_;
    std::vector<std::size_t> key_;
    std::optional<BlockGenerator> gen_;
};

} // namespace qembed
