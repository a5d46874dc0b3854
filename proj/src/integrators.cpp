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

#include "qembed/integrators.hpp"

#include <cmath>
#include <string>

#include "qembed/rng.hpp"
#include "qembed/verify.hpp"

namespace qembed {

void SimConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ModelError("dt must be positive and finite");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw ModelError("t_end must be non-negative and finite");
    if (snapshot_stride == 0)
        throw ModelError("snapshot_stride must be >= 1");
    const double n = std::round(t_end / dt);
    if (std::abs(n * dt - t_end) > 1e-12)
        throw ModelError("t_end must be an integer multiple of dt");
    if (scheme == Scheme::rk4 && measurement != Measurement::none)
        throw ModelError("the rk4 scheme integrates the unconditioned master equation only");
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

std::optional<Quadrature> quadrature_of(Measurement m) {
    switch (m) {
    case Measurement::amplitude:
        return Quadrature::amplitude;
    case Measurement::phase:
        return Quadrature::phase;
    case Measurement::none:
        break;
    }
    return std::nullopt;
}

CMatrix reduced_state(const StateSnapshot& s) {
    if (const auto* b = std::get_if<BlockState>(&s))
        return b->reduced();
    const auto& j = std::get<JointState>(s);
    return partial_trace(j.rho, j.dims, principal_slot());
}

JointState as_joint(const StateSnapshot& s) {
    if (const auto* b = std::get_if<BlockState>(&s))
        return joint_from_blocks(*b);
    return std::get<JointState>(s);
}

const BlockGenerator& GeneratorCache::at(double t) {
    auto key = model_->segment_key(t);
    if (!gen_ || key != key_) {
        gen_.emplace(*model_, t, fault_);
        key_ = std::move(key);
    }
    return *gen_;
}

namespace {

void require_positive_trace(double tr) {
    if (!(tr > 0.0) || !std::isfinite(tr))
        throw Error("state trace " + std::to_string(tr) +
                    " is not positive after the update; dt is too large");
}

} // namespace

StepResult<JointState> em_step_joint(const EmbeddingModel& model, double t, const JointState& state,
                                     double dt, double dW, std::optional<Quadrature> quadrature) {
    const CMatrix drift = joint_sme_drift(model, t, state);
    CMatrix next = state.rho + dt * drift;
    StepResult<JointState> out{{state.dims, {}}, {}, {}, {}};
    if (quadrature) {
        const JointMeasurement m = joint_sme_meas(model, t, state, *quadrature);
        next += dW * m.G;
        const double dy = m.mval * dt + dW;
        out.dY = dy;
        out.dI = dy - m.mval * dt;
        out.mval = m.mval;
    }
    CMatrix herm = 0.5 * (next + next.adjoint());
    const double tr = herm.trace().real();
    require_positive_trace(tr);
    herm /= tr;
    out.state.rho = std::move(herm);
    return out;
}

StepResult<BlockState> em_step_blocks(const BlockGenerator& gen, const BlockState& bs, double dt,
                                      double dW, std::optional<Quadrature> quadrature) {
    const BlockState drift = gen.qme_rhs(bs);
    BlockState next = axpy(bs, dt, drift);
    StepResult<BlockState> out{BlockState(bs.dims()), {}, {}, {}};
    if (quadrature) {
        const BlockMeasurement m = gen.meas_term(bs, *quadrature);
        for (std::size_t i = 0; i < next.blocks().size(); ++i)
            next.blocks()[i] += dW * m.G.blocks()[i];
        const double dy = m.mval * dt + dW;
        out.dY = dy;
        out.dI = dy - m.mval * dt;
        out.mval = m.mval;
    }
    const std::size_t n = bs.aux_count();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            out.state.block(j, k) = 0.5 * (next.block(j, k) + next.block(k, j).adjoint());
    const double tr = out.state.total_trace().real();
    require_positive_trace(tr);
    for (auto& b : out.state.blocks())
        b /= tr;
    return out;
}

StepResult<BlockState> em_step_blocks(const EmbeddingModel& model, double t, const BlockState& bs,
                                      double dt, double dW, std::optional<Quadrature> quadrature) {
    return em_step_blocks(BlockGenerator(model, t), bs, dt, dW, quadrature);
}

BlockState rk4_step_qme(const EmbeddingModel& model, double t, const BlockState& bs, double dt) {
    GeneratorCache cache(model);
    return rk4_step([&](double s, const BlockState& y) { return cache.at(s).qme_rhs(y); }, t, bs,
                    dt);
}

JointState rk4_step_joint(const EmbeddingModel& model, double t, const JointState& state,
                          double dt) {
    const auto f = [&](double s, const CMatrix& rho) {
        const FullOperators ops = full_operators(model, s);
        return gksl_rhs(ops.hamiltonian, ops.couplings, rho);
    };
    return {state.dims, rk4_step(f, t, state.rho, dt)};
}

void integrate_path(const EmbeddingModel& model, StateSnapshot& state, const SimConfig& cfg,
                    Representation representation,
                    const std::function<void(const StepInfo&, const StateSnapshot&)>& on_step,
                    BlockFault fault) {
    cfg.validate();
    const auto quadrature = quadrature_of(cfg.measurement);
    if (quadrature && !model.probe)
        throw ModelError("measurement requested but the model has no probe field");

    if (representation == Representation::joint && !std::holds_alternative<JointState>(state))
        state = as_joint(state);
    if (representation == Representation::blocks && !std::holds_alternative<BlockState>(state))
        state = blocks_from_joint(std::get<JointState>(state));

    GaussianStream noise(cfg.seed, cfg.stream);
    const double sqrt_dt = std::sqrt(cfg.dt);
    GeneratorCache cache(model, fault);
    const auto block_rhs = [&](double s, const BlockState& y) { return cache.at(s).qme_rhs(y); };

    const std::size_t steps = cfg.steps();
    for (std::size_t n = 0; n < steps; ++n) {
        StepInfo info;
        info.step = n;
        info.t = cfg.time_at(n);
        const double dW = quadrature ? sqrt_dt * noise.next() : 0.0;
        try {
            if (cfg.scheme == Scheme::rk4) {
                if (representation == Representation::joint)
                    state = rk4_step_joint(model, info.t, std::get<JointState>(state), cfg.dt);
                else
                    state = rk4_step(block_rhs, info.t, std::get<BlockState>(state), cfg.dt);
            } else if (representation == Representation::joint) {
                auto r = em_step_joint(model, info.t, std::get<JointState>(state), cfg.dt, dW,
                                       quadrature);
                state = std::move(r.state);
                info.dY = r.dY, info.dI = r.dI, info.mval = r.mval;
            } else {
                auto r = em_step_blocks(cache.at(info.t), std::get<BlockState>(state), cfg.dt, dW,
                                        quadrature);
                state = std::move(r.state);
                info.dY = r.dY, info.dI = r.dI, info.mval = r.mval;
            }
        } catch (const StepError&) {
            throw;
        } catch (const Error& e) {
            throw StepError(n, e.what());
        }
        on_step(info, state);
    }
}

TrajectoryRecord simulate_trajectory(const EmbeddingModel& model, const StateSnapshot& init,
                                     const SimConfig& cfg, Representation representation) {
    TrajectoryRecord rec;
    rec.seed = cfg.seed;
    rec.stream = cfg.stream;
    StateSnapshot state = init;
    if (representation == Representation::joint)
        state = as_joint(init);
    else if (!std::holds_alternative<BlockState>(init))
        state = blocks_from_joint(std::get<JointState>(init));
    rec.snapshot_times.push_back(0.0);
    rec.snapshots.push_back(state);

    integrate_path(model, state, cfg, representation,
                   [&](const StepInfo& info, const StateSnapshot& s) {
                       if (info.dY) {
                           rec.times.push_back(info.t);
                           rec.dY.push_back(*info.dY);
                           rec.dI.push_back(*info.dI);
                           rec.mvals.push_back(*info.mval);
                       }
                       if ((info.step + 1) % cfg.snapshot_stride == 0) {
                           rec.snapshot_times.push_back(cfg.time_at(info.step + 1));
                           rec.snapshots.push_back(s);
                       }
                   });
    return rec;
}

std::vector<QmeSample> solve_qme(const EmbeddingModel& model, const BlockState& init,
                                 const SimConfig& cfg) {
    if (cfg.scheme != Scheme::rk4)
        throw ModelError("solve_qme requires the rk4 scheme");
    SimConfig c = cfg;
    c.measurement = Measurement::none;
    c.validate();

    GeneratorCache cache(model);
    const auto f = [&](double s, const BlockState& y) { return cache.at(s).qme_rhs(y); };
    std::vector<QmeSample> out;
    out.push_back({0.0, init, init.reduced()});
    BlockState state = init;
    const std::size_t steps = c.steps();
    for (std::size_t n = 0; n < steps; ++n) {
        state = rk4_step(f, c.time_at(n), state, c.dt);
        if ((n + 1) % c.snapshot_stride == 0)
            out.push_back({c.time_at(n + 1), state, state.reduced()});
    }
    return out;
}

} // namespace qembed
