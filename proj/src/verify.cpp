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

#include "qembed/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "qembed/rng.hpp"

namespace qembed {

BlockState blocks_from_joint(const JointState& js) {
    const auto& dims = js.dims;
    const auto d = static_cast<Eigen::Index>(dims.total());
    if (js.rho.rows() != d || js.rho.cols() != d)
        throw DimensionError("joint state matrix does not match its dimensions");
    BlockState bs(dims);
    const auto n = static_cast<Eigen::Index>(bs.aux_count());
    const auto ds = static_cast<Eigen::Index>(dims.principal());
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            CMatrix& b = bs.block(j, k);
            for (Eigen::Index s = 0; s < ds; ++s)
                for (Eigen::Index r = 0; r < ds; ++r)
                    b(s, r) = js.rho(s * n + j, r * n + k);
        }
    return bs;
}

JointState joint_from_blocks(const BlockState& bs) {
    const auto& dims = bs.dims();
    const auto n = static_cast<Eigen::Index>(bs.aux_count());
    const auto ds = static_cast<Eigen::Index>(dims.principal());
    if (bs.blocks().size() != static_cast<std::size_t>(n * n))
        throw DimensionError("block state is missing blocks");
    JointState js{dims, CMatrix(ds * n, ds * n)};
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const CMatrix& b = bs.block(j, k);
            if (b.rows() != ds || b.cols() != ds)
                throw DimensionError("block has the wrong shape");
            for (Eigen::Index s = 0; s < ds; ++s)
                for (Eigen::Index r = 0; r < ds; ++r)
                    js.rho(s * n + j, r * n + k) = b(s, r);
        }
    return js;
}

JointState product_state(const CMatrix& principal, std::span<const CMatrix> aux) {
    auto check = [](const CMatrix& f) {
        if (f.rows() != f.cols())
            throw DimensionError("product_state factors must be square");
        if (!is_hermitian(f))
            throw HermiticityError("product_state factors must be hermitian");
    };
    check(principal);
    std::vector<std::size_t> dims;
    CMatrix rho = principal;
    for (const auto& a : aux) {
        check(a);
        dims.push_back(static_cast<std::size_t>(a.rows()));
        rho = kron(rho, a);
    }
    return {SubsystemDims(static_cast<std::size_t>(principal.rows()), dims), rho};
}

double crosscheck_paths(const EmbeddingModel& model, const StateSnapshot& init,
                        const SimConfig& cfg, BlockFault fault) {
    // The joint path is driven step by step with the noise the block path
    // draws, so both consume the same Wiener increments.
    const double sqrt_dt = std::sqrt(cfg.dt);
    GaussianStream noise(cfg.seed, cfg.stream);
    const auto quadrature = quadrature_of(cfg.measurement);

    JointState joint = as_joint(init);
    StateSnapshot blocks = blocks_from_joint(joint);
    double worst = 0.0;
    integrate_path(
        model, blocks, cfg, Representation::blocks,
        [&](const StepInfo& info, const StateSnapshot& s) {
            if (cfg.scheme == Scheme::rk4) {
                joint = rk4_step_joint(model, info.t, joint, cfg.dt);
            } else {
                const double dW = quadrature ? sqrt_dt * noise.next() : 0.0;
                try {
                    joint = em_step_joint(model, info.t, joint, cfg.dt, dW, quadrature).state;
                } catch (const Error& e) {
                    throw StepError(info.step, e.what());
                }
            }
            worst = std::max(worst, fro_dist(joint_from_blocks(std::get<BlockState>(s)).rho, joint.rho));
        },
        fault);
    return worst;
}

std::vector<CMatrix> closed_system_oracle(const EmbeddingModel& model, const JointState& init,
                                          std::span<const double> times) {
    if (!model.is_closed())
        throw ModelError("closed_system_oracle: model has field couplings or a probe");
    if (init.dims != model.dims)
        throw DimensionError("closed_system_oracle: initial state does not match the model");

    std::set<double> breaks;
    const auto collect = [&](const TimedOperator& op) {
        for (const auto& s : op.segments())
            breaks.insert(s.t_start);
    };
    collect(model.H_s);
    for (const auto& b : model.baths) {
        collect(b.H_a);
        collect(b.H_sa);
    }

    std::vector<CMatrix> out;
    CMatrix rho = init.rho;
    double now = 0.0;
    const auto advance = [&](double to) {
        while (now < to) {
            const auto next_break = breaks.upper_bound(now);
            const double stop = next_break == breaks.end() ? to : std::min(to, *next_break);
            const CMatrix H = full_operators(model, now).hamiltonian;
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (H + H.adjoint()));
            const double tau = stop - now;
            Eigen::VectorXcd phases(eig.eigenvalues().size());
            for (Eigen::Index i = 0; i < phases.size(); ++i)
                phases(i) = std::exp(-kI * eig.eigenvalues()(i) * tau);
            const CMatrix U = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
            rho = U * rho * U.adjoint();
            now = stop;
        }
    };
    for (double t : times) {
        if (t < now || t < 0.0)
            throw ModelError("closed_system_oracle: times must be non-decreasing and >= 0");
        advance(t);
        out.push_back(partial_trace(rho, model.dims, principal_slot()));
    }
    return out;
}

std::vector<Observable> default_observables(std::size_t principal_dim) {
    if (principal_dim == 2)
        return {{"sx", qubit::sigma_x()}, {"sy", qubit::sigma_y()}, {"sz", qubit::sigma_z()}};
    std::vector<Observable> out;
    const auto d = static_cast<Eigen::Index>(principal_dim);
    for (Eigen::Index n = 0; n < d; ++n) {
        CMatrix p = CMatrix::Zero(d, d);
        p(n, n) = 1.0;
        out.push_back({"p" + std::to_string(n), p});
    }
    return out;
}

std::vector<std::size_t> checkpoint_steps(std::size_t steps, std::size_t count) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k <= count; ++k)
        out.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * static_cast<double>(steps) / static_cast<double>(count))));
    return out;
}

namespace {

double expectation(const CMatrix& op, const CMatrix& rho) { return (op * rho).trace().real(); }

struct TrajectoryResult {
    std::vector<double> obs;  // [checkpoint * n_obs + observable]
    double innovation = 0.0;
};

} // namespace

EnsembleSummary ensemble_average(const EmbeddingModel& model, const StateSnapshot& init,
                                 const SimConfig& cfg, std::size_t N,
                                 const std::vector<Observable>& observables,
                                 const EnsembleOptions& options) {
    if (N < 2)
        throw ModelError("ensemble_average needs N >= 2");
    if (!model.probe)
        throw ModelError("ensemble_average needs a probe field");
    if (cfg.measurement == Measurement::none || cfg.scheme != Scheme::euler_maruyama)
        throw ModelError("ensemble_average needs euler-maruyama with a measurement");
    cfg.validate();
    const auto ds = static_cast<Eigen::Index>(model.dims.principal());
    for (const auto& o : observables)
        if (o.op.rows() != ds || o.op.cols() != ds)
            throw DimensionError("observable " + o.name + " has the wrong shape");

    const std::size_t steps = cfg.steps();
    const auto cps = checkpoint_steps(steps, options.num_checkpoints);
    const std::size_t n_obs = observables.size();
    const std::size_t n_cp = cps.size();

    std::vector<TrajectoryResult> results(N);
    const auto run_one = [&](std::size_t index) {
        SimConfig c = cfg;
        c.stream = index;
        TrajectoryResult r;
        r.obs.assign(n_cp * n_obs, 0.0);
        StateSnapshot state = init;
        std::size_t next_cp = 0;
        const auto record = [&](std::size_t step, const StateSnapshot& s) {
            while (next_cp < n_cp && cps[next_cp] == step) {
                const CMatrix red = reduced_state(s);
                for (std::size_t o = 0; o < n_obs; ++o)
                    r.obs[next_cp * n_obs + o] = expectation(observables[o].op, red);
                ++next_cp;
            }
        };
        record(0, state);
        integrate_path(model, state, c, options.representation,
                       [&](const StepInfo& info, const StateSnapshot& s) {
                           r.innovation += info.dI.value_or(0.0);
                           record(info.step + 1, s);
                       });
        results[index] = std::move(r);
    };

    std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
    threads = std::clamp<std::size_t>(threads, 1, N);
    if (threads == 1) {
        for (std::size_t i = 0; i < N; ++i) {
            try {
                run_one(i);
            } catch (const Error& e) {
                throw Error("trajectory " + std::to_string(i) + ": " + e.what());
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::size_t err_index = N;
        std::string err_what;
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < N; i = next++) {
                    try {
                        run_one(i);
                    } catch (const std::exception& e) {
                        std::lock_guard lock(err_mutex);
                        if (i < err_index) {
                            err_index = i;
                            err_what = e.what();
                        }
                    }
                }
            });
        pool.clear();
        if (err_index < N)
            throw Error("trajectory " + std::to_string(err_index) + ": " + err_what);
    }

    EnsembleSummary out;
    out.N = N;
    for (const auto& o : observables)
        out.names.push_back(o.name);
    for (std::size_t cp : cps)
        out.checkpoints.push_back(cfg.time_at(cp));

    // Shifted sums: identical samples give an exact mean and zero variance.
    const auto moments = [&](auto&& sample, double& mean, double& var) {
        const double shift = sample(0);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double d = sample(i) - shift;
            s1 += d;
            s2 += d * d;
        }
        const double nd = static_cast<double>(N);
        mean = shift + s1 / nd;
        var = std::max(0.0, (s2 - s1 * s1 / nd) / (nd - 1.0));
    };

    out.mean_obs.assign(n_cp, std::vector<double>(n_obs));
    out.stderr_obs.assign(n_cp, std::vector<double>(n_obs));
    for (std::size_t c = 0; c < n_cp; ++c)
        for (std::size_t o = 0; o < n_obs; ++o) {
            double mean, var;
            moments([&](std::size_t i) { return results[i].obs[c * n_obs + o]; }, mean, var);
            out.mean_obs[c][o] = mean;
            out.stderr_obs[c][o] = std::sqrt(var / static_cast<double>(N));
        }
    moments([&](std::size_t i) { return results[i].innovation; }, out.innovation_mean,
            out.innovation_var);

    SimConfig qcfg = cfg;
    qcfg.scheme = Scheme::rk4;
    qcfg.measurement = Measurement::none;
    qcfg.snapshot_stride = 1;
    const BlockState init_blocks = std::holds_alternative<BlockState>(init)
                                       ? std::get<BlockState>(init)
                                       : blocks_from_joint(std::get<JointState>(init));
    const auto qme = solve_qme(model, init_blocks, qcfg);
    out.qme_obs.assign(n_cp, std::vector<double>(n_obs));
    for (std::size_t c = 0; c < n_cp; ++c)
        for (std::size_t o = 0; o < n_obs; ++o)
            out.qme_obs[c][o] = expectation(observables[o].op, qme[cps[c]].reduced);
    return out;
}

} // namespace qembed
