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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qembed/integrators.hpp"
#include "qembed/rng.hpp"
#include "qembed/verify.hpp"
#include "test_support.hpp"

using namespace qembed;
using namespace qembed::testing;

namespace {

const Complex i1(0.0, 1.0);

EmbeddingModel qubit_model(const CMatrix& H, std::optional<CMatrix> probe,
                           std::vector<std::size_t> aux = {}) {
    EmbeddingModel m;
    m.dims = SubsystemDims(2, aux);
    m.H_s = TimedOperator(H, principal_slot());
    if (probe)
        m.probe = TimedOperator(*probe, principal_slot());
    for (std::size_t l = 0; l < aux.size(); ++l) {
        const auto da = static_cast<Eigen::Index>(aux[l]);
        m.baths.push_back({TimedOperator(CMatrix::Zero(da, da), aux_slot(l + 1)),
                           TimedOperator(CMatrix::Zero(2 * da, 2 * da), principal_aux_slots(l + 1)),
                           {}, {}});
    }
    return m;
}

/// exp(-iHt) rho exp(iHt) via the eigendecomposition of a hermitian H.
CMatrix unitary_evolve(const CMatrix& H, const CMatrix& rho, double t) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    const Eigen::VectorXcd phases = (-i1 * t * es.eigenvalues().cast<Complex>()).array().exp();
    const CMatrix U = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return U * rho * U.adjoint();
}

/// Qubit exchange with a damped qubit auxiliary, coupled directly.
EmbeddingModel exchange_model(double g, double kappa) {
    const CMatrix sm = qubit::sigma_minus(), sp = qubit::sigma_plus();
    const CMatrix h_sa = g * (kron(sp, sm) + kron(sm, sp));
    return direct_embedding(0.3 * qubit::sigma_z(), 0.1 * qubit::sigma_z(), h_sa, std::sqrt(kappa) * sm);
}

SimConfig config(double dt, double t_end, Scheme scheme, Measurement meas, std::uint64_t seed = 0) {
    SimConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.scheme = scheme;
    c.measurement = meas;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("SimConfig validation") {
    CHECK_NOTHROW(config(1e-3, 1.0, Scheme::euler_maruyama, Measurement::amplitude).validate());
    CHECK(config(1e-3, 1.0, Scheme::rk4, Measurement::none).steps() == 1000);
    CHECK(config(1e-3, 0.0, Scheme::rk4, Measurement::none).steps() == 0);
    CHECK_THROWS_AS(config(0.0, 1.0, Scheme::rk4, Measurement::none).validate(), ModelError);
    CHECK_THROWS_AS(config(1e-3, -1.0, Scheme::rk4, Measurement::none).validate(), ModelError);
    CHECK_THROWS_AS(config(0.3, 1.0, Scheme::rk4, Measurement::none).validate(), ModelError);
    CHECK_THROWS_AS(config(1e-3, 1.0, Scheme::rk4, Measurement::phase).validate(), ModelError);
    auto c = config(1e-3, 1.0, Scheme::rk4, Measurement::none);
    c.snapshot_stride = 0;
    CHECK_THROWS_AS(c.validate(), ModelError);
}

TEST_CASE("Euler-Maruyama joint step examples") {
    auto zero = qubit_model(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2));
    const JointState plus{zero.dims, qubit::plus()};
    auto r0 = em_step_joint(zero, 0.0, plus, 1e-3, 0.37);
    CHECK(r0.state.rho == plus.rho);
    CHECK(*r0.dY == 0.37);
    CHECK(*r0.dI == 0.37);

    auto decay = qubit_model(CMatrix::Zero(2, 2), qubit::sigma_minus());
    const double dt = 1e-3;
    auto r1 = em_step_joint(decay, 0.0, {decay.dims, qubit::excited()}, dt, 0.0);
    CHECK(max_abs_diff(r1.state.rho, from_rows({{1.0 - dt, 0.0}, {0.0, dt}})) <= 1e-9);
    CHECK(*r1.mval == 0.0);

    auto r2 = em_step_joint(decay, 0.0, {decay.dims, qubit::excited()}, dt, 0.0, std::nullopt);
    CHECK(!r2.dY.has_value());
    CHECK(!r2.dI.has_value());
    CHECK(r2.state.rho == r1.state.rho);

    // Excited state with a kick: G = sigma_x.
    auto r3 = em_step_joint(decay, 0.0, {decay.dims, qubit::excited()}, dt, 0.01);
    CHECK(max_abs_diff(r3.state.rho, from_rows({{1.0 - dt, 0.01}, {0.01, dt}})) <= 1e-15);

    // A non-finite update is reported, not renormalized away.
    CHECK_THROWS_AS(em_step_joint(decay, 0.0, {decay.dims, qubit::plus()}, dt, std::nan("")), Error);
}

TEST_CASE("block EM step on trivial auxiliaries matches the joint step") {
    Rng rng(8);
    const auto m = random_model(rng, 2, {1, 1}, 1, 1, true);
    const CMatrix rho = rng.density(2);
    const JointState js{m.dims, rho};
    const BlockState bs = blocks_from_joint(js);
    for (auto q : {Quadrature::amplitude, Quadrature::phase}) {
        auto a = em_step_joint(m, 0.0, js, 1e-3, 0.02, q);
        auto b = em_step_blocks(m, 0.0, bs, 1e-3, 0.02, q);
        CHECK(max_abs_diff(a.state.rho, b.state.block(0, 0)) <= 1e-15);
        CHECK(*a.dY == *b.dY);
        CHECK(*a.mval == doctest::Approx(*b.mval).epsilon(1e-15));
    }
}

TEST_CASE("block EM step equals the joint step under projection") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_model(rng, 2, {2, 3}, 1, 1, true);
        const JointState js = random_joint(rng, m.dims);
        const double dW = 0.03 * rng.normal();
        auto a = em_step_joint(m, 0.0, js, 1e-3, dW);
        auto b = em_step_blocks(m, 0.0, blocks_from_joint(js), 1e-3, dW);
        CHECK(fro_dist(joint_from_blocks(b.state).rho, a.state.rho) <= 1e-10);
        CHECK(b.state.pairing_defect() <= 1e-15);
        CHECK(std::abs(b.state.total_trace() - 1.0) <= 1e-12);
    }
    const auto zero = random_model(rng, 2, {2}, 0, 0, true, 0.0);
    const BlockState bs = blocks_from_joint(random_joint(rng, zero.dims));
    auto z = em_step_blocks(zero, 0.0, bs, 1e-3, -0.4);
    CHECK(max_abs_diff(z.state, bs) <= 1e-15);
    CHECK(*z.dY == -0.4);
}

TEST_CASE("RK4 examples") {
    auto zero = random_model(*std::make_unique<Rng>(1), 2, {2}, 1, 1, true, 0.0);
    Rng rng(10);
    const BlockState bs = blocks_from_joint(random_joint(rng, zero.dims));
    CHECK(max_abs_diff(rk4_step_qme(zero, 0.0, bs, 0.1), bs) == 0.0);

    const auto closed = qubit_model(qubit::sigma_z(), std::nullopt);
    const CMatrix rho = rng.density(2);
    const double dt = 1e-3;
    const auto step = rk4_step_joint(closed, 0.0, {closed.dims, rho}, dt);
    CHECK(max_abs_diff(step.rho, unitary_evolve(qubit::sigma_z(), rho, dt)) <= 1e-14);
    const BlockState one = blocks_from_joint({closed.dims, rho});
    CHECK(max_abs_diff(rk4_step_qme(closed, 0.0, one, dt).block(0, 0), step.rho) <= 1e-15);
}

TEST_CASE("trivial auxiliaries: amplitude damping follows exp(-t)") {
    const auto m = qubit_model(CMatrix::Zero(2, 2), qubit::sigma_minus(), {1});
    const auto cfg = config(1e-3, 2.0, Scheme::rk4, Measurement::none);
    BlockState init(m.dims);
    init.block(0, 0) = qubit::excited();
    const auto series = solve_qme(m, init, cfg);
    REQUIRE(series.size() == 2001);
    double worst = 0.0;
    for (const auto& s : series)
        worst = std::max(worst, std::abs(s.reduced(0, 0).real() - std::exp(-s.t)));
    CHECK(worst <= 1e-12);

    // Same series as plain GKSL RK4 on the principal alone.
    const auto c = collapse_trivial_aux(m, 0.0);
    CMatrix rho = qubit::excited();
    auto rhs = [&](double, const CMatrix& r) { return gksl_rhs(c.H, c.Ls, r); };
    for (std::size_t n = 1; n <= 50; ++n) {
        rho = rk4_step(rhs, 0.0, rho, cfg.dt);
        CHECK(series[n].reduced == rho);
    }
}

TEST_CASE("cascade with a silent principal leaves the auxiliary with its own GKSL dynamics") {
    const CMatrix sm = qubit::sigma_minus();
    const CMatrix h_a = 0.8 * qubit::sigma_x();
    const auto m = cascade_embedding(0.5 * qubit::sigma_z(), CMatrix::Zero(2, 2), h_a, sm);
    Rng rng(11);
    JointState js{m.dims, rng.density(4)};
    CMatrix aux = brute_partial_trace(js.rho, m.dims, {1});
    const std::vector<CMatrix> ls{sm};
    auto rhs = [&](double, const CMatrix& r) { return gksl_rhs(h_a, ls, r); };
    for (int n = 0; n < 200; ++n) {
        js = rk4_step_joint(m, n * 1e-2, js, 1e-2);
        aux = rk4_step(rhs, 0.0, aux, 1e-2);
    }
    CHECK(max_abs_diff(brute_partial_trace(js.rho, m.dims, {1}), aux) <= 1e-12);
}

TEST_CASE("solve_qme reduced dynamics match the joint-space oracle") {
    const auto m = exchange_model(1.0, 0.5);
    const CMatrix aux0 = qubit::ground();
    const JointState js0 = product_state(qubit::excited(), std::span<const CMatrix>(&aux0, 1));
    auto cfg = config(1e-3, 3.0, Scheme::rk4, Measurement::none);
    cfg.snapshot_stride = 100;
    const auto series = solve_qme(m, blocks_from_joint(js0), cfg);
    REQUIRE(series.size() == 31);

    JointState js = js0;
    double worst = 0.0, drift = 0.0;
    std::vector<double> pop;
    for (std::size_t n = 0; n <= cfg.steps(); ++n) {
        if (n % 100 == 0) {
            const auto& s = series[n / 100];
            CHECK(s.t == cfg.time_at(n));
            worst = std::max(worst, max_abs_diff(s.reduced, brute_partial_trace(js.rho, m.dims, {0})));
            drift = std::max(drift, std::abs(s.state.total_trace() - 1.0));
            CHECK(is_hermitian(s.reduced));
            CHECK(psd_check(s.reduced, kPsdTol).positive);
            pop.push_back(s.reduced(0, 0).real());
        }
        if (n < cfg.steps())
            js = rk4_step_joint(m, cfg.time_at(n), js, cfg.dt);
    }
    CHECK(worst <= 1e-10);
    CHECK(drift <= 1e-9);
    // Memory: the excited population is not monotone (exchange revivals).
    bool rises = false;
    for (std::size_t k = 1; k < pop.size(); ++k)
        rises = rises || pop[k] > pop[k - 1] + 1e-6;
    CHECK(rises);

    cfg.t_end = 0.0;
    const auto single = solve_qme(m, blocks_from_joint(js0), cfg);
    REQUIRE(single.size() == 1);
    CHECK(max_abs_diff(single[0].state, blocks_from_joint(js0)) == 0.0);
    cfg.t_end = 1.0;
    cfg.scheme = Scheme::euler_maruyama;
    CHECK_THROWS_AS(solve_qme(m, blocks_from_joint(js0), cfg), ModelError);
}

TEST_CASE("trajectory records") {
    Rng rng(12);
    const auto m = random_model(rng, 2, {2, 2}, 1, 1, true);
    const StateSnapshot init = blocks_from_joint(random_joint(rng, m.dims));
    auto cfg = config(1e-3, 0.5, Scheme::euler_maruyama, Measurement::amplitude, 99);
    cfg.snapshot_stride = 50;
    const auto rec = simulate_trajectory(m, init, cfg, Representation::blocks);
    REQUIRE(rec.dY.size() == 500);
    CHECK(rec.times.size() == 500);
    CHECK(rec.dI.size() == 500);
    CHECK(rec.mvals.size() == 500);
    CHECK(rec.snapshots.size() == 11);
    CHECK(rec.snapshot_times.back() == doctest::Approx(0.5));
    CHECK(rec.seed == 99);
    for (std::size_t n = 0; n < rec.dY.size(); ++n)
        CHECK((rec.dY[n] - rec.mvals[n] * cfg.dt) - rec.dI[n] == 0.0);
    for (const auto& s : rec.snapshots) {
        const auto& b = std::get<BlockState>(s);
        CHECK(std::abs(b.total_trace() - 1.0) <= 1e-9);
    }

    const auto again = simulate_trajectory(m, init, cfg, Representation::blocks);
    CHECK(again.dY == rec.dY);
    CHECK(again.mvals == rec.mvals);
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k)
        CHECK(max_abs_diff(std::get<BlockState>(again.snapshots[k]), std::get<BlockState>(rec.snapshots[k])) == 0.0);

    cfg.seed = 100;
    CHECK(simulate_trajectory(m, init, cfg, Representation::blocks).dY != rec.dY);

    cfg.measurement = Measurement::none;
    const auto quiet = simulate_trajectory(m, init, cfg, Representation::blocks);
    CHECK(quiet.dI.empty());
    CHECK(quiet.dY.empty());
}

TEST_CASE("joint and block trajectories share the noise path") {
    Rng rng(13);
    const auto m = random_model(rng, 2, {2}, 1, 1, true);
    const JointState js = random_joint(rng, m.dims);
    auto cfg = config(1e-3, 1.0, Scheme::euler_maruyama, Measurement::amplitude, 5);
    cfg.snapshot_stride = 1000;
    const auto a = simulate_trajectory(m, js, cfg, Representation::joint);
    const auto b = simulate_trajectory(m, blocks_from_joint(js), cfg, Representation::blocks);
    // dI is dY - mval dt as stored, so it reproduces dW up to the last bit.
    GaussianStream noise(5, 0);
    double dw_gap = 0.0;
    for (std::size_t n = 0; n < a.dI.size(); ++n) {
        const double dW = std::sqrt(cfg.dt) * noise.next();
        dw_gap = std::max({dw_gap, std::abs(a.dI[n] - dW), std::abs(b.dI[n] - dW)});
    }
    CHECK(dw_gap <= 1e-15);
    CHECK(fro_dist(as_joint(a.snapshots.back()).rho, as_joint(b.snapshots.back()).rho) <= 1e-9);
}

TEST_CASE("vacuum record: a zero probe leaves the state deterministic") {
    Rng rng(14);
    auto m = random_model(rng, 2, {2}, 1, 1, true);
    m.probe = TimedOperator(CMatrix::Zero(2, 2), principal_slot());
    const StateSnapshot init = blocks_from_joint(random_joint(rng, m.dims));
    auto cfg = config(1e-3, 0.2, Scheme::euler_maruyama, Measurement::amplitude, 1);
    cfg.snapshot_stride = 200;
    const auto a = simulate_trajectory(m, init, cfg, Representation::blocks);
    cfg.seed = 2;
    const auto b = simulate_trajectory(m, init, cfg, Representation::blocks);
    CHECK(a.dY != b.dY);
    CHECK(a.dY == a.dI);
    CHECK(max_abs_diff(std::get<BlockState>(a.snapshots.back()), std::get<BlockState>(b.snapshots.back())) == 0.0);
}

TEST_CASE("step failures carry the step index") {
    // Euler on strong damping with dt far beyond 1/rate: the excited population
    // is multiplied by (1 - 100 dt) every step until the arithmetic overflows.
    auto m = qubit_model(CMatrix::Zero(2, 2), 10.0 * qubit::sigma_minus());
    auto cfg = config(1.0, 1000.0, Scheme::euler_maruyama, Measurement::none, 3);
    try {
        simulate_trajectory(m, JointState{m.dims, qubit::plus()}, cfg, Representation::joint);
        FAIL("expected a step failure");
    } catch (const StepError& e) {
        CHECK(e.step() > 0);
        CHECK(e.step() < cfg.steps());
    }
}

TEST_CASE("generator cache follows schedule segments") {
    EmbeddingModel m;
    m.dims = SubsystemDims(2, {});
    m.H_s = TimedOperator({{0.0, qubit::sigma_z()}, {1.0, qubit::sigma_x()}}, principal_slot());
    GeneratorCache cache(m);
    BlockState bs(m.dims);
    bs.block(0, 0) = qubit::plus();
    CHECK(max_abs_diff(cache.at(0.5).qme_rhs(bs), block_qme_rhs(m, 0.5, bs)) == 0.0);
    CHECK(max_abs_diff(cache.at(1.5).qme_rhs(bs), block_qme_rhs(m, 1.5, bs)) == 0.0);
    CHECK(cache.at(1.5).qme_rhs(bs).block(0, 0).isZero(1e-15));
}
