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

#include "qembed/model.hpp"
#include "test_support.hpp"

using namespace qembed;
using qembed::testing::Rng;

TEST_CASE("eval_timed: constant and right-continuous boundaries") {
    const TimedOperator sx(qubit::sigma_x(), principal_slot());
    CHECK(eval_timed(sx, 3.7) == qubit::sigma_x());

    const CMatrix a = qubit::sigma_x(), b = qubit::sigma_z();
    const TimedOperator sched({{0.0, a}, {1.0, b}}, principal_slot());
    CHECK(eval_timed(sched, 1.0) == b);
    CHECK(eval_timed(sched, 0.999) == a);
    CHECK(eval_timed(sched, 0.0) == a);
    CHECK(eval_timed(sched, 50.0) == b);
    CHECK_THROWS_AS(eval_timed(sched, -1e-9), ModelError);
}

TEST_CASE("TimedOperator rejects malformed schedules") {
    const CMatrix a = qubit::sigma_x();
    CHECK_THROWS_AS(TimedOperator({{0.5, a}}, principal_slot()), ModelError);
    CHECK_THROWS_AS(TimedOperator({{0.0, a}, {0.0, a}}, principal_slot()), ModelError);
    CHECK_THROWS_AS(TimedOperator({{0.0, a}, {1.0, identity(3)}}, principal_slot()), DimensionError);
    CHECK_THROWS_AS(TimedOperator(std::vector<Segment>{}, principal_slot()), ModelError);
}

TEST_CASE("cascade embedding with no principal coupling") {
    Rng rng(2);
    const CMatrix La = rng.matrix(2);
    const auto m = cascade_embedding(qubit::sigma_z(), CMatrix::Zero(2, 2), qubit::sigma_z(), La);
    CHECK(m.baths.size() == 1);
    CHECK(m.baths[0].L2.empty());
    REQUIRE(m.baths[0].L1.size() == 1);
    CHECK(m.baths[0].H_sa.at(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.baths[0].L1[0].at(0) == kron(identity(2), La));
}

TEST_CASE("cascade embedding of two decaying qubits") {
    const CMatrix sm = qubit::sigma_minus(), sp = qubit::sigma_plus();
    const auto m = cascade_embedding(CMatrix::Zero(2, 2), sm, CMatrix::Zero(2, 2), sm);
    const CMatrix expected_h = (kron(sp, sm) - kron(sm, sp)) / Complex(0.0, 2.0);
    const CMatrix expected_l = kron(sm, identity(2)) + kron(identity(2), sm);
    CHECK(max_abs_diff(m.baths[0].H_sa.at(0), expected_h) <= 1e-15);
    CHECK(max_abs_diff(m.baths[0].L1[0].at(0), expected_l) == 0.0);
    CHECK(validate(m).empty());
}

TEST_CASE("cascade embedding of equal scalar couplings cancels the interaction") {
    const Complex c(0.3, -0.7);
    CMatrix l(1, 1);
    l(0, 0) = c;
    const CMatrix zero = CMatrix::Zero(1, 1);
    const auto m = cascade_embedding(zero, l, zero, l);
    CHECK(std::abs(m.baths[0].H_sa.at(0)(0, 0)) <= 1e-16);
    CHECK(m.baths[0].L1[0].at(0)(0, 0) == 2.0 * c);
}

TEST_CASE("cascade embedding always validates") {
    Rng rng(4);
    for (int trial = 0; trial < 25; ++trial) {
        const auto ds = static_cast<Eigen::Index>(rng.pick(1, 3));
        const auto da = static_cast<Eigen::Index>(rng.pick(1, 3));
        const auto m = cascade_embedding(rng.hermitian(ds), rng.matrix(ds), rng.hermitian(da), rng.matrix(da));
        CHECK(validate(m).empty());
        CHECK(hermiticity_defect(m.baths[0].H_sa.at(0)) <= 1e-12);
    }
    CHECK_THROWS_AS(cascade_embedding(qubit::sigma_minus(), identity(2), identity(2), identity(2)),
                    HermiticityError);
}

TEST_CASE("direct embedding") {
    const CMatrix z2 = CMatrix::Zero(2, 2), z4 = CMatrix::Zero(4, 4);
    const auto closed = direct_embedding(qubit::sigma_z(), qubit::sigma_z(), z4, z2);
    CHECK(validate(closed).empty());
    CHECK(closed.baths[0].L1.empty());
    CHECK(closed.baths[0].L2.size() == 1);

    const CMatrix sm = qubit::sigma_minus(), sp = qubit::sigma_plus();
    const CMatrix exchange = 0.8 * (kron(sp, sm) + kron(sm, sp));
    const auto m = direct_embedding(z2, z2, exchange, std::sqrt(0.5) * sm);
    CHECK(validate(m).empty());
    CHECK(m.baths[0].L2[0].at(0) == std::sqrt(0.5) * sm);

    CHECK_THROWS_AS(direct_embedding(z2, z2, kron(sp, sm), sm), HermiticityError);
}

TEST_CASE("validate reports located violations") {
    const CMatrix sm = qubit::sigma_minus();
    auto m = cascade_embedding(qubit::sigma_z(), sm, qubit::sigma_z(), sm);
    CHECK(validate(m).empty());
    CHECK(validate(m).empty());  // idempotent, no side effects

    auto bad_h = m;
    CMatrix h = qubit::sigma_z();
    h(0, 1) = 1e-3;
    bad_h.H_s = TimedOperator(h, principal_slot());
    auto v = validate(bad_h);
    REQUIRE(v.size() == 1);
    CHECK(v[0].op == "H_s");
    CHECK(v[0].check == "hermiticity");

    auto bad_l = m;
    bad_l.baths[0].L1[0] = TimedOperator(identity(6), principal_aux_slots(1));
    v = validate(bad_l);
    REQUIRE(v.size() == 1);
    CHECK(v[0].op == "baths[0].L1[0]");
    CHECK(v[0].check == "dimension");

    auto bad_seg = m;
    bad_seg.H_s = TimedOperator({{0.0, qubit::sigma_z()}, {2.0, sm}}, principal_slot());
    v = validate(bad_seg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].segment == 1);
}

TEST_CASE("segment keys change only at schedule boundaries") {
    auto m = cascade_embedding(qubit::sigma_z(), qubit::sigma_minus(), qubit::sigma_z(), qubit::sigma_minus());
    m.H_s = TimedOperator({{0.0, qubit::sigma_z()}, {0.5, qubit::sigma_x()}}, principal_slot());
    CHECK(m.segment_key(0.1) == m.segment_key(0.4));
    CHECK(m.segment_key(0.4) != m.segment_key(0.5));
    CHECK_FALSE(m.is_closed());
}

TEST_CASE("full operators embed every coupling in model order") {
    Rng rng(8);
    const auto m = testing::random_model(rng, 2, {2, 3}, 1, 1, true);
    const auto ops = full_operators(m, 0.0);
    REQUIRE(ops.couplings.size() == 5);
    const auto ref = testing::joint_ops(m, 0.0);
    CHECK(max_abs_diff(ops.couplings[0], ref.probe) == 0.0);
    CHECK(max_abs_diff(ops.couplings[1], ref.L_l[0][0]) == 0.0);
    CHECK(max_abs_diff(ops.couplings[4], ref.L_l[1][1]) == 0.0);
    CHECK(max_abs_diff(ops.hamiltonian, ref.H_s + ref.H_l[0] + ref.H_l[1]) <= 1e-14);
}
