# Copyright 2026 The qembed Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke tests for the Python bindings."""

import math
import pathlib

import numpy as np
import pytest

import qembed

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "fixtures"

SM = np.array([[0, 0], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
EXCITED = np.diag([1.0, 0.0]).astype(complex)
GROUND = np.diag([0.0, 1.0]).astype(complex)


def exchange(g):
    sp = SM.conj().T
    h_sa = g * (np.kron(sp, SM) + np.kron(SM, sp))
    return qembed.Model(2, [2], np.zeros((2, 2)), baths=[{"H_sa": h_sa}])


def test_kron_and_partial_trace():
    a = np.arange(4).reshape(2, 2).astype(complex)
    assert np.array_equal(qembed.kron(a, np.eye(3)), np.kron(a, np.eye(3)))
    rho = np.kron(EXCITED, np.eye(3) / 3)
    assert np.allclose(qembed.partial_trace(rho, 2, [3], [0]), EXCITED)


def test_gksl_decay():
    d = qembed.gksl_rhs(np.zeros((2, 2)), [SM], EXCITED)
    assert np.allclose(d, GROUND - EXCITED)


def test_philox_known_answer():
    assert qembed.philox4x32([0, 0, 0, 0], [0, 0]) == [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]
    assert qembed.gaussians(1, 0, 8) == qembed.gaussians(1, 0, 8)


def test_model_validation_errors():
    with pytest.raises(RuntimeError):
        qembed.Model(2, [], np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(RuntimeError):
        qembed.Model(2, [2], SZ, baths=[])


def test_block_round_trip_and_projection():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    model = qembed.with_probe(qembed.cascade_embedding(SZ, SM, 0.5 * SZ, SM), SM)
    bs = qembed.blocks_from_joint(model, rho)
    assert bs.aux_count == 2
    assert np.array_equal(bs.to_joint(), rho)
    assert np.allclose(bs.reduced(), qembed.partial_trace(rho, 2, [2], [0]))

    # The block generator reassembles to the joint GKSL generator.
    joint = qembed.gksl_rhs(model.hamiltonian(), model.couplings(), rho)
    assert np.max(np.abs(qembed.qme_rhs(model, rho) - joint)) < 1e-12


def test_closed_exchange_matches_cos_squared():
    model = exchange(1.0)
    rho = np.kron(EXCITED, GROUND)
    times, reduced = qembed.solve_qme(model, rho, 1e-3, 1.0, 100)
    oracle = qembed.closed_system_oracle(model, rho, times)
    for t, r, o in zip(times, reduced, oracle):
        assert abs(r[0, 0].real - math.cos(t) ** 2) < 1e-8
        assert np.max(np.abs(r - o)) < 1e-8


def test_crosscheck_and_mutation():
    cfg = qembed.load_config(FIXTURES / "random_model.json")
    model, rho = cfg["model"], cfg["initial"]
    assert qembed.crosscheck(model, rho, 1e-3, 0.2, seed=3) <= 1e-10
    assert qembed.crosscheck(model, rho, 1e-3, 0.2, seed=3, fault="aux_hamiltonian") > 1e-3


def test_trajectory_record_and_determinism():
    model = qembed.with_probe(qembed.cascade_embedding(np.zeros((2, 2)), SM, np.zeros((2, 2)), SM), SM)
    rho = np.kron(EXCITED, GROUND)
    a = qembed.simulate_trajectory(model, rho, 1e-3, 0.1, seed=5, stride=10)
    b = qembed.simulate_trajectory(model, rho, 1e-3, 0.1, seed=5, stride=10)
    assert a["dY"] == b["dY"]
    assert len(a["reduced"]) == 11
    for dy, m, di in zip(a["dY"], a["mval"], a["dI"]):
        assert (dy - m * 1e-3) - di == 0.0


def test_ensemble_summary_shape():
    model = qembed.with_probe(qembed.cascade_embedding(np.zeros((2, 2)), SM, np.zeros((2, 2)), SM), SM)
    rho = np.kron(np.full((2, 2), 0.5, dtype=complex), EXCITED)
    s = qembed.ensemble_average(model, rho, 1e-2, 0.5, seed=1, N=50)
    assert s["N"] == 50
    assert s["names"] == ["sx", "sy", "sz"]
    assert len(s["checkpoints"]) == 10
    assert all(e >= 0 for row in s["stderr"] for e in row)


def test_cli_in_process():
    code, out, _ = qembed.run_cli(["validate", "--config", str(FIXTURES / "minimal_qubit.json")])
    assert code == 0
    assert "principal 2" in out
