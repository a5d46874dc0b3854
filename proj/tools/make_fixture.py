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
"""Writes fixtures/random_model.json: a seeded random embedding model.

Principal qubit with probe sigma_minus, two auxiliaries of dimension 2 and 3,
one principal-auxiliary and one auxiliary-only field coupling per bath.
"""

import json
import pathlib
import sys

import numpy as np

SCALE = 0.5


def encode(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def gaussian(rng, d):
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)


def hermitian(rng, d):
    a = gaussian(rng, d)
    return 0.5 * (a + a.conj().T)


def build(seed):
    rng = np.random.default_rng(seed)
    ds, aux = 2, [2, 3]
    baths = []
    for da in aux:
        baths.append({
            "H_a": encode(SCALE * hermitian(rng, da)),
            "H_sa": encode(SCALE * hermitian(rng, ds * da)),
            "L1": [encode(SCALE * gaussian(rng, ds * da))],
            "L2": [encode(SCALE * gaussian(rng, da))],
        })
    return {
        "model": {
            "dims": {"principal": ds, "aux": aux},
            "H_s": encode(SCALE * hermitian(rng, ds)),
            "probe": [[0, 0], [1, 0]],
            "baths": baths,
        },
        "initial": {"principal": "plus", "aux": ["ground", "mixed"]},
        "sim": {"dt": 1e-3, "t_end": 1.0, "measurement": "amplitude", "seed": 2026, "snapshot_stride": 100},
        "run": {"N": 200, "observables": ["sx", "sy", "sz"], "representation": "blocks"},
    }


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures/random_model.json")
    out.write_text(json.dumps(build(20260101), indent=2) + "\n")


if __name__ == "__main__":
    main()
