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
"""Markovian embeddings of non-Markovian open quantum systems."""

from ._core import (
    BlockState,
    Model,
    QembedError,
    __version__,
    blocks_from_joint,
    cascade_embedding,
    closed_system_oracle,
    crosscheck,
    direct_embedding,
    ensemble_average,
    gaussians,
    gksl_rhs,
    kron,
    load_config,
    partial_trace,
    philox4x32,
    qme_rhs,
    run_cli,
    simulate_trajectory,
    solve_qme,
    with_probe,
)

__all__ = [
    "BlockState",
    "Model",
    "QembedError",
    "__version__",
    "blocks_from_joint",
    "cascade_embedding",
    "closed_system_oracle",
    "crosscheck",
    "direct_embedding",
    "ensemble_average",
    "gaussians",
    "gksl_rhs",
    "kron",
    "load_config",
    "partial_trace",
    "philox4x32",
    "qme_rhs",
    "run_cli",
    "simulate_trajectory",
    "solve_qme",
    "with_probe",
]
