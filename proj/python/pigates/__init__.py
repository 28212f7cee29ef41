# Copyright 2026 The pigates Authors
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

"""Simulation and path-independence certification of ancilla-assisted gates.

The heavy lifting lives in the compiled extension; this package re-exports its
surface. All frequencies are angular (rad/us) and times are in us.
"""

from _pigates import (  # noqa: F401
    KlDiagonalization,
    LogicalCode,
    SnapConfig,
    SystemModel,
    binomial_code,
    build_approx_snap_scenario,
    build_dispersive_scenario,
    build_pi_et_unitary,
    build_snap_scenario,
    certify_model,
    conditional_channel,
    detect_nas,
    dyson_superoperator,
    effective_hamiltonian,
    error_timing_equivalence,
    evolve_master,
    exact_pair_propagator,
    frame_rotation,
    gate_metrics,
    kl_diagonalize,
    kronecker,
    matrix_exponential,
    no_jump_propagator,
    path_operator,
    pi_order,
    proportionality_distance,
    snap_operator,
    unitary_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
