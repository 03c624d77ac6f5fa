"""
Circuit constructions, static counting and small-scale simulation.

Modules:
- ir: gates, registers, text export and Toffoli/T/depth counting
- simulator: dense and sparse statevector backends
- gadgets: Dicke preparation, one-hot shuffling, tensor and guiding state preparation
- oracles: sparse-access oracles and the Kikuchi block encoding
- qsp: QSP response and angle-rounding error
"""

from .gadgets import (
    dicke_conditions,
    dicke_prep,
    dicke_resources,
    guiding_prep_check,
    guiding_prep_circuit,
    one_hot_shuffle,
    shuffle_check,
    state_prep_check,
    state_prep_circuit,
)
from .ir import CircuitIR, CountReport, Gate, count
from .oracles import (
    block_encoding_check,
    oracle_a_check,
    oracle_circuits,
    oracle_e_check,
    p_gadget,
    per_term_circuit,
)
from .qsp import qsp_error_sweep, qsp_response, qsp_rounding_error
from .simulator import BranchState, StateVec

__all__ = [
    "CircuitIR",
    "CountReport",
    "Gate",
    "count",
    "StateVec",
    "BranchState",
    "dicke_prep",
    "dicke_resources",
    "dicke_conditions",
    "one_hot_shuffle",
    "shuffle_check",
    "state_prep_circuit",
    "state_prep_check",
    "guiding_prep_circuit",
    "guiding_prep_check",
    "oracle_circuits",
    "block_encoding_check",
    "oracle_a_check",
    "oracle_e_check",
    "p_gadget",
    "per_term_circuit",
    "qsp_response",
    "qsp_rounding_error",
    "qsp_error_sweep",
]
