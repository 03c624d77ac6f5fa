#!/usr/bin/env python3
"""
Statevector Simulators

Two backends over the same little-endian convention (qubit q is bit q of the basis index):
- StateVec: dense complex amplitudes, up to STATEVEC_CAP qubits
- BranchState: sparse dict basis -> amplitude, for oracle circuits whose registers exceed the
  dense cap but which stay close to permutations (few branching gates)

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np

from ..errors import DimensionCapError
from .ir import CircuitIR, Gate

logger = logging.getLogger(__name__)

STATEVEC_CAP = 24
NORM_TOL = 1e-12
PRUNE_TOL = 1e-15


def _two_by_two(g: Gate) -> np.ndarray:
    if g.name == "H":
        return np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
    if g.name == "RY":
        c, s = math.cos(g.param / 2), math.sin(g.param / 2)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    raise ValueError(f"{g.name} is not a single-qubit rotation")


# ============================================================================
# Dense Backend
# ============================================================================

@dataclass
class StateVec:
    """Container for a dense state over num_qubits qubits."""
    num_qubits: int
    amplitudes: np.ndarray
    labels: Dict[str, range] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_qubits > STATEVEC_CAP:
            raise DimensionCapError(f"{self.num_qubits} qubits exceed the dense cap of {STATEVEC_CAP}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> "StateVec":
        if num_qubits > STATEVEC_CAP:
            raise DimensionCapError(f"{num_qubits} qubits exceed the dense cap of {STATEVEC_CAP}")
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray) -> "StateVec":
        amps = np.asarray(amps, dtype=np.complex128)
        n = int(round(math.log2(amps.size)))
        return cls(n, amps / np.linalg.norm(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def _active(self, g: Gate, idx: np.ndarray) -> np.ndarray:
        mask = np.ones(idx.size, dtype=bool)
        for c, v in zip(g.controls, g.control_values):
            mask &= ((idx >> c) & 1) == v
        return mask

    def apply(self, g: Gate) -> "StateVec":
        if g.name == "BARRIER":
            return self
        psi = self.amplitudes
        idx = np.arange(psi.size, dtype=np.int64)
        active = self._active(g, idx)
        out = psi.copy()
        if g.name == "X":
            t = 1 << g.targets[0]
            sel = idx[active]
            out[sel] = psi[sel ^ t]
        elif g.name == "Z":
            sel = idx[active & (((idx >> g.targets[0]) & 1) == 1)]
            out[sel] = -psi[sel]
        elif g.name in ("H", "RY"):
            t = 1 << g.targets[0]
            lo = idx[active & ((idx & t) == 0)]
            hi = lo | t
            U = _two_by_two(g)
            a, b = psi[lo], psi[hi]
            out[lo] = U[0, 0] * a + U[0, 1] * b
            out[hi] = U[1, 0] * a + U[1, 1] * b
        elif g.name == "GIVENS":
            i, j = (1 << q for q in g.targets)
            ten = idx[active & ((idx & i) != 0) & ((idx & j) == 0)]
            one = ten ^ i ^ j
            c, s = math.cos(g.param), math.sin(g.param)
            a, b = psi[ten], psi[one]
            out[ten] = c * a - s * b
            out[one] = s * a + c * b
        elif g.name == "SWAP":
            i, j = g.targets
            diff = active & ((((idx >> i) ^ (idx >> j)) & 1) == 1)
            sel = idx[diff]
            out[sel] = psi[sel ^ (1 << i) ^ (1 << j)]
        else:
            raise ValueError(f"unsupported gate {g.name}")
        self.amplitudes = out
        return self

    def run(self, ir: CircuitIR, check_norm: bool = False) -> "StateVec":
        for g in ir.gates:
            self.apply(g)
            if check_norm and abs(self.norm - 1.0) > NORM_TOL:
                raise AssertionError(f"norm drifted to {self.norm} after {g.label}")
        return self

    def probability(self, pattern: Dict[int, int]) -> float:
        """Probability that every qubit in pattern reads its value."""
        idx = np.arange(self.amplitudes.size, dtype=np.int64)
        mask = np.ones(idx.size, dtype=bool)
        for q, v in pattern.items():
            mask &= ((idx >> q) & 1) == v
        return float(np.sum(np.abs(self.amplitudes[mask]) ** 2))


# ============================================================================
# Sparse Backend
# ============================================================================

class BranchState:
    """Sparse state: a dict from basis integers to amplitudes."""

    def __init__(self, amplitudes: Optional[Dict[int, complex]] = None):
        self.amplitudes: Dict[int, complex] = dict(amplitudes or {})

    @classmethod
    def basis(cls, index: int) -> "BranchState":
        return cls({int(index): 1.0 + 0j})

    def __len__(self) -> int:
        return len(self.amplitudes)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    @staticmethod
    def _is_active(g: Gate, b: int) -> bool:
        return all(((b >> c) & 1) == v for c, v in zip(g.controls, g.control_values))

    def apply(self, g: Gate) -> "BranchState":
        if g.name == "BARRIER":
            return self
        out: Dict[int, complex] = {}

        def add(b: int, a: complex) -> None:
            out[b] = out.get(b, 0j) + a

        if g.name in ("X", "Z", "SWAP"):
            for b, a in self.amplitudes.items():
                if not self._is_active(g, b):
                    out[b] = a
                elif g.name == "X":
                    out[b ^ (1 << g.targets[0])] = a
                elif g.name == "Z":
                    out[b] = -a if (b >> g.targets[0]) & 1 else a
                else:
                    i, j = g.targets
                    out[b ^ (1 << i) ^ (1 << j) if ((b >> i) ^ (b >> j)) & 1 else b] = a
            self.amplitudes = out
            return self

        if g.name in ("H", "RY"):
            U = _two_by_two(g)
            t = g.targets[0]
            for b, a in self.amplitudes.items():
                if not self._is_active(g, b):
                    add(b, a)
                    continue
                bit = (b >> t) & 1
                lo = b & ~(1 << t)
                add(lo, U[0, bit] * a)
                add(lo | (1 << t), U[1, bit] * a)
        elif g.name == "GIVENS":
            i, j = g.targets
            c, s = math.cos(g.param), math.sin(g.param)
            for b, a in self.amplitudes.items():
                bi, bj = (b >> i) & 1, (b >> j) & 1
                if not self._is_active(g, b) or bi == bj:
                    add(b, a)
                    continue
                ten = (b | (1 << i)) & ~(1 << j)
                one = (b | (1 << j)) & ~(1 << i)
                if bi:
                    add(ten, c * a)
                    add(one, s * a)
                else:
                    add(ten, -s * a)
                    add(one, c * a)
        else:
            raise ValueError(f"unsupported gate {g.name}")
        self.amplitudes = {b: a for b, a in out.items() if abs(a) > PRUNE_TOL}
        return self

    def run(self, ir: CircuitIR) -> "BranchState":
        for g in ir.gates:
            self.apply(g)
        return self

    def run_gates(self, gates: Iterable[Gate]) -> "BranchState":
        for g in gates:
            self.apply(g)
        return self

    def project(self, pattern: Dict[int, int]) -> Dict[int, complex]:
        """Amplitudes of the basis states matching pattern."""
        return {b: a for b, a in self.amplitudes.items()
                if all(((b >> q) & 1) == v for q, v in pattern.items())}

    def probability(self, pattern: Dict[int, int]) -> float:
        return float(sum(abs(a) ** 2 for a in self.project(pattern).values()))


def bits_of(value: int, qubits: Iterable[int]) -> Dict[int, int]:
    """Little-endian assignment of value onto the listed qubits."""
    return {q: (value >> i) & 1 for i, q in enumerate(qubits)}


def encode(assignment: Dict[int, int]) -> int:
    return sum(v << q for q, v in assignment.items())


def read(basis: int, qubits: Iterable[int]) -> int:
    return sum(((basis >> q) & 1) << i for i, q in enumerate(qubits))
