#!/usr/bin/env python3
"""
State-Preparation Gadgets

Provides:
- dicke_prep: the weight-1 Dicke preparation ladder on 2^l qubits (controlled-H + Toffoli/CX)
- one_hot_shuffle: the inverse Givens network that merges c one-hot qubits into the first
- state_prep_circuit: |phi>^{(x)c} from a +/-1 tensor through a dense s-qubit index register
- guiding_prep_circuit: c state preparations, regrouping by variable and parallel shuffles

Each constructor has a *_check companion that simulates the circuit and returns deviations.

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from ..combinatorics import SubsetIndexer
from ..errors import DimensionCapError
from ..guiding import build_guiding
from ..model import SparseSignedTensor
from .ir import CircuitIR, count, givens, h, x, z
from .simulator import BranchState, StateVec, read

logger = logging.getLogger(__name__)

BRANCH_CAP = 2_000_000


def index_bits(m: int) -> int:
    """s = ceil(log2 m), the dense index register width."""
    return max(0, math.ceil(math.log2(m))) if m > 0 else 0


# ============================================================================
# Dicke Preparation
# ============================================================================

def dicke_prep(l: int) -> CircuitIR:
    """
    Weight-1 Dicke preparation on k = 2^l qubits: |1 0...0> -> |D_1^(k)>, |0...0> fixed.

    Controlled-H on qubit 2^i - 1 for every i (all controlled by qubit 0), then per level i a CX
    for i = 1 or, for i >= 2, Toffoli/CX triples over j < 2^(i-1) - 1 closed by one CX.
    Resources: l controlled-H (2 each) and 2^l - l - 1 Toffolis, i.e. 2^l + l - 1.
    """
    if l < 0:
        raise ValueError(f"l must be nonnegative, got {l}")
    ir = CircuitIR(f"dicke_{l}")
    q = ir.add_register("q", 2 ** l)
    for i in range(1, l + 1):
        ir.append(h(q[2 ** i - 1], [q[0]]))
    for i in range(1, l + 1):
        if i == 1:
            ir.append(x(q[0], [q[1]]))
            continue
        top, half = 2 ** i - 1, 2 ** (i - 1)
        for j in range(half - 1):
            ir.append(x(q[half + j], [q[top], q[j]]))
            ir.append(x(q[j], [q[half + j]]))
            ir.append(x(q[top], [q[half + j]]))
        ir.append(x(q[half - 1], [q[top]]))
    return ir


def dicke_resources(l: int) -> int:
    return 2 ** l + l - 1


@dataclass
class DickeCheck:
    """Container for the three Dicke conditions of U = dicke_prep(l)^dagger."""
    l: int
    zero_deviation: float
    d1_deviation: float
    leakage: float
    norm_deviation: float

    @property
    def passed(self) -> bool:
        return max(self.zero_deviation, self.d1_deviation, self.leakage, self.norm_deviation) <= 1e-12


def dicke_state(k: int, p: int) -> np.ndarray:
    idx = np.arange(1 << k)
    weights = np.array([bin(i).count("1") for i in idx])
    vec = (weights == p).astype(np.complex128)
    return vec / np.linalg.norm(vec)


def dicke_conditions(l: int) -> DickeCheck:
    """U|0> = |0>, U|D_1> = |1 0...0>, and U|D_p> (p > 1) has no weight on |.>|0>^(k-1)."""
    k = 2 ** l
    U = dicke_prep(l).inverse()
    zero = StateVec.basis(k, 0).run(U, check_norm=True)
    zero_dev = float(np.max(np.abs(zero.amplitudes - StateVec.basis(k, 0).amplitudes)))

    d1 = StateVec.from_amplitudes(dicke_state(k, 1)).run(U, check_norm=True)
    d1_dev = float(np.max(np.abs(d1.amplitudes - StateVec.basis(k, 1).amplitudes)))

    rest = {q: 0 for q in range(1, k)}
    leak, norm_dev = 0.0, max(abs(zero.norm - 1), abs(d1.norm - 1))
    for p in range(2, k + 1):
        out = StateVec.from_amplitudes(dicke_state(k, p)).run(U, check_norm=True)
        leak = max(leak, out.probability(rest))
        norm_dev = max(norm_dev, abs(out.norm - 1))
    return DickeCheck(l=l, zero_deviation=zero_dev, d1_deviation=d1_dev, leakage=leak,
                      norm_deviation=norm_dev)


# ============================================================================
# One-Hot Shuffle
# ============================================================================

def shuffle_angles(c: int) -> List[float]:
    """Givens angles arccos(1/sqrt(c + 1 - i)) for i = 1..c-1."""
    return [math.acos(1 / math.sqrt(c + 1 - i)) for i in range(1, c)]


def one_hot_shuffle_gates(qubits: List[int]):
    """Gates of D^c_1^dagger on the listed qubits (qubit 0 is the one kept)."""
    c = len(qubits)
    forward = [givens(qubits[i], qubits[i + 1], theta) for i, theta in enumerate(shuffle_angles(c))]
    return [g.inverse() for g in reversed(forward)]


def one_hot_shuffle(c: int) -> CircuitIR:
    """D^c_1^dagger: a weight-1 input lands on |1 0...0> with probability 1/c."""
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    ir = CircuitIR(f"shuffle_{c}")
    q = ir.add_register("q", c)
    ir.extend(one_hot_shuffle_gates(q.qubits))
    ir.postselect = {qq: 0 for qq in q.qubits[1:]}
    return ir


@dataclass
class ShuffleCheck:
    """Container for one-hot shuffle postselection statistics."""
    c: int
    weight1_probs: List[float]
    weight0_prob: float
    leakage: float

    @property
    def passed(self) -> bool:
        return (all(abs(p - 1 / self.c) <= 1e-12 for p in self.weight1_probs)
                and abs(self.weight0_prob - 1) <= 1e-12 and self.leakage <= 1e-12)


def shuffle_check(c: int) -> ShuffleCheck:
    ir = one_hot_shuffle(c)
    target_one = {0: 1, **ir.postselect}
    probs = [StateVec.basis(c, 1 << j).run(ir, check_norm=True).probability(target_one) for j in range(c)]
    w0 = StateVec.basis(c, 0).run(ir).probability({q: 0 for q in range(c)})
    leak = 0.0
    for b in range(1 << c):
        if bin(b).count("1") >= 2:
            leak = max(leak, StateVec.basis(c, b).run(ir).probability(ir.postselect))
    return ShuffleCheck(c=c, weight1_probs=probs, weight0_prob=w0, leakage=leak)


# ============================================================================
# Tensor State Preparation
# ============================================================================

def _require_signed(t: SparseSignedTensor) -> None:
    if t.m and not np.all(np.abs(t.weights) == 1):
        raise ValueError("circuit state preparation needs a simple tensor with +/-1 entries")


def _append_state_prep(ir: CircuitIR, t: SparseSignedTensor, idx_reg, data_reg) -> None:
    s = idx_reg.size
    for q in idx_reg.qubits:
        ir.append(h(q))
    index_qubits = idx_reg.qubits
    # U_{i -> S_i}, with the sign as a phase on the first written qubit
    for i, (S, w) in enumerate(zip(t.subsets, t.weights)):
        pattern = [(i >> b) & 1 for b in range(s)]
        for v in S:
            ir.append(x(data_reg[int(v) - 1], index_qubits, pattern))
        if w < 0:
            ir.append(z(data_reg[int(S[0]) - 1], index_qubits, pattern))
    # U_{S_i -> i}
    for i, S in enumerate(t.subsets):
        ctl = [data_reg[int(v) - 1] for v in S]
        for b in range(s):
            if (i >> b) & 1:
                ir.append(x(index_qubits[b], ctl))


def state_prep_circuit(t: SparseSignedTensor, c: int = 1) -> CircuitIR:
    """
    |phi>^{(x)c} with |phi> proportional to sum_S T_S |S>, accepted when every index register is 0.

    Per copy: H on s = ceil(log2 m) index qubits, k multi-controlled X writes plus one phase
    per negative entry, and the index uncompute; fewer than 2 m s k + s gates.
    """
    _require_signed(t)
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    s = index_bits(t.m)
    ir = CircuitIR(f"state_prep_c{c}")
    for r in range(c):
        ir.add_register(f"s{r}", s)
        ir.add_register(f"A{r}", t.n)
    for r in range(c):
        _append_state_prep(ir, t, ir.reg(f"s{r}"), ir.reg(f"A{r}"))
    ir.postselect = {q: 0 for r in range(c) for q in ir.reg(f"s{r}").qubits}
    return ir


def state_prep_bound(m: int, k: int) -> int:
    s = index_bits(m)
    return 2 * m * s * k + s


@dataclass
class StatePrepCheck:
    """Container for a simulated state preparation."""
    deviation: float
    accept_prob: float
    gate_count: int
    bound: int


def state_prep_check(t: SparseSignedTensor) -> StatePrepCheck:
    """Accepted branch against sum_S T_S |S> / sqrt(2^s)."""
    ir = state_prep_circuit(t, 1)
    st = BranchState.basis(0).run(ir)
    data = ir.reg("A0").qubits
    got: Dict[int, complex] = {read(b, data): a for b, a in st.project(ir.postselect).items()}
    scale = 1 / math.sqrt(2 ** index_bits(t.m))
    expected: Dict[int, float] = {}
    for S, w in zip(t.subsets, t.weights):
        expected[sum(1 << (int(v) - 1) for v in S)] = float(w) * scale
    keys = set(got) | set(expected)
    dev = max((abs(got.get(key, 0) - expected.get(key, 0)) for key in keys), default=0.0)
    return StatePrepCheck(deviation=float(dev), accept_prob=st.probability(ir.postselect),
                          gate_count=count(ir).gate_count, bound=state_prep_bound(t.m, t.k))


# ============================================================================
# Guiding State Preparation
# ============================================================================

def guiding_prep_circuit(t: SparseSignedTensor, ell: int) -> CircuitIR:
    """
    c = ell/k parallel state preparations, then D^c_1^dagger on each variable group
    (A0[j], ..., A{c-1}[j]). Success: index registers and copies 1..c-1 all zero.
    """
    if ell % t.k:
        raise ValueError(f"ell={ell} is not a multiple of k={t.k}")
    c = ell // t.k
    ir = state_prep_circuit(t, c)
    ir.name = f"guiding_prep_c{c}"
    for j in range(t.n):
        group = [ir.reg(f"A{r}")[j] for r in range(c)]
        ir.extend(one_hot_shuffle_gates(group))
    for r in range(1, c):
        ir.postselect.update({q: 0 for q in ir.reg(f"A{r}").qubits})
    return ir


@dataclass
class GuidingPrepCheck:
    """Container for the simulated guiding preparation against the guiding module."""
    success_prob: float
    expected_prob: float
    index_acceptance: float
    beta_sq: float
    state_deviation: float
    off_weight_mass: float = 0.0

    @property
    def prob_deviation(self) -> float:
        return abs(self.success_prob - self.expected_prob)


def guiding_prep_check(t: SparseSignedTensor, ell: int) -> GuidingPrepCheck:
    """
    Simulate guiding_prep_circuit and compare with build_guiding.

    With m not a power of two the index registers accept with (m/2^s)^c on top of beta^2.
    """
    ir = guiding_prep_circuit(t, ell)
    st = BranchState.basis(0).run(ir)
    if len(st) > BRANCH_CAP:
        raise DimensionCapError(f"{len(st)} branches exceed {BRANCH_CAP}")
    accepted = st.project(ir.postselect)
    success = float(sum(abs(a) ** 2 for a in accepted.values()))

    g = build_guiding(t, ell)
    c = ell // t.k
    acceptance = (t.m / 2 ** index_bits(t.m)) ** c
    indexer = SubsetIndexer(t.n, ell)
    data = ir.reg("A0").qubits
    vec = np.zeros(indexer.size, dtype=np.complex128)
    low_weight = 0.0
    for b, a in accepted.items():
        bits = read(b, data)
        subset = [j + 1 for j in range(t.n) if (bits >> j) & 1]
        if len(subset) != ell:
            low_weight += abs(a) ** 2
            continue
        vec[indexer.rank(subset)] += a
    norm = np.linalg.norm(vec)
    dev = float(np.max(np.abs(vec / norm - g.amplitudes))) if norm > 0 else float("inf")
    return GuidingPrepCheck(success_prob=success, expected_prob=g.beta_sq * acceptance,
                            index_acceptance=acceptance, beta_sq=g.beta_sq, state_deviation=dev,
                            off_weight_mass=low_weight)

