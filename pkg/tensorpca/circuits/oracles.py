#!/usr/bin/env python3
"""
Sparse-Access Oracles for the Kikuchi Matrix

Registers (all little-endian):
    A (n)  current subset U             E (n)  neighbor / scratch subset
    B (b)  neighbor index j < 2^b       C (1)  entry rotation qubit
    D (w)  running count of valid clauses
    f, g, h single flags, plus temporaries for the weight check and the AND tree

Per clause S the pattern check P_S sets f = [|U ∩ S| = k/2] and bumps D, U_1 selects the
j-th valid clause (and rotates C by its weight), U_2 recovers j from a known neighbor. Four
sweeps over the clause list (forward, reverse, forward, reverse) with a SWAP between the
second and third give the block encoding

    <0, V| O_H |0, U> = T_S / (2^b * max|T|)   for V = U Δ S, |U ∩ S| = k/2,

with every register other than A postselected on zero.

Usage:
    from tensorpca.circuits.oracles import oracle_circuits, block_encoding_check
    oc = oracle_circuits(tensor, ell=4)
    check = block_encoding_check(tensor, ell=4)

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..combinatorics import SubsetIndexer
from ..errors import DimensionCapError
from ..kikuchi import build
from ..model import SparseSignedTensor
from .ir import CircuitIR, CountReport, Gate, count, cx_many, h, ry, swap, x
from .simulator import BranchState, read

logger = logging.getLogger(__name__)

SEARCH_NODE_CAP = 200_000
ORACLE_DIM_CAP = 5000


# ============================================================================
# Weight Check Design
# ============================================================================

@dataclass(frozen=True)
class CheckTerm:
    """One AND term of the weight check: (position, required bit) literals."""
    pattern: Tuple[int, ...]
    literals: Tuple[Tuple[int, int], ...]


def _term(pattern: Tuple[int, ...], k: int, drop: Optional[int]) -> CheckTerm:
    lits = tuple((p, int(p in pattern)) for p in range(k) if p != drop)
    return CheckTerm(pattern, lits)


@lru_cache(maxsize=None)
def pattern_check_design(k: int) -> Tuple[CheckTerm, ...]:
    """
    XOR of AND terms equal to [popcount(a) = k/2] on k input bits.

    Each weight-k/2 pattern gets a term that ignores one position (or none). Ignoring
    position d also fires on pattern ^ (1 << d), so drops are chosen by backtracking until
    every such spurious input is hit an even number of times. Falls back to full terms
    when the search exceeds SEARCH_NODE_CAP.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be even and >= 2, got {k}")
    half = k // 2
    patterns = [tuple(p) for p in combinations(range(k), half)]
    masks = [sum(1 << i for i in p) for p in patterns]

    last_producer: Dict[int, int] = {}
    for i, mask in enumerate(masks):
        for d in range(k):
            last_producer[mask ^ (1 << d)] = i
    closing: Dict[int, List[int]] = {}
    for err, i in last_producer.items():
        closing.setdefault(i, []).append(err)

    counts: Dict[int, int] = {}
    choice: List[Optional[int]] = [None] * len(patterns)
    nodes = 0

    def search(i: int) -> bool:
        nonlocal nodes
        if i == len(patterns):
            return True
        for d in list(range(k)) + [None]:
            nodes += 1
            if nodes > SEARCH_NODE_CAP:
                return False
            err = masks[i] ^ (1 << d) if d is not None else None
            if err is not None:
                counts[err] = counts.get(err, 0) + 1
            if all(counts.get(e, 0) % 2 == 0 for e in closing.get(i, [])):
                choice[i] = d
                if search(i + 1):
                    return True
            if err is not None:
                counts[err] -= 1
            if nodes > SEARCH_NODE_CAP:
                return False
        return False

    if not search(0):
        logger.warning(f"weight-check search for k={k} hit the node cap; using full-literal terms")
        choice = [None] * len(patterns)
    return tuple(_term(p, k, d) for p, d in zip(patterns, choice))


def evaluate_design(design: Sequence[CheckTerm], bits: Sequence[int]) -> int:
    out = 0
    for term in design:
        out ^= int(all(bits[p] == v for p, v in term.literals))
    return out


def fan_sizes(design: Sequence[CheckTerm]) -> Tuple[int, int]:
    """(temporaries, literal copies) the weight check needs."""
    temps = sum(1 for t in design if len(t.literals) >= 3)
    copies = sum(len(t.literals) - 1 for t in design if len(t.literals) >= 3)
    return temps, copies


# ============================================================================
# Gate Builders
# ============================================================================

def weight_check_gates(clause: Sequence[int], flag: int, temps: Sequence[int], copies: Sequence[int],
                       design: Sequence[CheckTerm]) -> List[Gate]:
    """
    f ^= [|U ∩ S| = k/2] for the clause qubits of A.

    Literal copies feed one AND per term in parallel; the terms then XOR into f one after
    another against the last literal, read from A. Temporaries are released by TACU and the
    copies are undone, so the sequence is its own inverse.
    """
    fan_out: List[Gate] = []
    stage1: List[Gate] = []
    stage2: List[Gate] = []
    ci = ti = 0
    for term in design:
        lits = term.literals
        if len(lits) <= 2:
            stage2.append(x(flag, [clause[p] for p, _ in lits], [v for _, v in lits]))
            continue
        head, (last_pos, last_val) = lits[:-1], lits[-1]
        srcs = []
        for p, v in head:
            fan_out.append(x(copies[ci], [clause[p]]))
            srcs.append((copies[ci], v))
            ci += 1
        tmp = temps[ti]
        ti += 1
        stage1.append(x(tmp, [q for q, _ in srcs], [v for _, v in srcs]))
        stage2.append(x(flag, [tmp, clause[last_pos]], [1, last_val]))
    release = [replace(g, tacu=True) for g in reversed(stage1)]
    return fan_out + stage1 + stage2 + release + fan_out[::-1]


def increment_gates(control: int, counter: Sequence[int]) -> List[Gate]:
    """counter += control, ripple from the top bit down."""
    return [x(counter[j], [control] + list(counter[:j])) for j in reversed(range(len(counter)))]


def decrement_gates(control: int, counter: Sequence[int]) -> List[Gate]:
    return [g.inverse() for g in reversed(increment_gates(control, counter))]


def u1_gates(flag: int, D: Sequence[int], B: Sequence[int], g: int, e_clause: Sequence[int],
             c: Optional[int] = None, theta: Optional[float] = None) -> List[Gate]:
    """Select the clause when f = 1 and D == B: flip it into E, rotate C by its entry."""
    xor = cx_many(B, D[:len(B)])
    compare = x(g, list(D) + [flag], [0] * len(D) + [1])
    body = [x(e, [g]) for e in e_clause]
    if c is not None and theta is not None:
        body.append(ry(c, theta, [g]))
    return xor + [compare] + body + [replace(compare, tacu=True)] + xor


def and_tree_gates(inputs: Sequence[int], out: int, temps: Sequence[int]) -> List[Gate]:
    """out ^= AND(inputs) through a balanced tree of Toffolis on len(inputs) - 2 temporaries."""
    level = list(inputs)
    if len(level) == 1:
        return [x(out, level)]
    gates: List[Gate] = []
    ti = 0
    while len(level) > 2:
        nxt = []
        for a, b in zip(level[0::2], level[1::2]):
            gates.append(x(temps[ti], [a, b]))
            nxt.append(temps[ti])
            ti += 1
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    gates.append(x(out, level))
    return gates


def u2_gates(A: Sequence[int], E: Sequence[int], clause_pos: Sequence[int], D: Sequence[int],
             B: Sequence[int], tree: Sequence[int], h_flag: int, h_copies: Sequence[int]) -> List[Gate]:
    """B ^= D when U Δ V is exactly this clause; an involution."""
    if not B:
        return []
    copy = cx_many(A, E)
    tree_gates = and_tree_gates([E[p] for p in clause_pos], h_flag, tree)
    fan = [x(q, [h_flag]) for q in h_copies]
    ctl = [h_flag] + list(h_copies)
    write = [x(B[j], [ctl[j], D[j]]) for j in range(len(B))]
    release = [replace(g, tacu=True) for g in reversed(tree_gates)]
    return copy + tree_gates + fan + write + fan[::-1] + release + copy


# ============================================================================
# Layout
# ============================================================================

@dataclass
class OracleLayout:
    """Container for the register map shared by the oracle circuits."""
    n: int
    k: int
    b: int
    w: int
    ir: CircuitIR
    design: Tuple[CheckTerm, ...]

    def q(self, name: str) -> List[int]:
        return self.ir.reg(name).qubits

    def fan(self, clause_pos: Sequence[int]) -> List[Gate]:
        A = self.q("A")
        return weight_check_gates([A[p] for p in clause_pos], self.q("f")[0], self.q("fan_t"),
                                  self.q("fan_c"), self.design)

    def unfan(self, clause_pos: Sequence[int]) -> List[Gate]:
        return [replace(g, depth_free=True) for g in self.fan(clause_pos)]

    def inc(self) -> List[Gate]:
        return increment_gates(self.q("f")[0], self.q("D"))

    def dec(self) -> List[Gate]:
        return decrement_gates(self.q("f")[0], self.q("D"))

    def u1(self, clause_pos: Sequence[int], theta: Optional[float]) -> List[Gate]:
        E = self.q("E")
        return u1_gates(self.q("f")[0], self.q("D"), self.q("B"), self.q("g")[0],
                        [E[p] for p in clause_pos], self.q("C")[0], theta)

    def u2(self, clause_pos: Sequence[int]) -> List[Gate]:
        return u2_gates(self.q("A"), self.q("E"), clause_pos, self.q("D"), self.q("B"),
                        self.q("tree"), self.q("h")[0], self.q("hc"))


def make_layout(name: str, n: int, k: int, b: int, w: int) -> OracleLayout:
    if b > w:
        raise ValueError(f"index width b={b} exceeds counter width w={w}")
    design = pattern_check_design(k)
    temps, copies = fan_sizes(design)
    ir = CircuitIR(name)
    for reg, size in [("A", n), ("E", n), ("B", b), ("C", 1), ("D", w), ("f", 1), ("g", 1),
                      ("h", 1), ("fan_t", temps), ("fan_c", copies), ("tree", max(k - 2, 0)),
                      ("hc", max(b - 1, 0))]:
        ir.add_register(reg, size)
    return OracleLayout(n=n, k=k, b=b, w=w, ir=ir, design=design)


# ============================================================================
# Gadget Counts
# ============================================================================

def p_gadget(k: int = 4, w: int = 7) -> CountReport:
    """P_S alone: weight check, controlled increment, weight check again."""
    L = make_layout(f"p_gadget_k{k}_w{w}", k, k, 0, w)
    clause = list(range(k))
    L.ir.extend(L.fan(clause) + L.inc() + L.unfan(clause))
    return count(L.ir)


def _term_components(L: OracleLayout, clause: Sequence[int], block: int) -> List[List[Gate]]:
    if block == 1:
        return [L.fan(clause), L.u1(clause, 0.5), L.inc(), L.unfan(clause)]
    if block == 2:
        return [L.fan(clause), L.dec(), L.unfan(clause), L.u2(clause)]
    if block == 3:
        return [L.u2(clause), L.fan(clause), L.inc(), L.unfan(clause)]
    return [L.fan(clause), L.dec(), L.u1(clause, None), L.unfan(clause)]


def per_term_circuit(k: int = 4, w: int = 7, b: int = 5) -> Tuple[CircuitIR, CountReport]:
    """
    The O_H work spent on one clause (one term from each of the four sweeps), with barriers
    between components. k = 4, w = 7, b = 5 gives 210 Toffolis at depth 60.
    """
    L = make_layout(f"per_term_k{k}", k, k, b, w)
    clause = list(range(k))
    for block in (1, 2, 3, 4):
        for comp in _term_components(L, clause, block):
            L.ir.extend(comp)
            L.ir.barrier()
    report = count(L.ir)
    if k != 4:
        report.notes.append(f"AND tree over {k} clause bits has depth {math.ceil(math.log2(k))}")
    return L.ir, report


# ============================================================================
# Oracles
# ============================================================================

@dataclass
class OracleCircuits:
    """Container for O_E, O_A and the block encoding O_H over one layout."""
    O_E: CircuitIR
    O_A: CircuitIR
    O_H: CircuitIR
    b: int
    w: int
    d_max: int
    scale: float
    clauses: List[List[int]] = field(default_factory=list)

    @property
    def subnormalization(self) -> float:
        return (2 ** self.b) * self.scale


def _thetas(t: SparseSignedTensor, scale: float) -> List[float]:
    return [-2.0 * math.asin(float(w) / scale) for w in t.weights]


def oracle_circuits(t: SparseSignedTensor, ell: int) -> OracleCircuits:
    """O_E, O_A and O_H for the Kikuchi matrix of t at level ell."""
    if not t.k // 2 <= ell <= t.n:
        raise ValueError(f"need k/2 <= ell <= n, got ell={ell}, n={t.n}, k={t.k}")
    d_max = build(t, ell, mode="auto", restrict=False).d_max if t.m else 0
    b = math.ceil(math.log2(d_max)) if d_max > 1 else 0
    w = max(1, d_max.bit_length())
    scale = float(np.abs(t.weights).max()) if t.m else 1.0
    clauses = [[int(v) - 1 for v in S] for S in t.subsets]
    thetas = _thetas(t, scale)

    def fresh(name: str) -> OracleLayout:
        return make_layout(name, t.n, t.k, b, w)

    def block1(L: OracleLayout, rotate: bool) -> List[Gate]:
        gates: List[Gate] = []
        for S, th in zip(clauses, thetas):
            gates += L.fan(S) + L.u1(S, th if rotate else None) + L.inc() + L.unfan(S)
        return gates

    def block2(L: OracleLayout) -> List[Gate]:
        gates: List[Gate] = []
        for S in reversed(clauses):
            gates += L.fan(S) + L.dec() + L.unfan(S) + L.u2(S)
        return gates

    def block3(L: OracleLayout) -> List[Gate]:
        gates: List[Gate] = []
        for S in clauses:
            gates += L.u2(S) + L.fan(S) + L.inc() + L.unfan(S)
        return gates

    def block4(L: OracleLayout) -> List[Gate]:
        gates: List[Gate] = []
        for S in reversed(clauses):
            gates += L.fan(S) + L.dec() + L.u1(S, None) + L.unfan(S)
        return gates

    LE = fresh("O_E")
    LE.ir.append(x(LE.q("C")[0]))
    LE.ir.extend(cx_many(LE.q("A"), LE.q("E")))
    LE.ir.extend(block1(LE, rotate=True))

    LA = fresh("O_A")
    LA.ir.extend(cx_many(LA.q("A"), LA.q("E")))
    LA.ir.extend(block1(LA, rotate=False))
    LA.ir.extend(block2(LA))

    LH = fresh("O_H")
    ir = LH.ir
    ir.append(x(LH.q("C")[0]))
    ir.extend(h(q) for q in LH.q("B"))
    ir.extend(cx_many(LH.q("A"), LH.q("E")))
    ir.extend(block1(LH, rotate=True))
    ir.extend(block2(LH))
    ir.extend(swap(a, e) for a, e in zip(LH.q("A"), LH.q("E")))
    ir.extend(block3(LH))
    ir.extend(block4(LH))
    ir.extend(cx_many(LH.q("A"), LH.q("E")))
    ir.extend(h(q) for q in LH.q("B"))
    A = set(LH.q("A"))
    ir.postselect = {q: 0 for q in range(ir.num_qubits) if q not in A}

    logger.info(f"Oracles for n={t.n}, k={t.k}, ell={ell}: d_max={d_max}, b={b}, w={w}, "
                f"{ir.num_qubits} qubits, {len(ir)} gates in O_H")
    return OracleCircuits(O_E=LE.ir, O_A=LA.ir, O_H=ir, b=b, w=w, d_max=d_max, scale=scale,
                          clauses=clauses)


# ============================================================================
# Simulated Checks
# ============================================================================

def _subset_mask(U: Sequence[int]) -> int:
    return sum(1 << (int(v) - 1) for v in U)


def _valid_clauses(t: SparseSignedTensor, U: Sequence[int]) -> List[int]:
    Us = set(int(v) for v in U)
    half = t.k // 2
    return [i for i, S in enumerate(t.subsets) if len(Us.intersection(int(v) for v in S)) == half]


def _oracle_space(t: SparseSignedTensor, ell: int) -> SubsetIndexer:
    idx = SubsetIndexer(t.n, ell)
    if idx.size > ORACLE_DIM_CAP:
        raise DimensionCapError(f"C({t.n},{ell}) = {idx.size} exceeds the oracle check cap {ORACLE_DIM_CAP}")
    return idx


def _load(ir: CircuitIR, assignment: Dict[str, int]) -> int:
    basis = 0
    for name, value in assignment.items():
        for i, q in enumerate(ir.reg(name).qubits):
            basis |= ((value >> i) & 1) << q
    return basis


@dataclass
class OracleCheck:
    """Container for an exhaustive basis-input check of O_A or O_E."""
    cases: int
    mismatches: int
    max_deviation: float = 0.0

    @property
    def passed(self) -> bool:
        return self.mismatches == 0


def oracle_a_check(t: SparseSignedTensor, ell: int, oc: Optional[OracleCircuits] = None) -> OracleCheck:
    """O_A |U, j, 0> = |U, 0, V(j, U)> for every U and every j < sigma(U)."""
    oc = oc or oracle_circuits(t, ell)
    ir = oc.O_A
    idx = _oracle_space(t, ell)
    cases = bad = 0
    for U in idx.all_subsets():
        u_mask = _subset_mask(U)
        for j, ci in enumerate(_valid_clauses(t, U)):
            cases += 1
            st = BranchState.basis(_load(ir, {"A": u_mask, "B": j})).run(ir)
            want = _load(ir, {"A": u_mask, "E": u_mask ^ _subset_mask(t.subsets[ci])})
            if len(st) != 1 or abs(st.amplitudes.get(want, 0) - 1) > 1e-9:
                bad += 1
    logger.info(f"O_A check: {cases} cases, {bad} mismatches")
    return OracleCheck(cases=cases, mismatches=bad)


def oracle_e_check(t: SparseSignedTensor, ell: int, oc: Optional[OracleCircuits] = None) -> OracleCheck:
    """The C = 0 amplitude after O_E on |U, j> equals T_S / max|T| for the j-th valid clause."""
    oc = oc or oracle_circuits(t, ell)
    ir = oc.O_E
    idx = _oracle_space(t, ell)
    C = ir.reg("C")[0]
    cases = bad = 0
    worst = 0.0
    for U in idx.all_subsets():
        u_mask = _subset_mask(U)
        for j, ci in enumerate(_valid_clauses(t, U)):
            cases += 1
            st = BranchState.basis(_load(ir, {"A": u_mask, "B": j})).run(ir)
            amp = sum(a for _, a in st.project({C: 0}).items())
            dev = abs(amp - float(t.weights[ci]) / oc.scale)
            worst = max(worst, dev)
            bad += int(dev > 1e-9)
    logger.info(f"O_E check: {cases} cases, max deviation {worst:.2e}")
    return OracleCheck(cases=cases, mismatches=bad, max_deviation=worst)


@dataclass
class BlockEncodingCheck:
    """Container for the simulated O_H against the explicit Kikuchi matrix."""
    max_deviation: float
    max_imag: float
    b: int
    d_max: int
    scale: float
    dim: int
    qubits: int
    leaked_mass: float = 0.0

    @property
    def subnormalization(self) -> float:
        return (2 ** self.b) * self.scale


def block_encoding_check(t: SparseSignedTensor, ell: int) -> BlockEncodingCheck:
    """
    Postselected O_H columns against K / (2^b max|T|), one basis input per U.

    leaked_mass counts accepted amplitude landing outside weight-ell subsets (should be 0).
    """
    idx = _oracle_space(t, ell)
    oc = oracle_circuits(t, ell)
    if t.m:
        K = build(t, ell, mode="explicit", restrict=False).dense(cap=ORACLE_DIM_CAP)
    else:
        K = np.zeros((idx.size, idx.size))
    ir = oc.O_H
    A = ir.reg("A").qubits
    norm = oc.subnormalization
    worst = imag = leaked = 0.0
    for u_rank, U in enumerate(idx.all_subsets()):
        st = BranchState.basis(_load(ir, {"A": _subset_mask(U)})).run(ir)
        col = np.zeros(idx.size, dtype=np.complex128)
        for basis, amp in st.project(ir.postselect).items():
            v_mask = read(basis, A)
            V = [i + 1 for i in range(t.n) if (v_mask >> i) & 1]
            if len(V) != ell:
                leaked += abs(amp) ** 2
                continue
            col[idx.rank(V)] += amp
        worst = max(worst, float(np.max(np.abs(col - K[:, u_rank] / norm))))
        imag = max(imag, float(np.max(np.abs(col.imag))))
    logger.info(f"Block encoding check: dim={idx.size}, max deviation {worst:.2e}, alpha={norm:g}")
    return BlockEncodingCheck(max_deviation=worst, max_imag=imag, b=oc.b, d_max=oc.d_max,
                              scale=oc.scale, dim=idx.size, qubits=ir.num_qubits, leaked_mass=leaked)
