#!/usr/bin/env python3
"""
Circuit IR and Static Counting

Named qubit registers, a flat gate list and a greedy Toffoli-depth scheduler.

Gate kinds: X, Z, H, RY (one target), GIVENS, SWAP (two targets), any of them with controls
(each control carries its own polarity) and BARRIER. Cost conventions:
- X or Z with r >= 2 controls: r - 1 Toffolis, depth weight 1
- H with one control: one controlled-H (2 T)
- RY with controls, GIVENS: rotations, synthesized at ceil(3 log2(1/eps)) T each; tallied,
  not scheduled, so depth is Toffoli/controlled-H depth
- tacu gates (temporary-AND uncompute): free, depth 0
- depth_free gates: counted, excluded from the depth schedule

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

DEFAULT_ROTATION_EPS = 1e-10
T_PER_TOFFOLI = 7
T_PER_CH = 2
SINGLE_TARGET = {"X", "Z", "H", "RY"}
TWO_TARGET = {"GIVENS", "SWAP"}
PARAMETRIC = {"RY", "GIVENS"}


def rotation_t_cost(eps: float = DEFAULT_ROTATION_EPS) -> int:
    """T gates per arbitrary single-qubit rotation at synthesis accuracy eps."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return math.ceil(3 * math.log2(1 / eps))


# ============================================================================
# Data Classes
# ============================================================================

@dataclass(frozen=True)
class Gate:
    """Container for one gate; controls are qubit indices with matching 0/1 control_values."""
    name: str
    targets: Tuple[int, ...]
    controls: Tuple[int, ...] = ()
    control_values: Tuple[int, ...] = ()
    param: Optional[float] = None
    tacu: bool = False
    depth_free: bool = False

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.controls + self.targets

    @property
    def label(self) -> str:
        r = len(self.controls)
        if self.name == "X":
            return {0: "X", 1: "CX", 2: "CCX"}.get(r, f"MCX{r}")
        if self.name == "Z":
            return {0: "Z", 1: "CZ"}.get(r, f"MCZ{r}")
        if self.name in ("H", "RY", "SWAP") and r:
            return "C" * r + self.name if r <= 2 else f"MC{self.name}{r}"
        return self.name

    @property
    def toffoli_cost(self) -> int:
        if self.tacu or self.name == "BARRIER":
            return 0
        r = len(self.controls)
        if self.name in ("X", "Z"):
            return max(r - 1, 0)
        if self.name == "SWAP":
            return r
        return max(r - 1, 0)

    @property
    def ch_cost(self) -> int:
        return 1 if self.name == "H" and self.controls and not self.tacu else 0

    @property
    def rotation_cost(self) -> int:
        if self.tacu:
            return 0
        if self.name == "GIVENS":
            return 2
        if self.name == "RY":
            return 2 if self.controls else 1
        return 0

    @property
    def depth_weight(self) -> int:
        if self.tacu or self.depth_free or self.name == "BARRIER":
            return 0
        return 1 if (self.toffoli_cost or self.ch_cost) else 0

    def inverse(self) -> "Gate":
        if self.name in PARAMETRIC:
            return replace(self, param=-self.param)
        return self


@dataclass(frozen=True)
class Register:
    """Container for a named, contiguous block of qubits."""
    name: str
    start: int
    size: int

    @property
    def qubits(self) -> List[int]:
        return list(range(self.start, self.start + self.size))

    def __getitem__(self, i: int) -> int:
        if not -self.size <= i < self.size:
            raise IndexError(f"register {self.name} has {self.size} qubits, asked for {i}")
        return self.start + (i % self.size)

    def __len__(self) -> int:
        return self.size


@dataclass
class CountReport:
    """Container for static resource counts of a circuit."""
    toffoli_count: int
    ch_count: int
    rotation_count: int
    non_clifford_count: int
    t_count: int
    depth: int
    qubit_count: int
    gate_count: int
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


# ============================================================================
# Circuit
# ============================================================================

class CircuitIR:
    """Ordered gate list over named registers, with an optional postselection pattern."""

    def __init__(self, name: str = "circuit"):
        self.name = name
        self.registers: Dict[str, Register] = {}
        self.gates: List[Gate] = []
        self.postselect: Dict[int, int] = {}
        self.num_qubits = 0

    def __repr__(self) -> str:
        return f"CircuitIR({self.name!r}, qubits={self.num_qubits}, gates={len(self.gates)})"

    def __len__(self) -> int:
        return len(self.gates)

    def add_register(self, name: str, size: int) -> Register:
        if name in self.registers:
            raise ValueError(f"register {name!r} already exists")
        if size < 0:
            raise ValueError(f"register size must be nonnegative, got {size}")
        reg = Register(name, self.num_qubits, size)
        self.registers[name] = reg
        self.num_qubits += size
        return reg

    def reg(self, name: str) -> Register:
        return self.registers[name]

    # ------------------------------------------------------------------------
    # Appending
    # ------------------------------------------------------------------------

    def _validate(self, g: Gate) -> None:
        if g.name == "BARRIER":
            return
        if g.name in SINGLE_TARGET and len(g.targets) != 1:
            raise ValueError(f"{g.name} takes one target, got {g.targets}")
        if g.name in TWO_TARGET and len(g.targets) != 2:
            raise ValueError(f"{g.name} takes two targets, got {g.targets}")
        if g.name not in SINGLE_TARGET | TWO_TARGET:
            raise ValueError(f"unknown gate {g.name!r}")
        if len(g.control_values) != len(g.controls):
            raise ValueError(f"{g.label}: {len(g.controls)} controls but {len(g.control_values)} values")
        if any(v not in (0, 1) for v in g.control_values):
            raise ValueError(f"{g.label}: control values must be 0 or 1")
        qs = g.qubits
        if len(set(qs)) != len(qs):
            raise ValueError(f"{g.label}: repeated qubit in {qs}")
        if any(q < 0 or q >= self.num_qubits for q in qs):
            raise ValueError(f"{g.label}: qubit out of range in {qs} (have {self.num_qubits})")
        if g.name in PARAMETRIC and g.param is None:
            raise ValueError(f"{g.name} needs an angle")

    def append(self, g: Gate) -> "CircuitIR":
        self._validate(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "CircuitIR":
        for g in gates:
            self.append(g)
        return self

    def barrier(self) -> "CircuitIR":
        self.gates.append(Gate("BARRIER", ()))
        return self

    def compose(self, other: "CircuitIR") -> "CircuitIR":
        """Append another circuit built over the same register layout."""
        if other.num_qubits > self.num_qubits:
            raise ValueError(f"cannot compose {other.num_qubits} qubits into {self.num_qubits}")
        return self.extend(other.gates)

    def inverse(self) -> "CircuitIR":
        inv = CircuitIR(f"{self.name}_dag")
        inv.registers = dict(self.registers)
        inv.num_qubits = self.num_qubits
        inv.gates = [g.inverse() for g in reversed(self.gates)]
        return inv

    # ------------------------------------------------------------------------
    # Text format
    # ------------------------------------------------------------------------

    def to_text(self) -> str:
        """One gate per line: LABEL controls targets [angle] [flags]; '!' marks a 0-control."""
        lines = [f"# circuit {self.name} {self.num_qubits}"]
        lines += [f"# register {r.name} {r.start} {r.size}" for r in self.registers.values()]
        lines += [f"# postselect {q} {v}" for q, v in sorted(self.postselect.items())]
        for g in self.gates:
            if g.name == "BARRIER":
                lines.append("BARRIER")
                continue
            ctl = [("" if v else "!") + str(c) for c, v in zip(g.controls, g.control_values)]
            parts = [g.name, f"c={','.join(ctl)}" if ctl else "c=", " ".join(map(str, g.targets))]
            if g.param is not None:
                parts.append(repr(float(g.param)))
            if g.tacu:
                parts.append("tacu")
            if g.depth_free:
                parts.append("free")
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitIR":
        ir = cls()
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "#":
                if tok[1] == "circuit":
                    ir.name = tok[2]
                    ir.num_qubits = max(ir.num_qubits, int(tok[3]))
                elif tok[1] == "register":
                    reg = Register(tok[2], int(tok[3]), int(tok[4]))
                    ir.registers[reg.name] = reg
                    ir.num_qubits = max(ir.num_qubits, reg.start + reg.size)
                elif tok[1] == "postselect":
                    ir.postselect[int(tok[2])] = int(tok[3])
                continue
            if tok[0] == "BARRIER":
                ir.gates.append(Gate("BARRIER", ()))
                continue
            name, ctl_tok, rest = tok[0], tok[1], tok[2:]
            controls, values = [], []
            for c in filter(None, ctl_tok[2:].split(",")):
                values.append(0 if c.startswith("!") else 1)
                controls.append(int(c.lstrip("!")))
            n_targets = 2 if name in TWO_TARGET else 1
            targets = tuple(int(x) for x in rest[:n_targets])
            extra = rest[n_targets:]
            param = float(extra.pop(0)) if name in PARAMETRIC else None
            ir.append(Gate(name, targets, tuple(controls), tuple(values), param,
                           tacu="tacu" in extra, depth_free="free" in extra))
        return ir

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.write_text(self.to_text())
        return path

    @classmethod
    def load(cls, path: Path) -> "CircuitIR":
        return cls.from_text(Path(path).read_text())


# ============================================================================
# Gate Helpers
# ============================================================================

def _ctl(controls: Sequence[int], values: Optional[Sequence[int]]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    controls = tuple(int(c) for c in controls)
    values = tuple(int(v) for v in values) if values is not None else (1,) * len(controls)
    return controls, values


def x(target: int, controls: Sequence[int] = (), values: Optional[Sequence[int]] = None, **flags) -> Gate:
    c, v = _ctl(controls, values)
    return Gate("X", (int(target),), c, v, **flags)


def z(target: int, controls: Sequence[int] = (), values: Optional[Sequence[int]] = None, **flags) -> Gate:
    c, v = _ctl(controls, values)
    return Gate("Z", (int(target),), c, v, **flags)


def h(target: int, controls: Sequence[int] = (), values: Optional[Sequence[int]] = None, **flags) -> Gate:
    c, v = _ctl(controls, values)
    return Gate("H", (int(target),), c, v, **flags)


def ry(target: int, theta: float, controls: Sequence[int] = (), values: Optional[Sequence[int]] = None,
       **flags) -> Gate:
    c, v = _ctl(controls, values)
    return Gate("RY", (int(target),), c, v, param=float(theta), **flags)


def givens(i: int, j: int, theta: float) -> Gate:
    """|1_i 0_j> -> cos(theta)|1_i 0_j> + sin(theta)|0_i 1_j>."""
    return Gate("GIVENS", (int(i), int(j)), param=float(theta))


def swap(i: int, j: int, controls: Sequence[int] = ()) -> Gate:
    c, v = _ctl(controls, None)
    return Gate("SWAP", (int(i), int(j)), c, v)


def cx_many(sources: Sequence[int], targets: Sequence[int]) -> List[Gate]:
    return [x(t, [s]) for s, t in zip(sources, targets)]


def uncompute(gates: Sequence[Gate], **flags) -> List[Gate]:
    """Reversed inverse of a gate sequence, with flags applied to every gate."""
    return [replace(g.inverse(), **flags) for g in reversed(gates)]


# ============================================================================
# Counting
# ============================================================================

def schedule_depth(gates: Sequence[Gate], num_qubits: int) -> int:
    """
    Non-Clifford depth under greedy qubit-disjoint layering.

    A gate starts when all its qubits are free and occupies them for depth_weight layers.
    Barriers synchronize every qubit; depth_free gates are skipped.
    """
    ready = [0] * max(num_qubits, 1)
    for g in gates:
        if g.name == "BARRIER":
            top = max(ready)
            ready = [top] * len(ready)
            continue
        if g.depth_free:
            continue
        start = max(ready[q] for q in g.qubits)
        end = start + g.depth_weight
        for q in g.qubits:
            ready[q] = end
    return max(ready)


def count(ir: CircuitIR, eps: float = DEFAULT_ROTATION_EPS) -> CountReport:
    """Static counts summed over the gate list plus the scheduled depth."""
    gates = [g for g in ir.gates if g.name != "BARRIER"]
    toffoli = sum(g.toffoli_cost for g in gates)
    ch = sum(g.ch_cost for g in gates)
    rot = sum(g.rotation_cost for g in gates)
    primitive = sum(max(g.toffoli_cost, 1) for g in gates if not g.tacu)
    report = CountReport(
        toffoli_count=toffoli,
        ch_count=ch,
        rotation_count=rot,
        non_clifford_count=toffoli + T_PER_CH * ch,
        t_count=T_PER_TOFFOLI * toffoli + T_PER_CH * ch + rot * rotation_t_cost(eps),
        depth=schedule_depth(ir.gates, ir.num_qubits),
        qubit_count=ir.num_qubits,
        gate_count=primitive,
    )
    logger.debug(f"count({ir.name}): toffoli={toffoli}, ch={ch}, rot={rot}, depth={report.depth}")
    return report
