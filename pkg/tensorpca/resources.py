#!/usr/bin/env python3
"""
Quantum Resource Estimation

Closed-form logical resource counts for the detection pipeline (guiding-state preparation,
phase estimation on the block-encoded Kikuchi matrix, fixed-point amplitude amplification),
the classical power-method FLOPs baseline and clause scheduling by greedy coloring.

Counting inputs per row (natural log in m = 10 n^2 ln n):
    s = ceil(log2 m), c = ell/k, q = QSP length, b / b' = per-clause O_H cost / depth
    qubits       c n + ceil(n/4) (s + 1)
    gates state  2 c^{ell/2} [c m (k + s) + 10 m + 2 c (n-1)] + n log2(1/eps)
    gates PE     q [4 m b + 7 n - 2 + 3 log2(1/eps)]
    depth state  2 c^{ell/2} [4 (m/n)(log2 k + log2 s) + 24 n + 2 log2(c (n-1))] + log2(1/eps)
    depth PE     q [4 (m/n) b' + 3 log2(n-1) + 2 + 3 log2(1/eps)]

Usage:
    from tensorpca.resources import estimate, emit_table1
    report = estimate(EstimatorConfig(n=100))
    table = emit_table1([60, 80, 100, 120])

Author: Aditya Aman
Created: 2026-01-07
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd

from .combinatorics import kikuchi_stats
from .config import EstimatorConfig, FlopsModel
from .guiding import amp_amp_reps
from .model import ProblemParams, SparseSignedTensor, sample_random, table_m
from .spectral import thresholds

logger = logging.getLogger(__name__)

CALIBRATION_N = 100
GRAPH_EDGE_CAP = 2_000_000
COLORING_SLACK = 1.2

# Reference rows: n -> (qubits, L, depth PE e9, depth state e9, gates PE e12, gates state e12,
#                       total depth e12, total gates e15, classical FLOPs e20)
REFERENCE_ESTIMATES: Dict[int, tuple] = {
    60: (525, 31, 1.53, 9.01, 0.07, 1.70, 0.33, 0.05, 0.51),
    80: (720, 89, 2.19, 12.9, 0.14, 3.38, 1.33, 0.31, 115.0),
    100: (900, 201, 2.88, 16.9, 0.23, 5.55, 3.97, 1.16, 6611.0),
    120: (1110, 393, 3.58, 21.1, 0.35, 8.67, 9.70, 3.54, 1.6e5),
}
TABLE1_COLUMNS = [
    "n", "Logical Qubits", "Amp. amp. Repetitions", "Depth PE x10^9", "Depth State x10^9",
    "Gates PE x10^12", "Gates State x10^12", "Total Depth x10^12", "Total Gates x10^15",
    "Classical FLOPs x10^20",
]
TABLE1_SCALES = [1, 1, 1, 1e9, 1e9, 1e12, 1e12, 1e12, 1e15, 1e20]


# ============================================================================
# Data Classes
# ============================================================================

@dataclass
class FlopsEstimate:
    """Container for the classical baseline: iters x 4E."""
    flops: float
    edges: float
    iters: float
    model: str

    def __float__(self) -> float:
        return self.flops


@dataclass
class ResourceReport:
    """Container for one estimator row and every intermediate quantity behind it."""
    n: int
    k: int
    ell: int
    m: float
    c: int
    s: int
    logical_qubits: int
    L: int
    gates_state: float
    gates_pe: float
    depth_state: float
    depth_pe: float
    depth_pe_formula: float
    depth_pe_scale: float
    total_gates: float
    total_depth: float
    classical_flops: float
    flops_edges: float
    flops_iters: float
    d: float
    d_max_bound: float
    b_sparsity: int
    alpha: float
    lambda_star: float
    random_bound: float
    gap: float
    q_qsp: int
    q_formula: Optional[int]
    flags: List[str] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)

    def to_markdown(self) -> str:
        rows = [
            ("Logical qubits", f"{self.logical_qubits}"),
            ("Amp. amp. repetitions L", f"{self.L}"),
            ("Gates state", f"{self.gates_state:.3e}"),
            ("Gates PE", f"{self.gates_pe:.3e}"),
            ("Depth state", f"{self.depth_state:.3e}"),
            ("Depth PE (calibrated)", f"{self.depth_pe:.3e}"),
            ("Depth PE (formula)", f"{self.depth_pe_formula:.3e}"),
            ("Total gates", f"{self.total_gates:.3e}"),
            ("Total depth", f"{self.total_depth:.3e}"),
            ("Classical FLOPs", f"{self.classical_flops:.3e}"),
            ("s / b / q", f"{self.s} / {self.b_sparsity} / {self.q_qsp}"),
        ]
        lines = [f"### Resources at n={self.n}, k={self.k}, ell={self.ell}, m={self.m:.0f}", "",
                 "| Quantity | Value |", "|---|---|"]
        lines += [f"| {a} | {b} |" for a, b in rows]
        if self.flags:
            lines += ["", *[f"- {f}" for f in self.flags]]
        return "\n".join(lines) + "\n"


@dataclass
class Calibration:
    """Container for the constants fitted at the n=100 reference row."""
    L_prefactor_range: tuple
    qsp_prefactor: float
    depth_pe_scale: float
    flops_iters: float


# ============================================================================
# Component Formulas
# ============================================================================

def index_width(m: float) -> int:
    return max(1, math.ceil(math.log2(m)))


def logical_qubits(n: int, k: int, ell: int, m: float) -> int:
    c = ell // k
    return c * n + math.ceil(n / 4) * (index_width(m) + 1)


def gates_state(n: int, k: int, ell: int, m: float, eps: float) -> float:
    c, s = ell // k, index_width(m)
    inner = c * m * (k + s) + 10 * m + 2 * c * (n - 1)
    return 2 * c ** (ell / 2) * inner + n * math.log2(1 / eps)


def depth_state(n: int, k: int, ell: int, m: float, eps: float) -> float:
    c, s = ell // k, index_width(m)
    inner = 4 * (m / n) * (math.log2(k) + math.log2(s)) + 24 * n + 2 * math.log2(c * (n - 1))
    return 2 * c ** (ell / 2) * inner + math.log2(1 / eps)


def gates_pe(n: int, m: float, q: int, b: int, eps: float) -> float:
    return q * (4 * m * b + 7 * n - 2 + 3 * math.log2(1 / eps))


def depth_pe(n: int, m: float, q: int, b_depth: int, eps: float) -> float:
    return q * (4 * (m / n) * b_depth + 3 * math.log2(n - 1) + 2 + 3 * math.log2(1 / eps))


def qsp_length(alpha_scale: float, delta: float, epsilon: float, prefactor: float) -> int:
    """q = ceil(prefactor (alpha/delta) ln(1/epsilon))."""
    if delta <= 0 or alpha_scale <= 0:
        raise ValueError(f"need positive alpha and delta, got alpha={alpha_scale}, delta={delta}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return math.ceil(round(prefactor * (alpha_scale / delta) * math.log(1 / epsilon), 9))


def _spectral_scale(n: int, k: int, ell: int, m: float, rho: float, gamma: float, kappa: float):
    th = thresholds(n, k, ell, m, rho, gamma, kappa)
    b = math.ceil(math.log2(th.degree_bound)) if th.degree_bound > 1 else 0
    return th, b, float(2 ** b)


def _qsp_base(n: int, k: int, ell: int, m: float, rho: float, gamma: float, kappa: float, eps: float) -> Optional[float]:
    th, _, alpha = _spectral_scale(n, k, ell, m, rho, gamma, kappa)
    gap = th.lambda_star - th.random_bound
    return (alpha / gap) * math.log(1 / eps) if gap > 0 else None


def classical_flops(n: int, k: int, ell: int, m: float, model: FlopsModel = FlopsModel.CALIBRATED,
                    iters: Optional[float] = None, rho: float = 0.25, gamma: float = 0.1,
                    kappa: float = 1.0) -> FlopsEstimate:
    """
    Power method on the full Kikuchi matrix: iters x 4E with E = m C(n-k, ell-k/2) C(k, k/2) / 2.

    "calibrated" fixes iters at the n=100 reference row; "gap" uses ceil(ln C(n,ell) / ln(lambda*/bound)).
    """
    model = FlopsModel(model)
    if m <= 0:
        return FlopsEstimate(flops=0.0, edges=0.0, iters=0.0, model=model.value)
    E = kikuchi_stats(n, k, ell, m).E
    if iters is None:
        if model == FlopsModel.CALIBRATED:
            iters = calibrated_flops_iters(k, ell)
        else:
            th = thresholds(n, k, ell, m, rho, gamma, kappa)
            if not th.valid:
                raise ValueError("gap FLOPs model needs lambda* above the random bound")
            iters = float(math.ceil(th.log_dim / math.log(th.lambda_star / th.random_bound)))
    return FlopsEstimate(flops=iters * 4 * E, edges=E, iters=float(iters), model=model.value)


# ============================================================================
# Calibration
# ============================================================================

def _reference(n: int) -> Optional[Dict[str, float]]:
    row = REFERENCE_ESTIMATES.get(n)
    if row is None:
        return None
    return {col: v * scale for col, v, scale in zip(TABLE1_COLUMNS[1:], row, TABLE1_SCALES[1:])}


@lru_cache(maxsize=None)
def calibrated_flops_iters(k: int = 4, ell: int = 16) -> float:
    ref = _reference(CALIBRATION_N)["Classical FLOPs x10^20"]
    E = kikuchi_stats(CALIBRATION_N, k, ell, table_m(CALIBRATION_N)).E
    return ref / (4 * E)


@lru_cache(maxsize=None)
def calibrated_depth_pe_scale(q: int = 594, b_depth: int = 60, eps: float = 1e-10) -> float:
    ref = _reference(CALIBRATION_N)["Depth PE x10^9"]
    return ref / depth_pe(CALIBRATION_N, table_m(CALIBRATION_N), q, b_depth, eps)


@lru_cache(maxsize=None)
def calibrated_qsp_prefactor(q: int = 594, k: int = 4, ell: int = 16, rho: float = 0.25,
                             gamma: float = 0.1, kappa: float = 1.0, eps: float = 1e-10) -> float:
    base = _qsp_base(CALIBRATION_N, k, ell, table_m(CALIBRATION_N), rho, gamma, kappa, eps)
    if base is None:
        raise ValueError("calibration row has no spectral gap")
    return q / base


def calibrate(config: Optional[EstimatorConfig] = None) -> Calibration:
    """Fit L prefactor range, QSP prefactor, depth-PE scale and FLOPs iterations at n=100."""
    cfg = config or EstimatorConfig()
    m = table_m(CALIBRATION_N)
    target_L = REFERENCE_ESTIMATES[CALIBRATION_N][1]
    log_base = cfg.ell / (2 * cfg.k) * (math.log(math.comb(CALIBRATION_N, cfg.k)) - math.log(m))
    raw = math.exp(log_base)
    logger.debug(f"L base at n=100: {raw:.3f}")
    return Calibration(
        L_prefactor_range=((target_L - 1) / raw, target_L / raw),
        qsp_prefactor=calibrated_qsp_prefactor(cfg.q_qsp, cfg.k, cfg.ell, cfg.rho, cfg.gamma, cfg.kappa,
                                               cfg.epsilon_rot),
        depth_pe_scale=calibrated_depth_pe_scale(cfg.q_qsp, cfg.b_term_depth, cfg.epsilon_rot),
        flops_iters=calibrated_flops_iters(cfg.k, cfg.ell),
    )


# ============================================================================
# Estimator
# ============================================================================

def estimate(config: EstimatorConfig) -> ResourceReport:
    """Evaluate every component formula for one configuration."""
    n, k, ell, eps = config.n, config.k, config.ell, config.epsilon_rot
    m = config.m_resolved
    c, s = ell // k, index_width(m)
    flags: List[str] = []

    g_state = gates_state(n, k, ell, m, eps)
    d_state = depth_state(n, k, ell, m, eps)
    g_pe = gates_pe(n, m, config.q_qsp, config.b_term, eps)
    d_pe_formula = depth_pe(n, m, config.q_qsp, config.b_term_depth, eps)
    scale = config.depth_pe_scale or calibrated_depth_pe_scale(config.q_qsp, config.b_term_depth, eps)
    d_pe = d_pe_formula * scale
    L = amp_amp_reps(n, k, ell, m, prefactor=config.L_prefactor)

    th, b_sparsity, alpha = _spectral_scale(n, k, ell, m, config.rho, config.gamma, config.kappa)
    gap = th.lambda_star - th.random_bound
    q_formula = None
    if gap > 0:
        prefactor = config.qsp_prefactor or calibrated_qsp_prefactor(
            config.q_qsp, k, ell, config.rho, config.gamma, config.kappa, eps)
        q_formula = qsp_length(alpha, gap, eps, prefactor)
    else:
        flags.append(f"lambda*={th.lambda_star:.3g} does not clear the random bound {th.random_bound:.3g}")

    flops = classical_flops(n, k, ell, m, config.flops_model, config.flops_iters,
                            config.rho, config.gamma, config.kappa)

    if abs(scale - 1.0) > 1e-12:
        flags.append(f"depth PE uses the formula value x{scale:.3f} (formula {d_pe_formula:.3e}, "
                     f"calibrated {d_pe:.3e})")
    ref = _reference(n)
    if ref is not None:
        ratio = g_state / ref["Gates State x10^12"]
        if abs(ratio - 1.0) > 0.05:
            flags.append(f"gates state formula {g_state:.3e} is {ratio:.3f}x the reference "
                         f"{ref['Gates State x10^12']:.3e}")
    if config.b_term != 210 or config.b_term_depth != 60:
        flags.append(f"per-clause O_H cost {config.b_term}/{config.b_term_depth} departs from the k=4 gadget")
    for f in flags:
        logger.warning(f)

    report = ResourceReport(
        n=n, k=k, ell=ell, m=m, c=c, s=s,
        logical_qubits=logical_qubits(n, k, ell, m),
        L=L,
        gates_state=g_state, gates_pe=g_pe, depth_state=d_state, depth_pe=d_pe,
        depth_pe_formula=d_pe_formula, depth_pe_scale=scale,
        total_gates=L * (g_state + g_pe), total_depth=L * (d_state + d_pe),
        classical_flops=flops.flops, flops_edges=flops.edges, flops_iters=flops.iters,
        d=th.d, d_max_bound=th.degree_bound, b_sparsity=b_sparsity, alpha=alpha,
        lambda_star=th.lambda_star, random_bound=th.random_bound, gap=gap,
        q_qsp=config.q_qsp, q_formula=q_formula, flags=flags,
        config=config.model_dump(mode="json"),
    )
    logger.info(f"Estimate n={n}: qubits={report.logical_qubits}, L={L}, "
                f"gates={report.total_gates:.3e}, depth={report.total_depth:.3e}")
    return report


def emit_table1(n_list: Sequence[int] = (60, 80, 100, 120), config: Optional[EstimatorConfig] = None
                ) -> pd.DataFrame:
    """One row per n (m = 10 n^2 ln n) with the reference column headers and scales."""
    base = config or EstimatorConfig()
    rows = []
    for n in n_list:
        r = estimate(base.model_copy(update={"n": int(n), "m": None}))
        values = [r.n, r.logical_qubits, r.L, r.depth_pe, r.depth_state, r.gates_pe, r.gates_state,
                  r.total_depth, r.total_gates, r.classical_flops]
        rows.append([v / s if s != 1 else v for v, s in zip(values, TABLE1_SCALES)])
    return pd.DataFrame(rows, columns=TABLE1_COLUMNS)


def reference_table() -> pd.DataFrame:
    return pd.DataFrame([[n, *row] for n, row in sorted(REFERENCE_ESTIMATES.items())], columns=TABLE1_COLUMNS)


def compare_to_reference(table: pd.DataFrame) -> pd.DataFrame:
    """Ratio estimate / reference value for every reference row present in table."""
    ref = reference_table().set_index("n")
    est = table.set_index("n")
    common = est.index.intersection(ref.index)
    return (est.loc[common] / ref.loc[common]).reset_index()


def table_markdown(table: pd.DataFrame) -> str:
    lines = ["| " + " | ".join(table.columns) + " |", "|" + "---|" * len(table.columns)]
    for _, row in table.iterrows():
        cells = []
        for col in table.columns:
            v = row[col]
            cells.append(f"{int(v)}" if col in TABLE1_COLUMNS[:3] else f"{v:.3g}")
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def write_table1(table: pd.DataFrame, path: Path, config: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        if config is not None:
            f.write(f"# config: {json.dumps(config, sort_keys=True, default=str)}\n")
        table.to_csv(f, index=False)
    return path


# ============================================================================
# Clause Scheduling
# ============================================================================

@dataclass
class ColoringResult:
    """Container for a clause coloring: clauses sharing a variable get different colors."""
    color_count: int
    colors: np.ndarray
    method: str

    @property
    def schedule(self) -> List[List[int]]:
        groups: List[List[int]] = [[] for _ in range(self.color_count)]
        for i, col in enumerate(self.colors):
            groups[int(col)].append(i)
        return groups


def conflict_graph(t: SparseSignedTensor) -> nx.Graph:
    """Clauses as nodes, an edge whenever two clauses share a variable."""
    G = nx.Graph()
    G.add_nodes_from(range(t.m))
    by_var: Dict[int, List[int]] = {}
    for i, S in enumerate(t.subsets):
        for v in S:
            by_var.setdefault(int(v), []).append(i)
    for members in by_var.values():
        G.add_edges_from((a, b) for j, a in enumerate(members) for b in members[j + 1:])
    return G


def _conflict_edges(t: SparseSignedTensor) -> int:
    counts = np.bincount(t.subsets.ravel(), minlength=t.n + 1)
    return int((counts * (counts - 1) // 2).sum())


def _first_fit(t: SparseSignedTensor) -> np.ndarray:
    """Greedy coloring in clause order with one used-color bitset per variable."""
    used = [0] * (t.n + 1)
    colors = np.empty(t.m, dtype=np.int64)
    for i, S in enumerate(t.subsets.tolist()):
        taken = 0
        for v in S:
            taken |= used[v]
        col = (~taken & (taken + 1)).bit_length() - 1
        colors[i] = col
        bit = 1 << col
        for v in S:
            used[v] |= bit
    return colors


def clause_coloring(t: SparseSignedTensor, strategy: str = "in_order") -> ColoringResult:
    """
    Greedy coloring of the clause-conflict graph.

    Small graphs go through networkx greedy_color with the given strategy ("in_order" visits
    clauses in storage order); past GRAPH_EDGE_CAP edges the same in-order greedy runs on
    per-variable bitsets without materializing the graph.
    """
    if t.m == 0:
        raise ValueError("clause coloring needs a nonempty tensor")
    edges = _conflict_edges(t)
    if edges <= GRAPH_EDGE_CAP:
        G = conflict_graph(t)
        nx_strategy = (lambda graph, colors: iter(range(t.m))) if strategy == "in_order" else strategy
        mapping = nx.greedy_color(G, strategy=nx_strategy)
        colors = np.array([mapping[i] for i in range(t.m)], dtype=np.int64)
        method = f"networkx:{strategy}"
    else:
        if strategy != "in_order":
            logger.warning(f"{edges} conflict edges: falling back to in-order greedy")
        colors = _first_fit(t)
        method = "bitset:in_order"
    result = ColoringResult(color_count=int(colors.max()) + 1, colors=colors, method=method)
    logger.info(f"Colored {t.m} clauses with {result.color_count} colors ({method})")
    return result


def coloring_valid(t: SparseSignedTensor, result: ColoringResult) -> bool:
    """No variable appears in two clauses of the same color."""
    var = t.subsets.ravel()
    col = np.repeat(result.colors, t.k)
    keys = var.astype(np.int64) * (result.color_count + 1) + col
    return bool(np.unique(keys).size == keys.size)


def coloring_bound(n: int, m: float, k: int = 4) -> float:
    """Asymptotic color count k m / n (4m/n at k=4)."""
    return k * m / n


def coloring_sweep(n_list: Iterable[int] = (40, 80, 120, 200), k: int = 4, seed: int = 0,
                   m_rule=table_m) -> pd.DataFrame:
    rows = []
    for n in n_list:
        m = m_rule(n)
        t = sample_random(ProblemParams(n=n, k=k, ell=k, m_target=m, rho=0.0, seed=seed))
        res = clause_coloring(t)
        bound = coloring_bound(n, m, k)
        rows.append({"n": n, "m": m, "clauses": t.m, "colors": res.color_count, "bound": bound,
                     "ratio": res.color_count / bound, "within": res.color_count <= COLORING_SLACK * bound,
                     "valid": coloring_valid(t, res),
                     "method": res.method})
    return pd.DataFrame(rows)
