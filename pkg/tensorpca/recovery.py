#!/usr/bin/env python3
"""
Spike Recovery from High-Energy Kikuchi Eigenvectors

Provides:
- voting_matrix: pairwise votes V_ij = sum over ordered (U, T) with U delta T = {i, j} of v_U v_T
- one_rdm / weak_recover: (1 + V)/n Gaussian rounding or the top eigenvector of V
- boost: one round of tensor power iteration on the full, symmetric or embedded tensor
- eberlein_energy_identity: both quadratic forms expanded on the Johnson eigenspaces
- fig2_experiment: correlation grid over planted advantage and observation fraction

Usage:
    from tensorpca.recovery import fig2_experiment

    result = fig2_experiment("symmetric", rhos=[0.0, 0.5, 1.0], fractions=[0.05, 0.5], trials=30)
    result.write_csv(Path("output/fig2.csv"))

Author: Aditya Aman
Created: 2026-01-07
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from .combinatorics import SubsetIndexer, eberlein, johnson_matrix
from .errors import DegenerateInputError
from .kikuchi import build, dense_pattern, quadratic_form
from .model import (AsymmetricTensorSample, ProblemParams, SparseSignedTensor, SpikeVector,
                    make_rng, observation_target, sample_asymmetric_planted, sample_planted,
                    symmetric_embed)
from .spectral import top_eigs

logger = logging.getLogger(__name__)

PSD_TOL = -1e-9
SYMMETRIC_FRACTIONS = (0.02, 0.05, 0.1, 0.2, 0.5)
ASYMMETRIC_FRACTIONS = (0.02, 0.05, 0.1, 0.2)
DEFAULT_RHOS = (0.0, 0.25, 0.5, 0.75, 1.0)
FIG2_COLUMNS = ["setting", "rho", "obs_fraction", "trials", "mean_corr", "std_corr"]


class RecoveryStrategy(str, Enum):
    GAUSSIAN_1RDM = "gaussian_1rdm"
    TOP_EIGVEC = "top_eigvec"


class Setting(str, Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


# ============================================================================
# Data Classes
# ============================================================================

@dataclass
class VotingMatrix:
    """Container for the n x n vote matrix (symmetric, zero diagonal)."""
    values: np.ndarray
    ell: int

    @property
    def n(self) -> int:
        return int(self.values.shape[0])


@dataclass
class RecoveryResult:
    """Container for a recovered candidate and its correlation with a known spike."""
    candidate: np.ndarray
    correlation: Optional[float] = None
    boosted: bool = False
    strategy: str = RecoveryStrategy.TOP_EIGVEC.value
    seed: int = 0
    clamped_mass: float = 0.0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["candidate"] = [float(v) for v in self.candidate]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class EnergyIdentity:
    """Container for the Johnson-eigenspace expansion of <v|K*|v> and z^T V z."""
    weights: np.ndarray
    kstar_energy: float
    kstar_from_weights: float
    vote_energy: float
    vote_from_weights: float


@dataclass
class Fig2Result:
    """Container for a correlation grid and its per-trial records."""
    table: pd.DataFrame
    records: List[Dict[str, Any]]
    config: Dict[str, Any]

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(f"# config: {json.dumps(self.config, sort_keys=True)}\n")
            self.table.to_csv(f, index=False)
        logger.info(f"Wrote {len(self.table)} grid cells to {path}")
        return path

    def write_json(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = {"config": self.config, "cells": self.table.to_dict(orient="records"),
               "trials": self.records}
        path.write_text(json.dumps(doc, indent=2))
        return path


# ============================================================================
# Correlation
# ============================================================================

def correlation(x: np.ndarray, z: np.ndarray) -> float:
    """|x.z| / (|x| |z|), zero for a zero vector."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    denom = np.linalg.norm(x) * np.linalg.norm(z)
    return float(abs(x @ z) / denom) if denom > 0 else 0.0


def block_correlation(x: np.ndarray, z: np.ndarray, block_size: int) -> float:
    """Mean per-block correlation; asymmetric spikes are identifiable only up to block sign flips."""
    xb = np.asarray(x, dtype=np.float64).reshape(-1, block_size)
    zb = np.asarray(z, dtype=np.float64).reshape(-1, block_size)
    return float(np.mean([correlation(a, b) for a, b in zip(xb, zb)]))


def sign_round(x: np.ndarray) -> SpikeVector:
    return SpikeVector(values=np.where(np.asarray(x) >= 0, 1, -1))


# ============================================================================
# Voting Matrix and Weak Recovery
# ============================================================================

def voting_matrix(v: np.ndarray, n: int, ell: int) -> VotingMatrix:
    """
    V_ij = sum_{(U, T) ordered, U delta T = {i, j}} v_U v_T over all ell-subsets of [n].

    Uses the cached distance-1 neighbour table, dim * ell * (n - ell) products.
    """
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    dim = SubsetIndexer(n, ell).size
    if v.shape[0] != dim:
        raise ValueError(f"vector length {v.shape[0]} does not match C({n},{ell}) = {dim}")
    if abs(np.linalg.norm(v) - 1.0) > 1e-8:
        raise ValueError("voting matrix needs a unit vector")

    V = np.zeros((n, n))
    if 0 < ell < n:
        cols, srank = dense_pattern(n, 2, ell)
        votes = np.bincount(srank.ravel(), weights=(v[:, None] * v[cols]).ravel(),
                            minlength=n * (n - 1) // 2)
        pairs = SubsetIndexer(n, 2).all_subsets() - 1
        V[pairs[:, 0], pairs[:, 1]] = votes
        V[pairs[:, 1], pairs[:, 0]] = votes
    return VotingMatrix(values=V, ell=ell)


def one_rdm(V: VotingMatrix) -> Tuple[np.ndarray, float]:
    """(1 + V)/n, with negative eigenvalues below PSD_TOL clamped and the trace restored to 1."""
    n = V.n
    rdm = (np.eye(n) + V.values) / n
    w, Q = np.linalg.eigh(rdm)
    if w.min() >= PSD_TOL:
        return rdm, 0.0
    clamped = float(-w[w < 0].sum())
    logger.warning(f"1RDM has eigenvalue {w.min():.3e}; clamping {clamped:.3e} negative mass")
    w = np.clip(w, 0.0, None)
    rdm = (Q * w) @ Q.T
    return rdm / np.trace(rdm), clamped


def gaussian_rounding(rdm: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Normalized draw from N(0, rdm)."""
    w, Q = np.linalg.eigh(rdm)
    x = Q @ (np.sqrt(np.clip(w, 0.0, None)) * rng.standard_normal(w.size))
    norm = np.linalg.norm(x)
    if norm == 0:
        raise DegenerateInputError("Gaussian draw from a zero 1RDM")
    return x / norm


def weak_recover(V: VotingMatrix, seed: int = 0,
                 strategy: Union[RecoveryStrategy, str] = RecoveryStrategy.TOP_EIGVEC,
                 spike: Optional[SpikeVector] = None, round_signs: bool = False) -> RecoveryResult:
    """Candidate spike from the vote matrix, with its correlation when the spike is known."""
    strategy = RecoveryStrategy(strategy)
    clamped = 0.0
    if strategy is RecoveryStrategy.TOP_EIGVEC:
        w, Q = np.linalg.eigh(V.values)
        x = Q[:, -1]
    else:
        rdm, clamped = one_rdm(V)
        x = gaussian_rounding(rdm, make_rng(seed, "rounding"))
    if round_signs:
        x = sign_round(x).values.astype(np.float64) / math.sqrt(V.n)

    corr = None
    if spike is not None:
        if spike.block_size is not None:
            corr = block_correlation(x, spike.values, spike.block_size)
        else:
            corr = correlation(x, spike.values)
    return RecoveryResult(candidate=x, correlation=corr, strategy=strategy.value, seed=seed,
                          clamped_mass=clamped)


# ============================================================================
# Boosting
# ============================================================================

def _contract_first(t: AsymmetricTensorSample, x: np.ndarray) -> np.ndarray:
    rows = t.tuples - 1
    prod = np.prod(x[rows[:, 1:]], axis=1) if t.k > 1 else np.ones(t.m)
    return np.bincount(rows[:, 0], weights=t.weights * prod, minlength=t.n)


def _contract_blocks(t: AsymmetricTensorSample, x: np.ndarray) -> np.ndarray:
    xb = x.reshape(t.k, t.n)
    rows = t.tuples - 1
    out = np.zeros((t.k, t.n))
    for a in range(t.k):
        others = [b for b in range(t.k) if b != a]
        prod = np.prod(np.stack([xb[b, rows[:, b]] for b in others], axis=1), axis=1)
        block = np.bincount(rows[:, a], weights=t.weights * prod, minlength=t.n)
        norm = np.linalg.norm(block)
        out[a] = block / (norm * math.sqrt(t.k)) if norm > 0 else 0.0
    return out.ravel()


def _contract_symmetric(t: SparseSignedTensor, x: np.ndarray) -> np.ndarray:
    """(k-1)! sum_{S contains i} T_S prod_{j in S - i} x_j."""
    rows = t.subsets - 1
    vals = x[rows]
    out = np.zeros(t.n)
    for p in range(t.k):
        others = np.delete(vals, p, axis=1)
        out += np.bincount(rows[:, p], weights=t.weights * np.prod(others, axis=1), minlength=t.n)
    return math.factorial(t.k - 1) * out


def boost(t: Union[AsymmetricTensorSample, SparseSignedTensor], x: np.ndarray,
          spike: Optional[SpikeVector] = None) -> RecoveryResult:
    """
    One round of tensor power iteration, x_hat = T' . x^{(k-1)}.

    Ordered samples with len(x) == n are the full symmetric-model tensor (contract the last k-1
    indices); with len(x) == k*n they are asymmetric and every block is contracted against the
    others. Symmetric instances contract their distinct-index entries with multiplicity (k-1)!.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if abs(np.linalg.norm(x) - 1.0) > 1e-8:
        raise ValueError("boost needs a unit vector")

    blockwise = False
    if isinstance(t, AsymmetricTensorSample):
        if x.size == t.n:
            x_hat = _contract_first(t, x)
        elif x.size == t.k * t.n:
            x_hat = _contract_blocks(t, x)
            blockwise = True
        else:
            raise ValueError(f"vector length {x.size} fits neither n={t.n} nor k*n={t.k * t.n}")
    else:
        if x.size != t.n:
            raise ValueError(f"vector length {x.size} does not match n={t.n}")
        x_hat = _contract_symmetric(t, x)

    norm = np.linalg.norm(x_hat)
    if norm == 0:
        raise DegenerateInputError("boost contraction is identically zero")
    x_hat = x_hat / norm

    corr = None
    if spike is not None:
        corr = (block_correlation(x_hat, spike.values, t.n) if blockwise
                else correlation(x_hat, spike.values))
    return RecoveryResult(candidate=x_hat, correlation=corr, boosted=True, strategy="boost")


def recover(t: SparseSignedTensor, ell: int, seed: int = 0,
            strategy: Union[RecoveryStrategy, str] = RecoveryStrategy.TOP_EIGVEC,
            spike: Optional[SpikeVector] = None, top: int = 1,
            full_tensor: Optional[AsymmetricTensorSample] = None) -> RecoveryResult:
    """Top eigenvector(s) -> voting matrix -> weak recovery, then boosting when T' is given."""
    op = build(t, ell)
    eig = top_eigs(op, count=top, seed=seed)
    v = eig.vectors[:, 0] if top == 1 else eig.vectors @ make_rng(seed, "combine").standard_normal(
        eig.vectors.shape[1])
    v = v / np.linalg.norm(v)
    result = weak_recover(voting_matrix(v, t.n, ell), seed=seed, strategy=strategy, spike=spike)
    result.metadata = {"lambda_1": float(eig.values[0]), "eig_iterations": eig.iterations}
    if full_tensor is not None:
        boosted = boost(full_tensor, result.candidate, spike)
        boosted.metadata = dict(result.metadata, weak_correlation=result.correlation)
        boosted.seed = seed
        return boosted
    return result


# ============================================================================
# Johnson-Scheme Identity
# ============================================================================

def eberlein_energy_identity(v: np.ndarray, z: SpikeVector, k: int, ell: int) -> EnergyIdentity:
    """
    Expand <v|K*|v> and z^T V z over the common Johnson eigenspaces.

    With w = D_z v and p_r its mass on eigenspace r:
        <v|K*|v> = sum_r p_r lambda_r(n, ell, k/2),  z^T V z = 2 sum_r p_r lambda_r(n, ell, 1).
    Dense; for small C(n, ell) only.
    """
    n = len(z)
    v = np.asarray(v, dtype=np.float64)
    idx = SubsetIndexer(n, ell)
    all_s = SubsetIndexer(n, k).all_subsets()
    full = SparseSignedTensor(n=n, k=k, subsets=all_s, weights=z.parity(all_s))
    kstar = quadratic_form(build(full, ell, mode="explicit"), v)

    V = voting_matrix(v, n, ell)
    zf = z.values.astype(np.float64)
    vote = float(zf @ V.values @ zf)

    w = v * np.prod(zf[idx.all_subsets() - 1], axis=1)
    evals, evecs = np.linalg.eigh(johnson_matrix(n, ell, 1))
    top_r = min(ell, n - ell)
    weights = np.zeros(top_r + 1)
    proj = (evecs.T @ w) ** 2
    for r in range(top_r + 1):
        weights[r] = proj[np.isclose(evals, eberlein(n, ell, 1, r), atol=1e-6)].sum()

    lam_k = np.array([eberlein(n, ell, k // 2, r) for r in range(top_r + 1)], dtype=np.float64)
    lam_1 = np.array([eberlein(n, ell, 1, r) for r in range(top_r + 1)], dtype=np.float64)
    return EnergyIdentity(weights=weights, kstar_energy=kstar, kstar_from_weights=float(weights @ lam_k),
                          vote_energy=vote, vote_from_weights=float(2 * weights @ lam_1))


# ============================================================================
# Recovery Grid
# ============================================================================

def trial_seed(seed: int, *ids: int) -> int:
    return int(np.random.SeedSequence([int(seed), *map(int, ids)]).generate_state(1)[0])


def fig2_trial(setting: Union[Setting, str], n: int, k: int, ell: int, rho: float, fraction: float,
               seed: int, strategy: Union[RecoveryStrategy, str] = RecoveryStrategy.TOP_EIGVEC,
               top: int = 3) -> float:
    """One trial: top eigenvectors, random normal combination, voting matrix, weak recovery."""
    setting = Setting(setting)
    asym = setting is Setting.ASYMMETRIC
    params = ProblemParams(n=n, k=k, ell=ell,
                           m_target=observation_target(n, k, fraction, asymmetric=asym),
                           rho=rho, seed=seed)
    if asym:
        sample, spike = sample_asymmetric_planted(params)
        t = symmetric_embed(sample)
    else:
        t, spike = sample_planted(params)

    op = build(t, ell)
    eig = top_eigs(op, count=top, seed=seed)
    coeffs = make_rng(seed, "combine").standard_normal(eig.vectors.shape[1])
    v = eig.vectors @ coeffs
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0
    V = voting_matrix(v / norm, t.n, ell)
    return weak_recover(V, seed=seed, strategy=strategy, spike=spike).correlation


def fig2_experiment(setting: Union[Setting, str], rhos: Sequence[float] = DEFAULT_RHOS,
                    fractions: Optional[Sequence[float]] = None, trials: int = 30,
                    n: Optional[int] = None, k: int = 4, ell: int = 6, seed: int = 0,
                    workers: int = 1, strategy: Union[RecoveryStrategy, str] = RecoveryStrategy.TOP_EIGVEC,
                    top: int = 3, progress: bool = False) -> Fig2Result:
    """
    Mean recovery correlation per (rho, observation fraction) cell.

    Symmetric defaults: n=20, fractions of C(n,k). Asymmetric defaults: n=7 (N=28), fractions
    of n^k, blockwise correlation. Trials run on a thread pool with seeds derived per cell.
    """
    setting = Setting(setting)
    if n is None:
        n = 20 if setting is Setting.SYMMETRIC else 7
    if fractions is None:
        fractions = SYMMETRIC_FRACTIONS if setting is Setting.SYMMETRIC else ASYMMETRIC_FRACTIONS
    strategy = RecoveryStrategy(strategy)

    cells = [(ci, rho, frac) for ci, (rho, frac) in enumerate((r, f) for r in rhos for f in fractions)]
    tasks = [(ci, rho, frac, tr, trial_seed(seed, ci, tr)) for ci, rho, frac in cells for tr in range(trials)]
    logger.info(f"fig2 {setting.value}: {len(cells)} cells x {trials} trials, n={n}, ell={ell}")

    def run(task):
        ci, rho, frac, tr, s = task
        corr = fig2_trial(setting, n, k, ell, rho, frac, s, strategy, top)
        return {"cell": ci, "rho": rho, "obs_fraction": frac, "trial": tr, "seed": s, "corr": corr}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            it = pool.map(run, tasks)
            records = list(tqdm(it, total=len(tasks), disable=not progress, desc="fig2"))
    else:
        records = [run(t) for t in tqdm(tasks, disable=not progress, desc="fig2")]

    frame = pd.DataFrame(records)
    table = (frame.groupby(["rho", "obs_fraction"], sort=True)["corr"]
             .agg(trials="count", mean_corr="mean", std_corr=lambda s: s.std(ddof=0))
             .reset_index())
    table.insert(0, "setting", setting.value)
    table = table[FIG2_COLUMNS]
    config = {"setting": setting.value, "n": n, "k": k, "ell": ell, "rhos": list(rhos),
              "fractions": list(fractions), "trials": trials, "seed": seed, "strategy": strategy.value,
              "top": top}
    return Fig2Result(table=table, records=records, config=config)


def monotonicity_violations(table: pd.DataFrame, slack: float = 0.05) -> List[str]:
    """Adjacent cells where mean correlation drops by more than slack along rho or fraction."""
    grid = table.pivot(index="rho", columns="obs_fraction", values="mean_corr").sort_index().sort_index(axis=1)
    out = []
    vals = grid.to_numpy()
    for i in range(vals.shape[0]):
        for j in range(vals.shape[1]):
            if i + 1 < vals.shape[0] and vals[i + 1, j] < vals[i, j] - slack:
                out.append(f"rho {grid.index[i]} -> {grid.index[i + 1]} at fraction {grid.columns[j]}")
            if j + 1 < vals.shape[1] and vals[i, j + 1] < vals[i, j] - slack:
                out.append(f"fraction {grid.columns[j]} -> {grid.columns[j + 1]} at rho {grid.index[i]}")
    return out
