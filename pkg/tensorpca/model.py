#!/usr/bin/env python3
"""
Planted kXOR / Spiked Tensor Instances

Samples and represents the observed instances the Kikuchi method runs on:
- Symmetric planted and random tensors with Poisson-sampled, Skellam-weighted entries
- Collision-free +/-1 instances (simple_signs) for the circuit and estimator paths
- Asymmetric planted tensors over ordered k-tuples and their symmetric block embedding
- Poisson splitting of one instance into two independent halves

All randomness flows through counter-based Philox streams derived from (seed, purpose),
so the spike, the entry draws and the sign draws are reproducible independently.

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .combinatorics import SubsetIndexer, binom_exact

logger = logging.getLogger(__name__)

# Spawn keys per purpose; never reorder, saved tensors depend on them.
STREAMS = {
    "spike": 0,
    "entries": 1,
    "signs": 2,
    "asym_spike": 3,
    "asym_entries": 4,
    "asym_signs": 5,
    "split": 6,
    "eigsolve": 7,
    "combine": 8,
    "rounding": 9,
    "boost": 10,
}


def make_rng(seed: int, purpose: str, *extra: int) -> np.random.Generator:
    """Philox generator for one (seed, purpose, extra...) stream."""
    if purpose not in STREAMS:
        raise ValueError(f"unknown RNG purpose '{purpose}'")
    ss = np.random.SeedSequence(int(seed) % (2 ** 64), spawn_key=(STREAMS[purpose], *extra))
    return np.random.Generator(np.random.Philox(ss))


# ============================================================================
# Data Classes
# ============================================================================

@dataclass
class ProblemParams:
    """Container for instance parameters (n, k, ell, m, rho, seed)."""
    n: int
    k: int
    ell: int
    m_target: float
    rho: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.k <= 0 or self.k % 2:
            raise ValueError(f"k must be a positive even integer, got {self.k}")
        if self.ell > self.n:
            raise ValueError(f"ell={self.ell} exceeds n={self.n}")
        if self.ell < self.k // 2:
            raise ValueError(f"ell={self.ell} is below k/2={self.k // 2}")
        if self.m_target < 0:
            raise ValueError(f"m_target must be nonnegative, got {self.m_target}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")

    @property
    def c(self) -> int:
        if self.ell % self.k:
            raise ValueError(f"ell={self.ell} is not a multiple of k={self.k}")
        return self.ell // self.k

    @property
    def q(self) -> float:
        return self.m_target / binom_exact(self.n, self.k)

    @property
    def q_asym(self) -> float:
        return self.m_target / self.n ** self.k

    @property
    def eta(self) -> float:
        return (1.0 - self.rho) / 2.0

    @property
    def N(self) -> int:
        return self.k * self.n


@dataclass
class SpikeVector:
    """Hidden assignment in {+1,-1}^n, optionally split into k blocks of size block_size."""
    values: np.ndarray
    block_size: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)
        if not np.all(np.abs(self.values) == 1):
            raise ValueError("spike entries must be +1 or -1")

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def blocks(self) -> np.ndarray:
        if self.block_size is None:
            return self.values[None, :]
        return self.values.reshape(-1, self.block_size)

    def parity(self, subsets: np.ndarray) -> np.ndarray:
        """z_S for each row of a 1-based (m, k) subset array."""
        if subsets.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.prod(self.values[subsets - 1].astype(np.int64), axis=1)


@dataclass
class SparseSignedTensor:
    """Observed instance: sorted k-subsets of [n] with nonzero integer weights."""
    n: int
    k: int
    subsets: np.ndarray
    weights: np.ndarray
    symmetric_flag: bool = True
    block_size: Optional[int] = None

    def __post_init__(self):
        self.subsets = np.asarray(self.subsets, dtype=np.int64).reshape(-1, self.k)
        self.weights = np.asarray(self.weights, dtype=np.int64).reshape(-1)
        if self.subsets.shape[0] != self.weights.shape[0]:
            raise ValueError("subsets and weights differ in length")
        if self.subsets.size:
            if np.any(np.diff(self.subsets, axis=1) <= 0) or self.subsets.min() < 1 or self.subsets.max() > self.n:
                raise ValueError("every key must be a sorted k-subset of [1..n]")
        if np.any(self.weights == 0):
            raise ValueError("weights must be nonzero")

    @property
    def m(self) -> int:
        return int(self.weights.shape[0])

    @property
    def total_mass(self) -> int:
        return int(np.abs(self.weights).sum())

    @property
    def is_simple(self) -> bool:
        return bool(np.all(np.abs(self.weights) == 1))

    @property
    def entries(self) -> Dict[Tuple[int, ...], int]:
        return {tuple(int(i) for i in s): int(w) for s, w in zip(self.subsets, self.weights)}

    def dense_weights(self) -> np.ndarray:
        """Weight vector over all C(n, k) ranked subsets."""
        idx = SubsetIndexer(self.n, self.k)
        out = np.zeros(idx.size, dtype=np.float64)
        if self.m:
            out[idx.rank_many(self.subsets)] = self.weights
        return out

    @classmethod
    def from_entries(cls, n: int, k: int, entries: Dict[Tuple[int, ...], int], **kwargs) -> "SparseSignedTensor":
        keys = [tuple(sorted(s)) for s, w in entries.items() if w != 0]
        vals = [w for w in entries.values() if w != 0]
        return cls(n=n, k=k, subsets=np.array(keys, dtype=np.int64).reshape(-1, k),
                   weights=np.array(vals, dtype=np.int64), **kwargs)


@dataclass
class AsymmetricTensorSample:
    """Observed asymmetric instance: ordered k-tuples in [n]^k with nonzero integer weights."""
    n: int
    k: int
    tuples: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.tuples = np.asarray(self.tuples, dtype=np.int64).reshape(-1, self.k)
        self.weights = np.asarray(self.weights, dtype=np.int64).reshape(-1)
        if self.tuples.size and (self.tuples.min() < 1 or self.tuples.max() > self.n):
            raise ValueError("tuple components must lie in [1..n]")

    @property
    def m(self) -> int:
        return int(self.weights.shape[0])

    @property
    def total_mass(self) -> int:
        return int(np.abs(self.weights).sum())

    @property
    def entries(self) -> Dict[Tuple[int, ...], int]:
        return {tuple(int(i) for i in t): int(w) for t, w in zip(self.tuples, self.weights)}


# ============================================================================
# Sampling
# ============================================================================

def _signed_inclusions(params: ProblemParams, spike: SpikeVector
                       ) -> Tuple[np.ndarray, np.ndarray, SubsetIndexer]:
    """Poisson inclusions (ranks with repeats) and their +/-1 signs."""
    idx = SubsetIndexer(params.n, params.k)
    q = params.q
    if q > 1:
        logger.warning(f"q = m/C(n,k) = {q:.3f} > 1: subsets are expected to repeat")
    ent_rng = make_rng(params.seed, "entries")
    total = int(ent_rng.poisson(q * idx.size))
    ranks = ent_rng.integers(0, idx.size, size=total, dtype=np.int64)
    subsets = idx.unrank_many(ranks)
    flips = make_rng(params.seed, "signs").random(total) < params.eta
    signs = spike.parity(subsets) * np.where(flips, -1, 1)
    return ranks, signs, idx


def _aggregate(ranks: np.ndarray, signs: np.ndarray, idx: SubsetIndexer, n: int, k: int,
               **kwargs) -> SparseSignedTensor:
    if ranks.size == 0:
        return SparseSignedTensor(n=n, k=k, subsets=np.zeros((0, k)), weights=np.zeros(0), **kwargs)
    uniq, inverse = np.unique(ranks, return_inverse=True)
    net = np.bincount(inverse, weights=signs, minlength=uniq.size).astype(np.int64)
    keep = net != 0
    logger.debug(f"aggregated {ranks.size} inclusions into {int(keep.sum())} nonzero entries")
    return SparseSignedTensor(n=n, k=k, subsets=idx.unrank_many(uniq[keep]), weights=net[keep], **kwargs)


def draw_spike(params: ProblemParams) -> SpikeVector:
    rng = make_rng(params.seed, "spike")
    return SpikeVector(values=rng.choice(np.array([-1, 1], dtype=np.int8), size=params.n))


def sample_planted(params: ProblemParams, simple_signs: bool = False,
                   spike: Optional[SpikeVector] = None) -> Tuple[SparseSignedTensor, SpikeVector]:
    """
    Planted instance: Poisson(q) inclusions per subset, signs z_S flipped with probability eta.

    Passing spike keeps it fixed while the entry streams still follow params.seed.
    """
    spike = spike if spike is not None else draw_spike(params)
    if simple_signs:
        return sample_simple(params, spike), spike
    ranks, signs, idx = _signed_inclusions(params, spike)
    t = _aggregate(ranks, signs, idx, params.n, params.k)
    logger.info(f"Sampled planted tensor: n={params.n}, k={params.k}, m={t.m} entries, mass={t.total_mass}")
    return t, spike


def sample_random(params: ProblemParams, simple_signs: bool = False) -> SparseSignedTensor:
    """Same sampler with rho = 0; the internal spike is discarded."""
    null = ProblemParams(n=params.n, k=params.k, ell=params.ell, m_target=params.m_target,
                         rho=0.0, seed=params.seed)
    t, _ = sample_planted(null, simple_signs=simple_signs)
    return t


def sample_simple(params: ProblemParams, spike: SpikeVector) -> SparseSignedTensor:
    """round(m_target) distinct subsets with +/-1 signs."""
    idx = SubsetIndexer(params.n, params.k)
    m = int(round(params.m_target))
    if m > idx.size:
        raise ValueError(f"simple_signs needs m <= C(n,k) = {idx.size}, got {m}")
    rng = make_rng(params.seed, "entries")
    ranks = np.sort(rng.choice(idx.size, size=m, replace=False)).astype(np.int64)
    subsets = idx.unrank_many(ranks)
    flips = make_rng(params.seed, "signs").random(m) < params.eta
    weights = spike.parity(subsets) * np.where(flips, -1, 1)
    return SparseSignedTensor(n=params.n, k=params.k, subsets=subsets, weights=weights)


def sample_planted_split(params: ProblemParams, zeta: float
                         ) -> Tuple[SparseSignedTensor, SparseSignedTensor, SpikeVector]:
    """
    Poisson splitting: each inclusion goes to the first instance with probability zeta.

    The two halves are independent planted instances with m_target scaled by zeta and 1 - zeta.
    """
    if not 0.0 < zeta < 1.0:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    spike = draw_spike(params)
    ranks, signs, idx = _signed_inclusions(params, spike)
    first = make_rng(params.seed, "split").random(ranks.size) < zeta
    a = _aggregate(ranks[first], signs[first], idx, params.n, params.k)
    b = _aggregate(ranks[~first], signs[~first], idx, params.n, params.k)
    return a, b, spike


def sample_asymmetric_planted(params: ProblemParams, spike: Optional[SpikeVector] = None
                              ) -> Tuple[AsymmetricTensorSample, SpikeVector]:
    """k independent spikes; ordered tuples sampled at rate m/n^k with sign flips at rate eta."""
    n, k = params.n, params.k
    if spike is None:
        spike = SpikeVector(
            values=make_rng(params.seed, "asym_spike").choice(np.array([-1, 1], dtype=np.int8), size=k * n),
            block_size=n,
        )
    elif len(spike) != k * n or spike.block_size != n:
        raise ValueError(f"asymmetric spike must have {k * n} entries in blocks of {n}")
    rng = make_rng(params.seed, "asym_entries")
    space = n ** k
    total = int(rng.poisson(params.q_asym * space))
    codes = rng.integers(0, space, size=total, dtype=np.int64)
    flips = make_rng(params.seed, "asym_signs").random(total) < params.eta

    if total == 0:
        sample = AsymmetricTensorSample(n=n, k=k, tuples=np.zeros((0, k)), weights=np.zeros(0))
        return sample, spike

    uniq, inverse = np.unique(codes, return_inverse=True)
    tuples = np.stack([(uniq // n ** i) % n + 1 for i in range(k)], axis=1)
    z = spike.blocks().astype(np.int64)
    parity_u = np.prod(z[np.arange(k), tuples - 1], axis=1)
    signs = parity_u[inverse] * np.where(flips, -1, 1)
    net = np.bincount(inverse, weights=signs, minlength=uniq.size).astype(np.int64)
    keep = net != 0
    sample = AsymmetricTensorSample(n=n, k=k, tuples=tuples[keep], weights=net[keep])
    logger.info(f"Sampled asymmetric tensor: n={n}, k={k}, m={sample.m} entries")
    return sample, spike


def symmetric_embed(t: AsymmetricTensorSample) -> SparseSignedTensor:
    """Map ordered tuple (j_1..j_k) to the valid subset {(i-1)*n + j_i} on N = k*n variables."""
    offsets = np.arange(t.k, dtype=np.int64) * t.n
    subsets = t.tuples + offsets[None, :]
    return SparseSignedTensor(n=t.k * t.n, k=t.k, subsets=subsets, weights=t.weights.copy(),
                              symmetric_flag=False, block_size=t.n)


def observation_target(n: int, k: int, fraction: float, asymmetric: bool = False) -> float:
    """m_target for an observation fraction of C(n,k) (symmetric) or n^k (asymmetric)."""
    space = n ** k if asymmetric else binom_exact(n, k)
    return fraction * space


def table_m(n: int) -> float:
    """m = 10 n^2 ln n."""
    return 10.0 * n * n * math.log(n)


# ============================================================================
# Full Ordered Tensor (boosting input)
# ============================================================================

def sample_full_planted(params: ProblemParams, spike: Optional[SpikeVector] = None
                        ) -> Tuple[AsymmetricTensorSample, SpikeVector]:
    """
    Full tensor T' over [n]^k, repeated indices included, at rate q' = m / (k! C(n,k)) per tuple.

    Collapsing its distinct-index tuples by permutation (distinct_part) gives a symmetric
    instance distributed like sample_planted with the same m.
    """
    n, k = params.n, params.k
    spike = spike if spike is not None else draw_spike(params)
    rate = params.m_target / (math.factorial(k) * binom_exact(n, k))
    rng = make_rng(params.seed, "entries", 1)
    space = n ** k
    total = int(rng.poisson(rate * space))
    codes = rng.integers(0, space, size=total, dtype=np.int64)
    flips = make_rng(params.seed, "signs", 1).random(total) < params.eta
    if total == 0:
        return AsymmetricTensorSample(n=n, k=k, tuples=np.zeros((0, k)), weights=np.zeros(0)), spike

    uniq, inverse = np.unique(codes, return_inverse=True)
    inverse = inverse.reshape(-1)
    tuples = np.stack([(uniq // n ** i) % n + 1 for i in range(k)], axis=1)
    parity_u = np.prod(spike.values[tuples - 1].astype(np.int64), axis=1)
    signs = parity_u[inverse] * np.where(flips, -1, 1)
    net = np.bincount(inverse, weights=signs, minlength=uniq.size).astype(np.int64)
    keep = net != 0
    logger.info(f"Sampled full tensor: n={n}, k={k}, {int(keep.sum())} ordered entries")
    return AsymmetricTensorSample(n=n, k=k, tuples=tuples[keep], weights=net[keep]), spike


def distinct_part(full: AsymmetricTensorSample) -> SparseSignedTensor:
    """Keep distinct-index tuples and sum the weights of each unordered subset."""
    rows = np.sort(full.tuples, axis=1)
    distinct = np.all(np.diff(rows, axis=1) > 0, axis=1) if full.k > 1 else np.ones(full.m, dtype=bool)
    idx = SubsetIndexer(full.n, full.k)
    ranks = idx.rank_many(rows[distinct])
    return _aggregate(ranks, full.weights[distinct].astype(np.float64), idx, full.n, full.k)
