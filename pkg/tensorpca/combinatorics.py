#!/usr/bin/env python3
"""
Combinatorics for the Kikuchi Method

Provides:
- SubsetIndexer: colex ranking/unranking of l-subsets of [n] (scalar and vectorized)
- KikuchiStats: average sparsity, degree, dense degree and edge count
- Eberlein polynomials of the Johnson scheme plus brute-force Johnson matrices

Subsets are 1-based and sorted everywhere in the package. Ranks are 0-based.

Usage:
    from tensorpca.combinatorics import SubsetIndexer, kikuchi_stats

    idx = SubsetIndexer(n=20, ell=6)
    r = idx.rank((1, 4, 5, 9, 11, 20))
    stats = kikuchi_stats(n=20, k=4, ell=6, m=11983)

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from dataclasses import dataclass, asdict
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

logger = logging.getLogger(__name__)

INT64_LIMIT = 2 ** 63 - 1


# ============================================================================
# Binomials
# ============================================================================

def binom_exact(n: int, r: int) -> int:
    """Exact binomial coefficient, zero outside 0 <= r <= n."""
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)


def log_binom(n: float, r: float) -> float:
    """Natural log of C(n, r) through log-gamma; -inf when the coefficient is zero."""
    if r < 0 or n < 0 or r > n:
        return -math.inf
    return float(gammaln(n + 1) - gammaln(r + 1) - gammaln(n - r + 1))


@lru_cache(maxsize=64)
def binom_table(n: int, width: int) -> np.ndarray:
    """Pascal table T[x, j] = C(x, j) for 0 <= x <= n, 0 <= j < width, as int64."""
    table = np.zeros((n + 1, width), dtype=np.int64)
    table[:, 0] = 1
    for x in range(1, n + 1):
        table[x, 1:] = table[x - 1, 1:] + table[x - 1, :-1]
    table.setflags(write=False)
    return table


# ============================================================================
# Subset Indexing
# ============================================================================

class SubsetIndexer:
    """
    Colex bijection between sorted l-subsets of [n] and [0, C(n, l)).

    rank(s) = sum_i C(s_i - 1, i + 1) with i the 0-based position, so unrank(0) = {1..l}.
    """

    def __init__(self, n: int, ell: int):
        if n < 0 or ell < 0 or ell > n:
            raise ValueError(f"invalid subset space n={n}, ell={ell}")
        self.n = n
        self.ell = ell
        self.size = binom_exact(n, ell)
        if self.size > INT64_LIMIT:
            raise ValueError(f"C({n},{ell}) = {self.size} does not fit in int64 ranks")
        self.table = binom_table(n, ell + 2)

    def __len__(self) -> int:
        return self.size

    def _check_subset(self, subset: Sequence[int]) -> None:
        if len(subset) != self.ell:
            raise ValueError(f"subset {tuple(subset)} has size {len(subset)}, expected {self.ell}")
        prev = 0
        for s in subset:
            if s <= prev or s > self.n:
                raise ValueError(f"subset {tuple(subset)} is not a sorted subset of [1..{self.n}]")
            prev = s

    def rank(self, subset: Sequence[int]) -> int:
        self._check_subset(subset)
        return int(sum(self.table[s - 1, i + 1] for i, s in enumerate(subset)))

    def unrank(self, index: int) -> Tuple[int, ...]:
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} outside [0, {self.size})")
        out = [0] * self.ell
        r = int(index)
        for i in range(self.ell - 1, -1, -1):
            col = self.table[:, i + 1]
            x = int(np.searchsorted(col, r, side="right")) - 1
            out[i] = x + 1
            r -= int(col[x])
        return tuple(out)

    def rank_many(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized rank of an (m, ell) array of sorted 1-based subsets."""
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != self.ell:
            raise ValueError(f"expected shape (m, {self.ell}), got {rows.shape}")
        if self.ell == 0:
            return np.zeros(rows.shape[0], dtype=np.int64)
        cols = np.arange(1, self.ell + 1)
        return self.table[rows - 1, cols].sum(axis=1)

    def unrank_many(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized unrank into an (m, ell) int64 array."""
        r = np.array(indices, dtype=np.int64, copy=True)
        if r.size and (r.min() < 0 or r.max() >= self.size):
            raise ValueError("index out of range in unrank_many")
        out = np.empty((r.shape[0], self.ell), dtype=np.int64)
        for i in range(self.ell - 1, -1, -1):
            col = self.table[:, i + 1]
            x = np.searchsorted(col, r, side="right") - 1
            out[:, i] = x + 1
            r -= col[x]
        return out

    def all_subsets(self) -> np.ndarray:
        return self.unrank_many(np.arange(self.size, dtype=np.int64))


def combination_array(n: int, r: int) -> np.ndarray:
    """All r-combinations of range(n) as an (C(n,r), r) int64 array in lex order."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(combinations(range(n), r)), dtype=np.int64).reshape(-1, r)


# ============================================================================
# Kikuchi Statistics
# ============================================================================

@dataclass
class KikuchiStats:
    """Container for the closed-form Kikuchi-graph quantities."""
    n: int
    k: int
    ell: int
    m: float
    delta: float
    d: float
    Delta: int
    E: float
    log_dim: float
    delta_S: Optional[float] = None
    d_S: Optional[float] = None
    Delta_S_max: Optional[float] = None

    def to_dict(self) -> Dict:
        return asdict(self)


def _validate_nkl(n: int, k: int, ell: int) -> None:
    if k <= 0 or k % 2:
        raise ValueError(f"k must be a positive even integer, got {k}")
    if ell < k // 2 or ell > n:
        raise ValueError(f"need k/2 <= ell <= n, got n={n}, k={k}, ell={ell}")


def kikuchi_stats(n: int, k: int, ell: int, m: float, exact: Optional[bool] = None) -> KikuchiStats:
    """
    Evaluate delta, d = m*delta, Delta, E and the embedding analogues.

    The embedding analogues treat n as the block size of an asymmetric tensor
    embedded on N = k*n variables; they need ell % k == 0 and are None otherwise.
    exact=None picks the big-integer path for n <= 40 and log space above.
    """
    _validate_nkl(n, k, ell)
    h = k // 2
    if exact is None:
        exact = n <= 40

    if exact:
        num = binom_exact(n - k, ell - h) * binom_exact(k, h)
        delta = num / binom_exact(n, ell)
        E = 0.5 * m * num
    else:
        log_num = log_binom(n - k, ell - h) + log_binom(k, h)
        delta = math.exp(log_num - log_binom(n, ell)) if log_num > -math.inf else 0.0
        E = 0.5 * m * math.exp(log_num) if log_num > -math.inf else 0.0

    Delta = binom_exact(n - ell, h) * binom_exact(ell, h)
    stats = KikuchiStats(
        n=n, k=k, ell=ell, m=m,
        delta=delta, d=m * delta, Delta=Delta, E=E,
        log_dim=log_binom(n, ell),
    )

    if ell % k == 0:
        stats.delta_S, stats.d_S, stats.Delta_S_max = embedded_degree(n, k, ell, m)
    return stats


def embedded_degree(block_size: int, k: int, ell: int, m: float) -> Tuple[float, float, float]:
    """(delta^S, d^S, Delta^S_max) for valid indices taking c = ell/k components per block."""
    if ell % k or ell // k > block_size:
        raise ValueError(f"need ell % k == 0 and ell/k <= block size, got ell={ell}, k={k}, n={block_size}")
    h, c = k // 2, ell // k
    Delta_S = float(binom_exact(k, h) * c ** h * (block_size - c) ** h)
    delta_S = Delta_S / block_size ** k
    return delta_S, m * delta_S, Delta_S


def delta_upper_bound(n: int, k: int, ell: int) -> float:
    """C(k, k/2) (ell/n)^(k/2)."""
    return binom_exact(k, k // 2) * (ell / n) ** (k // 2)


# ============================================================================
# Johnson Scheme
# ============================================================================

def eberlein(n: int, ell: int, i: int, r: int) -> int:
    """
    Eigenvalue of the distance-i Johnson graph on eigenspace r.

    lambda_r(n, ell, i) = sum_j (-1)^j C(r, j) C(ell - r, i - j) C(n - ell - r, i - j)
    """
    if not (0 <= r <= ell and 0 <= i <= ell):
        raise ValueError(f"need 0 <= r, i <= ell, got r={r}, i={i}, ell={ell}")
    return sum(
        (-1) ** j * binom_exact(r, j) * binom_exact(ell - r, i - j) * binom_exact(n - ell - r, i - j)
        for j in range(0, i + 1)
    )


def eberlein_shifted(n: int, ell: int, i: int, r: int) -> int:
    """Sum with C(n - ell - r + j, i - j) as third factor instead of C(n - ell - r, i - j)."""
    return sum(
        (-1) ** j * binom_exact(r, j) * binom_exact(ell - r, i - j) * binom_exact(n - ell - r + j, i - j)
        for j in range(0, i + 1)
    )


def eigenspace_multiplicity(n: int, r: int) -> int:
    """Dimension of eigenspace r of J(n, ell): C(n, r) - C(n, r - 1)."""
    return binom_exact(n, r) - binom_exact(n, r - 1)


def johnson_spectrum(n: int, ell: int, i: int) -> List[Tuple[int, int]]:
    """(eigenvalue, multiplicity) pairs for eigenspaces r = 0..min(ell, n - ell)."""
    return [(eberlein(n, ell, i, r), eigenspace_multiplicity(n, r)) for r in range(min(ell, n - ell) + 1)]


def johnson_matrix(n: int, ell: int, i: int) -> np.ndarray:
    """Dense adjacency of the distance-i graph on ell-subsets (|U intersect V| = ell - i)."""
    subsets = SubsetIndexer(n, ell).all_subsets()
    member = np.zeros((subsets.shape[0], n), dtype=np.int64)
    np.put_along_axis(member, subsets - 1, 1, axis=1)
    overlap = member @ member.T
    return (overlap == ell - i).astype(float)
