#!/usr/bin/env python3
"""
Kikuchi Operator Construction

Builds the level-ell Kikuchi matrix of a sparse signed tensor:

    K[U, V] = T_{U delta V}  if U delta V is an observed k-subset, else 0

over sorted ell-subsets of [n] ranked in colex order. Three build paths produce the same
operator:
- entrywise: per observed S, all (U, V) with U delta V = S (sparse instances)
- pattern:   a cached neighbour table of the complete Kikuchi graph, weights gathered per
             instance (near-dense instances, where entrywise enumeration repeats work)
- implicit:  no matrix; matvec enumerates entries chunk by chunk

For block-embedded asymmetric tensors every step flips the parity of every block count,
so the relative block-parity classes are invariant subspaces; restricted mode exposes
them as independent blocks for the eigensolver.

Author: Aditya Aman
Created: 2026-01-07
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .combinatorics import SubsetIndexer, binom_exact, combination_array
from .errors import DimensionCapError
from .model import SparseSignedTensor, SpikeVector

logger = logging.getLogger(__name__)

EXPLICIT_DIM_CAP = 200_000
NNZ_CAP = 60_000_000
PAIR_CHUNK = 4_000_000


# ============================================================================
# Pair Enumeration
# ============================================================================

def _complements(subsets: np.ndarray, n: int) -> np.ndarray:
    """Sorted complement in [1..n] of each row."""
    mask = np.ones((subsets.shape[0], n), dtype=bool)
    np.put_along_axis(mask, subsets - 1, False, axis=1)
    full = np.broadcast_to(np.arange(1, n + 1), mask.shape)
    return full[mask].reshape(subsets.shape[0], n - subsets.shape[1])


def _split_masks(k: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    h = k // 2
    out = []
    for a in combination_array(k, h):
        b = np.setdiff1d(np.arange(k), a)
        out.append((a, b))
    return out


def iter_entry_pairs(t: SparseSignedTensor, ell: int, indexer: SubsetIndexer,
                     chunk_pairs: int = PAIR_CHUNK) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Yield (U ranks, V ranks, weights) for every ordered pair with U delta V an observed entry.

    Each entry S contributes C(k, k/2) * C(n - k, ell - k/2) ordered pairs.
    """
    n, k = t.n, t.k
    h = k // 2
    if t.m == 0 or ell - h > n - k:
        return
    w_combos = combination_array(n - k, ell - h)
    splits = _split_masks(k)
    per_entry = len(splits) * w_combos.shape[0]
    step = max(1, chunk_pairs // per_entry)

    for start in range(0, t.m, step):
        S = t.subsets[start:start + step]
        w = t.weights[start:start + step].astype(np.float64)
        comp = _complements(S, n)
        W = comp[:, w_combos]                        # (c, nW, ell - h)
        c, nW = W.shape[0], W.shape[1]
        vals = np.repeat(w, nW)
        for a, b in splits:
            Sa = np.broadcast_to(S[:, None, a], (c, nW, h))
            Sb = np.broadcast_to(S[:, None, b], (c, nW, h))
            U = np.sort(np.concatenate([Sa, W], axis=2), axis=2).reshape(-1, ell)
            V = np.sort(np.concatenate([Sb, W], axis=2), axis=2).reshape(-1, ell)
            yield indexer.rank_many(U), indexer.rank_many(V), vals


@lru_cache(maxsize=2)
def dense_pattern(n: int, k: int, ell: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Neighbour table of the complete Kikuchi graph.

    Returns (cols, srank), both (C(n,ell), Delta) int32: for row U, cols holds the ranks of
    all V with |U delta V| = k splitting k/2 / k/2, and srank the rank of U delta V among k-subsets.
    """
    h = k // 2
    u_idx = SubsetIndexer(n, ell)
    s_idx = SubsetIndexer(n, k)
    U = u_idx.all_subsets()
    comp = _complements(U, n)
    a_combos = combination_array(ell, h)
    b_combos = combination_array(n - ell, h)
    Delta = a_combos.shape[0] * b_combos.shape[0]
    logger.info(f"Building dense Kikuchi pattern n={n}, k={k}, ell={ell}: {u_idx.size} x {Delta}")

    cols = np.empty((u_idx.size, Delta), dtype=np.int32)
    srank = np.empty((u_idx.size, Delta), dtype=np.int32)
    slot = 0
    for a in a_combos:
        keep = np.setdiff1d(np.arange(ell), a)
        kept, removed = U[:, keep], U[:, a]
        for b in b_combos:
            added = comp[:, b]
            V = np.sort(np.concatenate([kept, added], axis=1), axis=1)
            S = np.sort(np.concatenate([removed, added], axis=1), axis=1)
            cols[:, slot] = u_idx.rank_many(V)
            srank[:, slot] = s_idx.rank_many(S)
            slot += 1
    cols.setflags(write=False)
    srank.setflags(write=False)
    return cols, srank


# ============================================================================
# Operator
# ============================================================================

@dataclass
class KikuchiOperator:
    """Container for a Kikuchi matrix, explicit (CSR) or implicit."""
    n: int
    k: int
    ell: int
    dim: int
    tensor: SparseSignedTensor
    mode: str
    matrix: Optional[sp.csr_matrix]
    column_sparsity: np.ndarray
    d_max: int
    build_path: str = "entrywise"
    block_size: Optional[int] = None
    classes: Optional[List[np.ndarray]] = None
    workers: int = 1
    indexer: SubsetIndexer = field(default=None, repr=False)

    @property
    def embedded(self) -> bool:
        return self.block_size is not None

    @property
    def max_abs_weight(self) -> int:
        return int(np.abs(self.tensor.weights).max()) if self.tensor.m else 0

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return matvec(self, x)

    def as_linear_operator(self) -> sla.LinearOperator:
        return sla.LinearOperator((self.dim, self.dim), matvec=self.matvec, dtype=np.float64)

    def submatrix(self, idx: np.ndarray) -> sp.csr_matrix:
        if self.matrix is None:
            raise DimensionCapError("class blocks need an explicit operator")
        return self.matrix[idx][:, idx].tocsr()

    def dense(self, cap: int = 4000) -> np.ndarray:
        if self.dim > cap:
            raise DimensionCapError(f"dim {self.dim} exceeds dense cap {cap}")
        if self.matrix is not None:
            return self.matrix.toarray()
        return np.column_stack([self.matvec(e) for e in np.eye(self.dim)])

    def dump_coo(self, path: Path) -> Path:
        """Write `row col value` lines for every stored nonzero."""
        if self.matrix is None:
            raise DimensionCapError("coordinate dump needs an explicit operator")
        coo = self.matrix.tocoo()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, np.column_stack([coo.row, coo.col, coo.data]), fmt=["%d", "%d", "%.17g"])
        return path


def block_counts(subsets: np.ndarray, block_size: int, k: int) -> np.ndarray:
    blocks = (subsets - 1) // block_size
    return (blocks[:, :, None] == np.arange(k)).sum(axis=1)


def parity_classes(n_total: int, ell: int, block_size: int, k: int) -> List[np.ndarray]:
    """Rank arrays of the relative block-parity classes (identified up to a global flip)."""
    U = SubsetIndexer(n_total, ell).all_subsets()
    counts = block_counts(U, block_size, k)
    rel = (counts[:, 1:] - counts[:, :1]) % 2
    code = rel @ (1 << np.arange(k - 1))
    return [np.flatnonzero(code == v) for v in np.unique(code)]


def build(t: SparseSignedTensor, ell: int, mode: str = "auto", restrict: bool = True,
          explicit_dim_cap: int = EXPLICIT_DIM_CAP, nnz_cap: int = NNZ_CAP,
          workers: int = 1) -> KikuchiOperator:
    """
    Build the Kikuchi operator of t at level ell.

    mode: "auto" (explicit when C(n,ell) <= explicit_dim_cap and the pair count fits nnz_cap),
    "explicit" (raises DimensionCapError past the caps) or "implicit".
    restrict: for embedded tensors, expose the parity-class blocks for eigensolves.
    """
    n, k = t.n, t.k
    h = k // 2
    if ell < h or ell > n:
        raise ValueError(f"need k/2 <= ell <= n, got ell={ell}, n={n}, k={k}")
    indexer = SubsetIndexer(n, ell)
    dim = indexer.size
    pairs_per_entry = binom_exact(k, h) * binom_exact(n - k, ell - h)
    entry_pairs = t.m * pairs_per_entry
    Delta = binom_exact(ell, h) * binom_exact(n - ell, h)
    pattern_pairs = dim * Delta

    stored_pairs = entry_pairs if t.block_size else min(entry_pairs, pattern_pairs)
    fits = dim <= explicit_dim_cap and stored_pairs <= nnz_cap
    if mode == "explicit" and not fits:
        raise DimensionCapError(f"explicit Kikuchi matrix too large: dim={dim}, pairs={entry_pairs}")
    explicit = mode == "explicit" or (mode == "auto" and fits)

    if explicit:
        use_pattern = (not t.block_size) and pattern_pairs <= nnz_cap and entry_pairs >= 0.25 * pattern_pairs
        if use_pattern:
            cols, srank = dense_pattern(n, k, ell)
            data = t.dense_weights()[srank.ravel()]
            indptr = np.arange(0, pattern_pairs + 1, Delta, dtype=np.int64)
            matrix = sp.csr_matrix((data, cols.ravel(), indptr), shape=(dim, dim), copy=True)
            path = "pattern"
        else:
            rows, colv, vals = [], [], []
            for r, c, v in iter_entry_pairs(t, ell, indexer):
                rows.append(r)
                colv.append(c)
                vals.append(v)
            if rows:
                matrix = sp.coo_matrix(
                    (np.concatenate(vals), (np.concatenate(rows), np.concatenate(colv))),
                    shape=(dim, dim)).tocsr()
            else:
                matrix = sp.csr_matrix((dim, dim))
            path = "entrywise"
        matrix.eliminate_zeros()
        sigma = np.diff(matrix.indptr).astype(np.int64)
        mode_used = "explicit"
    else:
        matrix = None
        sigma = np.zeros(dim, dtype=np.int64)
        for r, _, _ in iter_entry_pairs(t, ell, indexer):
            sigma += np.bincount(r, minlength=dim)
        path = "implicit"
        mode_used = "implicit"

    classes = None
    if t.block_size and restrict:
        classes = parity_classes(n, ell, t.block_size, k)
        logger.debug(f"{len(classes)} parity classes, sizes {[c.size for c in classes]}")

    op = KikuchiOperator(
        n=n, k=k, ell=ell, dim=dim, tensor=t, mode=mode_used, matrix=matrix,
        column_sparsity=sigma, d_max=int(sigma.max()) if dim else 0, build_path=path,
        block_size=t.block_size, classes=classes, workers=workers, indexer=indexer,
    )
    logger.info(f"Built Kikuchi operator: dim={dim}, mode={mode_used} ({path}), d_max={op.d_max}")
    return op


# ============================================================================
# Products
# ============================================================================

def _implicit_chunk(t: SparseSignedTensor, ell: int, indexer: SubsetIndexer, x: np.ndarray,
                    lo: int, hi: int) -> np.ndarray:
    sub = SparseSignedTensor(n=t.n, k=t.k, subsets=t.subsets[lo:hi], weights=t.weights[lo:hi],
                             symmetric_flag=t.symmetric_flag, block_size=t.block_size)
    y = np.zeros(indexer.size)
    for r, c, v in iter_entry_pairs(sub, ell, indexer):
        y += np.bincount(r, weights=v * x[c], minlength=indexer.size)
    return y


def matvec(op: KikuchiOperator, x: np.ndarray) -> np.ndarray:
    """y = K x."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != op.dim:
        raise ValueError(f"vector length {x.shape[0]} does not match dim {op.dim}")
    if op.matrix is not None:
        return op.matrix @ x
    t = op.tensor
    if op.workers <= 1 or t.m < 2 * op.workers:
        return _implicit_chunk(t, op.ell, op.indexer, x, 0, t.m)
    bounds = np.linspace(0, t.m, op.workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=op.workers) as pool:
        parts = pool.map(lambda b: _implicit_chunk(t, op.ell, op.indexer, x, b[0], b[1]),
                         zip(bounds[:-1], bounds[1:]))
        return np.sum(list(parts), axis=0)


def quadratic_form(op: KikuchiOperator, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    return float(x @ matvec(op, x))


def entry(op: KikuchiOperator, U, V) -> float:
    """Single matrix entry from the definition."""
    diff = tuple(sorted(set(U) ^ set(V)))
    if len(diff) != op.k:
        return 0.0
    return float(op.tensor.entries.get(diff, 0))


def symmetric_contraction(t: SparseSignedTensor, x: np.ndarray) -> float:
    """T . x^{(x)k} for the symmetric tensor with entries T_S on distinct indices: k! sum_S T_S x_S."""
    if t.m == 0:
        return 0.0
    xs = np.prod(np.asarray(x, dtype=np.float64)[t.subsets - 1], axis=1)
    return float(math.factorial(t.k) * np.dot(t.weights, xs))


# ============================================================================
# Spike Lift
# ============================================================================

def lift_values(z: np.ndarray, n: int, ell: int) -> np.ndarray:
    """Unnormalized lift x_U = prod_{i in U} z_i over all ranked ell-subsets."""
    U = SubsetIndexer(n, ell).all_subsets()
    return np.prod(np.asarray(z, dtype=np.float64)[U - 1], axis=1)


def valid_mask(n_total: int, ell: int, block_size: int, k: int) -> np.ndarray:
    """Ranked ell-subsets taking ell/k components from every block."""
    if ell % k:
        raise ValueError(f"valid indices need ell % k == 0, got ell={ell}, k={k}")
    U = SubsetIndexer(n_total, ell).all_subsets()
    return np.all(block_counts(U, block_size, k) == ell // k, axis=1)


def spike_lift(z: SpikeVector, ell: int, k: Optional[int] = None) -> np.ndarray:
    """
    Unit vector proportional to z^{(.)ell}.

    Symmetric: x_U = z_U / sqrt(C(n, ell)). Block-structured z (needs k): supported on the
    valid subsets with weight C(block_size, ell/k)^{-k/2}.
    """
    n = len(z)
    x = lift_values(z.values, n, ell)
    if z.block_size is None:
        return x / math.sqrt(binom_exact(n, ell))
    if k is None:
        k = n // z.block_size
    mask = valid_mask(n, ell, z.block_size, k)
    return np.where(mask, x, 0.0) * binom_exact(z.block_size, ell // k) ** (-k / 2)
