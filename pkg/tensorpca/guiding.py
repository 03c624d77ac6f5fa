#!/usr/bin/env python3
"""
Guiding State Construction and Overlap Analysis

The guiding state superposes disjoint unions of c = ell/k observed clauses:

    |Gamma> = (1/chi) sum_{(S_1..S_c) disjoint, ordered} T_{S_1} ... T_{S_c} |S_1 u ... u S_c>

Provides:
- build_guiding / asym_guiding: dense amplitude vectors over ranked ell-subsets
- alpha_ell and its lower bound, the postselection success beta^2
- overlap_report: measured mass of Gamma and of the lifted spike above lambda*, against bounds
- asym_overlap_report: the embedded-tensor analogue built on <K^2> and d^S_max
- amp_amp_reps: amplitude-amplification repetition count

Tuples are enumerated on uint64 bitmasks, so n is at most 64.

Usage:
    from tensorpca.guiding import build_guiding, overlap_report

    g = build_guiding(tensor, ell=8)
    report = overlap_report(tensor, spike, ell=8, th=th, rho=1.0)

Author: Aditya Aman
Created: 2026-01-07
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.sparse.linalg as sla

from .combinatorics import SubsetIndexer, binom_exact, kikuchi_stats, log_binom
from .errors import DegenerateInputError, DimensionCapError, TensorPCAError
from .kikuchi import (EXPLICIT_DIM_CAP, KikuchiOperator, block_counts, build, matvec,
                      quadratic_form, spike_lift)
from .model import SparseSignedTensor, SpikeVector, make_rng
from .spectral import DetectionThresholds

logger = logging.getLogger(__name__)

TUPLE_CAP = 50_000_000
DENSE_OVERLAP_CAP = 4000
HIGH_ENERGY_MAX = 512
DEFAULT_L_PREFACTOR = 2.77


# ============================================================================
# Data Classes
# ============================================================================

@dataclass
class GuidingState:
    """
    Container for a guiding state over ranked ell-subsets.

    chi_sq is the weighted count of ordered disjoint c-tuples, sum of prod T_S^2; it equals the
    plain count for +/-1 tensors. Orderings of one disjoint tuple add coherently, so the actual
    normalization norm_sq = sum_W raw_W^2 is at least chi_sq.
    """
    n: int
    k: int
    ell: int
    c: int
    amplitudes: np.ndarray
    raw: np.ndarray
    support: np.ndarray
    chi_sq: float
    norm_sq: float
    mass: float
    alpha_ell: float
    beta_sq: float
    beta_sq_lower: float
    asymmetric: bool = False
    block_size: Optional[int] = None
    scaled: Optional[np.ndarray] = None

    @property
    def chi(self) -> float:
        return math.sqrt(self.norm_sq)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])


@dataclass
class OverlapReport:
    """Container for measured high-energy overlaps and the bounds they are checked against."""
    lambda_star: float
    subspace_dim: int
    zeta_sq: float
    spike_sq: float
    xi_bound: float
    spike_bound: float
    L: int
    L_measured: int
    prefactor: float
    eps: float
    nu: float
    zeta: float
    failure_prob: float

    @property
    def guiding_bound_holds(self) -> bool:
        return self.zeta_sq >= self.xi_bound

    @property
    def spike_bound_holds(self) -> bool:
        return self.spike_sq >= self.spike_bound

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["guiding_bound_holds"] = self.guiding_bound_holds
        out["spike_bound_holds"] = self.spike_bound_holds
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class AsymOverlapReport:
    """Container for the embedded-tensor overlap measurements on the valid spike direction."""
    energy_sq: float
    energy_sq_bound: float
    d_max: int
    lambda_adaptive: float
    spike_sq_adaptive: float
    spike_sq_adaptive_bound: float
    lambda_star: float
    spike_norm: float
    spike_norm_bound: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ============================================================================
# Bitmask Helpers
# ============================================================================

def subset_masks(subsets: np.ndarray) -> np.ndarray:
    """uint64 bitmask per row of a 1-based subset array."""
    subsets = np.asarray(subsets, dtype=np.int64)
    if subsets.size and subsets.max() > 64:
        raise ValueError("bitmask enumeration needs indices <= 64")
    if subsets.shape[0] == 0:
        return np.zeros(0, dtype=np.uint64)
    bits = np.left_shift(np.uint64(1), (subsets - 1).astype(np.uint64))
    return np.bitwise_or.reduce(bits, axis=1)


def masks_to_subsets(masks: np.ndarray, n: int, ell: int) -> np.ndarray:
    bits = (masks[:, None] >> np.arange(n, dtype=np.uint64)) & np.uint64(1)
    _, cols = np.nonzero(bits)
    return (cols.reshape(-1, ell) + 1).astype(np.int64)


def popcount(masks: np.ndarray) -> np.ndarray:
    as_bytes = np.ascontiguousarray(masks, dtype=np.uint64).view(np.uint8)
    return np.unpackbits(as_bytes).reshape(-1, 64).sum(axis=1)


def _expand(masks: np.ndarray, w: np.ndarray, first: np.ndarray, c: int) -> Tuple[np.ndarray, np.ndarray]:
    """All ordered disjoint c-tuples whose first clause lies in `first`: (union masks, products)."""
    cur_m, cur_v = masks[first], w[first]
    for _ in range(c - 1):
        new_m, new_v = [], []
        for j in range(masks.size):
            ok = (cur_m & masks[j]) == 0
            if ok.any():
                new_m.append(cur_m[ok] | masks[j])
                new_v.append(cur_v[ok] * w[j])
        if not new_m:
            return np.zeros(0, dtype=np.uint64), np.zeros(0)
        cur_m, cur_v = np.concatenate(new_m), np.concatenate(new_v)
    return cur_m, cur_v


def _collapse(masks: np.ndarray, vals: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if masks.size == 0:
        return masks, vals
    uniq, inverse = np.unique(masks, return_inverse=True)
    return uniq, np.bincount(inverse.reshape(-1), weights=vals, minlength=uniq.size)


def _enumerate(t: SparseSignedTensor, c: int, workers: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """Collapsed union masks with summed amplitudes, plus the weighted tuple count chi^2."""
    if t.n > 64:
        raise ValueError(f"tuple enumeration needs n <= 64, got n={t.n}")
    if float(t.m) ** c > TUPLE_CAP:
        raise DimensionCapError(f"{t.m}^{c} ordered tuples exceed the enumeration cap {TUPLE_CAP}")
    masks = subset_masks(t.subsets)
    w = t.weights.astype(np.float64)
    chunks = [ch for ch in np.array_split(np.arange(t.m), max(1, min(workers, t.m))) if ch.size]

    def run(first):
        um, uv = _expand(masks, w, first, c)
        return _collapse(um, uv) + (float(np.dot(uv, uv)),)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(ch) for ch in chunks]

    chi_sq = sum(p[2] for p in parts)
    all_m = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, dtype=np.uint64)
    all_v = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
    um, uv = _collapse(all_m, all_v)
    keep = uv != 0
    return um[keep], uv[keep], chi_sq


# ============================================================================
# Guiding States
# ============================================================================

def _clause_count(t: SparseSignedTensor, ell: int) -> int:
    if ell % t.k:
        raise ValueError(f"guiding states need ell % k == 0, got ell={ell}, k={t.k}")
    return ell // t.k


def alpha_ell(t: SparseSignedTensor, c: int, workers: int = 1) -> float:
    """Weighted fraction of ordered c-tuples of observed entries that are pairwise disjoint."""
    if t.m == 0:
        return 0.0
    if c == 1:
        return 1.0
    _, _, chi_sq = _enumerate(t, c, workers)
    mass = float(np.dot(t.weights, t.weights))
    return chi_sq / mass ** c


def alpha_lower_bound(n: int, k: int, c: int, m: float) -> float:
    """1 - C(c,2) (k^2/n + 4k ln n / m)."""
    return 1.0 - binom_exact(c, 2) * (k * k / n + 4 * k * math.log(n) / m)


def build_guiding(t: SparseSignedTensor, ell: int, workers: int = 1,
                  dim_cap: int = EXPLICIT_DIM_CAP) -> GuidingState:
    """Dense guiding state of t at level ell, with alpha_ell and the postselection success beta^2."""
    c = _clause_count(t, ell)
    indexer = SubsetIndexer(t.n, ell)
    if indexer.size > dim_cap:
        raise DimensionCapError(f"guiding state dimension C({t.n},{ell}) = {indexer.size} exceeds {dim_cap}")

    union_masks, sums, chi_sq = _enumerate(t, c, workers)
    if union_masks.size == 0:
        raise DegenerateInputError(f"no disjoint {c}-tuples among {t.m} entries")

    support = indexer.rank_many(masks_to_subsets(union_masks, t.n, ell))
    raw = np.zeros(indexer.size)
    raw[support] = sums
    norm_sq = float(np.dot(sums, sums))
    mass = float(np.dot(t.weights, t.weights))
    alpha = chi_sq / mass ** c
    beta_sq = c ** (-ell) * norm_sq / mass ** c

    order = np.argsort(support)
    g = GuidingState(
        n=t.n, k=t.k, ell=ell, c=c,
        amplitudes=raw / math.sqrt(norm_sq), raw=raw, support=support[order],
        chi_sq=chi_sq, norm_sq=norm_sq, mass=mass, alpha_ell=alpha,
        beta_sq=beta_sq, beta_sq_lower=alpha * c ** (-ell),
    )
    logger.info(f"Built guiding state: c={c}, support={support.size}, alpha={alpha:.4f}, "
                f"beta^2={beta_sq:.3e}")
    return g


def asym_guiding(t: SparseSignedTensor, ell: int, m: Optional[float] = None,
                 workers: int = 1) -> GuidingState:
    """
    Guiding state of a block-embedded asymmetric tensor.

    Unions of c disjoint valid clauses always take c indices from every block, so the support
    sits inside the valid subsets. `scaled` carries the unnormalized amplitudes

        q^{-c/2} / chi_S * sum over valid partitions of U of prod T_T,
        chi_S = C(n, c)^{k/2} (c!)^{(k-1)/2},  q = m / n^k,

    whose mean is expected_asym_scale(...) times the valid spike direction.
    """
    if not t.block_size:
        raise ValueError("asym_guiding needs a block-embedded tensor")
    n, k = t.block_size, t.k
    g = build_guiding(t, ell, workers=workers)
    c = g.c

    sub = SubsetIndexer(t.n, ell).unrank_many(g.support)
    if not np.all(block_counts(sub, n, k) == c):
        raise TensorPCAError("guiding support left the valid subsets")

    m = float(t.total_mass) if m is None else float(m)
    q = m / n ** k
    chi_s = binom_exact(n, c) ** (k / 2) * math.factorial(c) ** ((k - 1) / 2)
    scaled = g.raw / math.factorial(c) * q ** (-c / 2) / chi_s
    return replace(g, asymmetric=True, block_size=n, scaled=scaled)


def expected_asym_scale(n: int, k: int, ell: int, m: float, rho: float) -> float:
    """rho^c m^{c/2} n^{-ell/2} (c!)^{(k-1)/2}."""
    c = ell // k
    return rho ** c * m ** (c / 2) / n ** (ell / 2) * math.factorial(c) ** ((k - 1) / 2)


def asym_variance_bound(n: int, k: int, ell: int, m: float, rho: float) -> Optional[float]:
    """
    Bound on Var <v|Gamma> for any unit v (scaled embedded amplitudes).

    None when rho^2 q exceeds the range where the bound applies.
    """
    c = ell // k
    q = m / n ** k
    limit = 1 / (100 * c)
    if c > 1:
        limit = min(limit, (k - 1) / (2 * (c - 1) * (c + 1) ** (k - 2)))
    if rho ** 2 * q > limit:
        return None
    return 2.04 * (rho * math.sqrt(q)) ** (2 * c - 2) * c ** 2 * math.factorial(c) ** (k - 1) / (n - c + 1) ** k


def guiding_energy(g: GuidingState, op: KikuchiOperator) -> float:
    """<Gamma|K|Gamma> through the operator."""
    return quadratic_form(op, g.amplitudes)


def guiding_energy_direct(g: GuidingState, t: SparseSignedTensor) -> float:
    """<Gamma|K|Gamma> from support pairs whose symmetric difference is an observed clause."""
    a = g.amplitudes[g.support]
    masks = subset_masks(SubsetIndexer(g.n, g.ell).unrank_many(g.support))
    weight_of = dict(zip(subset_masks(t.subsets).tolist(), t.weights.tolist()))
    total = 0.0
    for i in range(masks.size):
        diff = masks[i] ^ masks
        hit = np.flatnonzero(popcount(diff) == g.k)
        if hit.size == 0:
            continue
        w = np.array([weight_of.get(int(v), 0) for v in diff[hit]], dtype=np.float64)
        total += a[i] * float(np.dot(w, a[hit]))
    return total


# ============================================================================
# Overlap Bounds
# ============================================================================

def _A(rho: float, gamma: float, kappa: float) -> float:
    return 1.0 + kappa - (1.0 - gamma) * rho


def spike_overlap_bound(rho: float, gamma: float, kappa: float, eps: float) -> float:
    """<z^ell|Pi|z^ell> >= eps rho / A for 0 < eps < gamma."""
    if not 0.0 < eps < gamma:
        raise ValueError(f"need 0 < eps < gamma, got eps={eps}, gamma={gamma}")
    return eps * rho / _A(rho, gamma, kappa)


def guiding_overlap_bound(n: int, k: int, ell: int, m: float, rho: float, gamma: float = 0.1,
                          kappa: float = 1.0, eps: Optional[float] = None, nu: float = 0.5,
                          zeta: float = 0.5) -> float:
    """xi (m / C(n,k))^{ell/k} with xi = ell!/(c! (k!)^c) * rho eps nu / (4A) * (rho^2 zeta)^c."""
    eps = gamma / 2 if eps is None else eps
    c = ell // k
    log_comb = (math.lgamma(ell + 1) - math.lgamma(c + 1) - c * math.lgamma(k + 1))
    xi = math.exp(log_comb) * rho * eps * nu / (4 * _A(rho, gamma, kappa)) * (rho ** 2 * zeta) ** c
    return xi * (m / binom_exact(n, k)) ** c


def guiding_failure_prob(n: int, k: int, ell: int, m: float, rho: float, gamma: float = 0.1,
                         kappa: float = 1.0, eps: Optional[float] = None, nu: float = 0.5,
                         zeta: float = 0.5) -> float:
    """Probability budget under which the guiding overlap bound may fail, capped at 1."""
    eps = gamma / 2 if eps is None else eps
    c = ell // k
    A = _A(rho, gamma, kappa)
    d = kikuchi_stats(n, k, ell, m).delta * (1 - zeta) * m
    log_dim = log_binom(n, ell)
    degree = math.exp(min(0.0, log_dim - kappa ** 2 / (2 + kappa) * d))
    planted = math.exp(-((gamma - eps) ** 2) * rho ** 2 * (1 - zeta) * m / 2)
    ratio = math.exp(log_binom(n, ell - k) + log_binom(n, k) - log_dim - log_binom(ell, k))
    moment = ratio * 8.16 * c ** 2 * A / (zeta * eps * rho ** 3 * m) if rho > 0 and m > 0 else math.inf
    return min(1.0, degree + planted + moment + nu)


def amp_amp_reps(n: int, k: int, ell: int, m: float, prefactor: float = DEFAULT_L_PREFACTOR) -> int:
    """L = ceil(prefactor (C(n,k)/m)^{ell/(2k)})."""
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    log_val = math.log(prefactor) + ell / (2 * k) * (log_binom(n, k) - math.log(m))
    return max(1, math.ceil(round(math.exp(log_val), 9)))


def reps_from_overlap(overlap: float, prefactor: float = 1.0) -> int:
    if overlap <= 0:
        raise DegenerateInputError("zero overlap with the high-energy subspace; L is undefined")
    return max(1, math.ceil(round(prefactor / math.sqrt(overlap), 9)))


# ============================================================================
# Measured Overlaps
# ============================================================================

def high_energy_basis(op: KikuchiOperator, lambda_star: float, seed: int = 0,
                      dense_cap: int = DENSE_OVERLAP_CAP, strict: bool = False
                      ) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenpairs with eigenvalue >= lambda_star (> when strict).

    Full eigh up to dense_cap; above it, Lanczos with a doubling count until the returned
    window drops below lambda_star.
    """
    def keep(vals):
        return vals > lambda_star if strict else vals >= lambda_star

    if op.dim <= dense_cap:
        w, V = np.linalg.eigh(op.dense(cap=dense_cap))
        sel = keep(w)
        return w[sel], V[:, sel]

    A = op.as_linear_operator()
    rng = make_rng(seed, "eigsolve", 1)
    count = 8
    while True:
        count = min(count, op.dim - 2)
        vals, vecs = sla.eigsh(A, k=count, which="LA", v0=rng.standard_normal(op.dim))
        if vals.min() < lambda_star or count >= op.dim - 2:
            break
        if count >= HIGH_ENERGY_MAX:
            raise DimensionCapError(f"more than {HIGH_ENERGY_MAX} eigenvalues above {lambda_star:.3f}")
        count *= 2
    sel = keep(vals)
    logger.debug(f"high-energy window: {int(sel.sum())} of {count} Lanczos pairs above {lambda_star:.3f}")
    return vals[sel], vecs[:, sel]


def overlap_report(t: SparseSignedTensor, z: SpikeVector, ell: int, th: DetectionThresholds,
                   rho: float, guiding_tensor: Optional[SparseSignedTensor] = None,
                   m: Optional[float] = None, eps: Optional[float] = None, nu: float = 0.5,
                   zeta: float = 0.5, prefactor: float = 1.0, op: Optional[KikuchiOperator] = None,
                   seed: int = 0, dense_cap: int = DENSE_OVERLAP_CAP) -> OverlapReport:
    """
    Measure <Gamma|Pi|Gamma> and <z^ell|Pi|z^ell> for Pi the projector above th.lambda_star.

    guiding_tensor: the zeta half of a split instance; Gamma is built from t when omitted.
    m: the total expected observation count entering the bound; defaults to the summed masses.
    """
    gt = guiding_tensor if guiding_tensor is not None else t
    if m is None:
        m = float(t.total_mass + (gt.total_mass if guiding_tensor is not None else 0))
    eps = th.gamma / 2 if eps is None else eps

    op = op or build(t, ell)
    vals, basis = high_energy_basis(op, th.lambda_star, seed=seed, dense_cap=dense_cap)
    if vals.size == 0:
        raise DegenerateInputError(f"no eigenvalue reaches lambda*={th.lambda_star:.3f}; L is undefined")

    g = build_guiding(gt, ell)
    zeta_sq = float(np.sum((basis.T @ g.amplitudes) ** 2))
    spike_sq = float(np.sum((basis.T @ spike_lift(z, ell)) ** 2))
    xi_bound = guiding_overlap_bound(t.n, t.k, ell, m, rho, th.gamma, th.kappa, eps, nu, zeta)

    report = OverlapReport(
        lambda_star=th.lambda_star, subspace_dim=int(vals.size),
        zeta_sq=min(1.0, zeta_sq), spike_sq=min(1.0, spike_sq),
        xi_bound=xi_bound, spike_bound=spike_overlap_bound(rho, th.gamma, th.kappa, eps),
        L=reps_from_overlap(xi_bound, prefactor), L_measured=reps_from_overlap(zeta_sq, prefactor),
        prefactor=prefactor, eps=eps, nu=nu, zeta=zeta,
        failure_prob=guiding_failure_prob(t.n, t.k, ell, m, rho, th.gamma, th.kappa, eps, nu, zeta),
    )
    logger.info(f"overlap: zeta^2={report.zeta_sq:.4g} (bound {xi_bound:.3g}), "
                f"spike={report.spike_sq:.4g} (bound {report.spike_bound:.3g}), dim={vals.size}")
    return report


def asym_spike_norm_bound(k: int, rho: float, gamma: float, kappa: float) -> float:
    """||Pi z~|| >= (1-gamma) rho / (2 (1+kappa) C(k, k/2))."""
    return (1 - gamma) * rho / (2 * (1 + kappa) * binom_exact(k, k // 2))


def asym_energy_sq_bound(n: int, k: int, ell: int, m: float, rho: float, gamma: float) -> float:
    """<K^2> on the valid spike direction >= (1-gamma)^2 c^k rho^2 m^2 / n^k."""
    c = ell // k
    return (1 - gamma) ** 2 * c ** k * rho ** 2 * m ** 2 / n ** k


def asym_overlap_report(t: SparseSignedTensor, z: SpikeVector, ell: int, th: DetectionThresholds,
                        rho: float, m: float, op: Optional[KikuchiOperator] = None,
                        seed: int = 0, dense_cap: int = DENSE_OVERLAP_CAP) -> AsymOverlapReport:
    """
    Overlap of the valid spike direction z~ with high-energy eigenspaces of an embedded operator.

    Two windows: the adaptive one above <K^2>/(2 d_max), where the mass is at least
    <K^2>/(4 d_max^2), and the fixed one above th.lambda_star.
    """
    if not t.block_size:
        raise ValueError("asym_overlap_report needs a block-embedded tensor")
    n = t.block_size
    op = op or build(t, ell)
    zt = spike_lift(z, ell, t.k)
    Kz = matvec(op, zt)
    energy_sq = float(np.dot(Kz, Kz))
    d_max = max(op.d_max, 1)
    lam_adapt = energy_sq / (2 * d_max)

    _, adapt_basis = high_energy_basis(op, lam_adapt, seed=seed, dense_cap=dense_cap, strict=True)
    _, fixed_basis = high_energy_basis(op, th.lambda_star, seed=seed, dense_cap=dense_cap, strict=True)
    return AsymOverlapReport(
        energy_sq=energy_sq,
        energy_sq_bound=asym_energy_sq_bound(n, t.k, ell, m, rho, th.gamma),
        d_max=op.d_max,
        lambda_adaptive=lam_adapt,
        spike_sq_adaptive=float(np.sum((adapt_basis.T @ zt) ** 2)),
        spike_sq_adaptive_bound=energy_sq / (4 * d_max ** 2),
        lambda_star=th.lambda_star,
        spike_norm=float(np.linalg.norm(fixed_basis.T @ zt)),
        spike_norm_bound=asym_spike_norm_bound(t.k, rho, th.gamma, th.kappa),
    )
