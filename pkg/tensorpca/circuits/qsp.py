#!/usr/bin/env python3
"""
QSP Response and Rotation-Rounding Error

Wx convention: W(a) = [[a, i sqrt(1-a^2)], [i sqrt(1-a^2), a]] and

    U_Phi(a) = e^{i phi_0 Z} prod_{j>=1} W(a) e^{i phi_j Z}

An empty phase list means the bare signal W(a). Phase synthesis is out of scope: phase lists
come from JSON files (arrays of radians) or from callers.

Author: Aditya Aman
Created: 2026-01-07
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np

from ..model import make_rng

logger = logging.getLogger(__name__)

DEFAULT_GRID = 201


def signal(a: float) -> np.ndarray:
    s = 1j * np.sqrt(max(0.0, 1.0 - a * a))
    return np.array([[a, s], [s, a]], dtype=np.complex128)


def _phase(phi: float) -> np.ndarray:
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def qsp_unitary(phases: Sequence[float], a: float) -> np.ndarray:
    if not -1.0 <= a <= 1.0:
        raise ValueError(f"signal must lie in [-1, 1], got {a}")
    W = signal(a)
    if len(phases) == 0:
        return W
    U = _phase(phases[0])
    for phi in phases[1:]:
        U = U @ W @ _phase(phi)
    return U


def qsp_response(phases: Sequence[float], a: float) -> complex:
    """<0| U_Phi(a) |0>."""
    return complex(qsp_unitary(phases, a)[0, 0])


def round_phases(phases: Sequence[float], epsilon: float) -> np.ndarray:
    """Every angle to the nearest multiple of 2 epsilon (so each moves by at most epsilon)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    step = 2.0 * epsilon
    return np.round(np.asarray(phases, dtype=np.float64) / step) * step


def qsp_rounding_error(phases: Sequence[float], epsilon: float, grid: int = DEFAULT_GRID) -> float:
    """Max over a signal grid of ||U_Phi(a) - U_round(Phi)(a)||_2."""
    rounded = round_phases(phases, epsilon)
    worst = 0.0
    for a in np.linspace(-1.0, 1.0, grid):
        diff = qsp_unitary(phases, a) - qsp_unitary(rounded, a)
        worst = max(worst, float(np.linalg.norm(diff, 2)))
    return worst


def rounding_bound(phases: Sequence[float], epsilon: float) -> float:
    return 2.0 * len(phases) * epsilon


@dataclass
class SweepResult:
    """Container for a rounding-error sweep and its log-log slope."""
    epsilons: List[float]
    deviations: List[float]
    bounds: List[float]
    slope: float

    @property
    def within_bound(self) -> bool:
        return all(d <= b for d, b in zip(self.deviations, self.bounds))


def qsp_error_sweep(phases: Sequence[float], epsilons: Sequence[float] = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6),
                    grid: int = DEFAULT_GRID) -> SweepResult:
    devs = [qsp_rounding_error(phases, e, grid) for e in epsilons]
    positive = [(e, d) for e, d in zip(epsilons, devs) if d > 0]
    slope = float("nan")
    if len(positive) >= 2:
        xs, ys = zip(*positive)
        slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    logger.info(f"QSP sweep over {len(epsilons)} accuracies: slope {slope:.3f}")
    return SweepResult(epsilons=list(epsilons), deviations=devs,
                       bounds=[rounding_bound(phases, e) for e in epsilons], slope=slope)


def random_phases(count: int, seed: int = 0) -> np.ndarray:
    """Phases drawn uniformly in [-pi, pi)."""
    return make_rng(seed, "rounding", count).uniform(-np.pi, np.pi, size=count)


def load_phases(path: Path) -> List[float]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(v, (int, float)) for v in data):
        raise ValueError(f"{path}: expected a JSON array of radians")
    return [float(v) for v in data]


def save_phases(phases: Sequence[float], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps([float(p) for p in phases]))
    return path
