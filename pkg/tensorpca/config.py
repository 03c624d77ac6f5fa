"""
Run configuration models

One JSON document per run. Precedence: CLI flags > --config file > the defaults below.
Unknown keys are rejected at every level.
"""

import json
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .model import ProblemParams, table_m
from .recovery import ASYMMETRIC_FRACTIONS, DEFAULT_RHOS, SYMMETRIC_FRACTIONS, RecoveryStrategy, Setting

load_dotenv()

THREADS_ENV = "TENSORPCA_THREADS"


def default_threads() -> int:
    raw = os.getenv(THREADS_ENV, "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


# =============================================================================
# Enums
# =============================================================================

class BuildMode(str, Enum):
    AUTO = "auto"
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class EigMethod(str, Enum):
    AUTO = "auto"
    LANCZOS = "lanczos"
    POWER = "power"
    DENSE = "dense"


class FlopsModel(str, Enum):
    CALIBRATED = "calibrated"
    GAP = "gap"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)


# =============================================================================
# Sections
# =============================================================================

class ProblemConfig(_Strict):
    n: int = Field(default=20, ge=2, description="Variables (block size for asymmetric tensors)")
    k: int = Field(default=4, ge=2, description="Tensor order, even")
    ell: int = Field(default=6, ge=1, description="Kikuchi level")
    m: Optional[float] = Field(default=None, ge=0, description="Expected observations; None means 10 n^2 ln n")
    rho: float = Field(default=1.0, ge=0.0, le=1.0, description="Planted advantage 1 - 2 eta")
    simple_signs: bool = Field(default=False, description="Distinct subsets with +/-1 signs")
    setting: Setting = Setting.SYMMETRIC

    @field_validator("k")
    @classmethod
    def k_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError(f"k must be even, got {v}")
        return v

    @model_validator(mode="after")
    def ell_range(self) -> "ProblemConfig":
        if not self.k // 2 <= self.ell <= self.n * (self.k if self.setting == Setting.ASYMMETRIC else 1):
            raise ValueError(f"need k/2 <= ell <= n, got ell={self.ell}, n={self.n}, k={self.k}")
        return self

    @property
    def m_resolved(self) -> float:
        return self.m if self.m is not None else table_m(self.n)

    def to_params(self, seed: int) -> ProblemParams:
        return ProblemParams(n=self.n, k=self.k, ell=self.ell, m_target=self.m_resolved,
                             rho=self.rho, seed=seed)


class SpectralConfig(_Strict):
    gamma: float = Field(default=0.1, gt=0.0, lt=1.0, description="Planted-threshold slack")
    kappa: float = Field(default=1.0, gt=0.0, description="Degree slack")
    eps_prob: float = Field(default=1.0, gt=0.0, description="Spectral failure exponent")
    tol: float = Field(default=1e-6, gt=0.0, le=1e-2)
    max_iter: Optional[int] = Field(default=None, ge=1)
    mode: BuildMode = BuildMode.AUTO
    method: EigMethod = EigMethod.AUTO


class GridConfig(_Strict):
    setting: Setting = Setting.SYMMETRIC
    rhos: List[float] = Field(default_factory=lambda: list(DEFAULT_RHOS))
    fractions: Optional[List[float]] = Field(default=None, description="Observation fractions; None picks per setting")
    trials: int = Field(default=30, ge=1)
    n: Optional[int] = Field(default=None, ge=2, description="None means 20 (symmetric) or 7 (asymmetric)")
    k: int = Field(default=4, ge=2)
    ell: int = Field(default=6, ge=1)
    strategy: RecoveryStrategy = RecoveryStrategy.GAUSSIAN_1RDM
    top: int = Field(default=3, ge=1, description="Eigenvectors combined per trial")

    @field_validator("rhos")
    @classmethod
    def rhos_in_range(cls, v: List[float]) -> List[float]:
        if not v or any(not 0.0 <= r <= 1.0 for r in v):
            raise ValueError("rhos must be a nonempty list in [0, 1]")
        return v

    @field_validator("fractions")
    @classmethod
    def fractions_in_range(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and (not v or any(not 0.0 < f <= 1.0 for f in v)):
            raise ValueError("fractions must be a nonempty list in (0, 1]")
        return v

    @property
    def fractions_resolved(self) -> List[float]:
        if self.fractions is not None:
            return self.fractions
        return list(SYMMETRIC_FRACTIONS if self.setting == Setting.SYMMETRIC else ASYMMETRIC_FRACTIONS)


class EstimatorConfig(_Strict):
    n: int = Field(default=100, ge=8)
    k: int = Field(default=4, ge=2)
    ell: int = Field(default=16, ge=2)
    rho: float = Field(default=0.25, gt=0.0, le=1.0)
    m: Optional[float] = Field(default=None, gt=0, description="None means 10 n^2 ln n")
    epsilon_rot: float = Field(default=1e-10, gt=0.0, lt=1.0, description="Rotation synthesis accuracy")
    q_qsp: int = Field(default=594, ge=1, description="QSP sequence length")
    qsp_prefactor: Optional[float] = Field(default=None, gt=0, description="None: calibrated to q_qsp at n=100")
    L_prefactor: float = Field(default=2.77, gt=0.0, description="Amplitude amplification constant")
    b_term: int = Field(default=210, ge=1, description="Per-clause O_H Toffoli cost")
    b_term_depth: int = Field(default=60, ge=1, description="Per-clause O_H depth")
    depth_pe_scale: Optional[float] = Field(default=None, gt=0, description="None: calibrated at n=100")
    gamma: float = Field(default=0.1, gt=0.0, lt=1.0)
    kappa: float = Field(default=1.0, gt=0.0)
    flops_model: FlopsModel = FlopsModel.CALIBRATED
    flops_iters: Optional[float] = Field(default=None, gt=0, description="None: calibrated at n=100")

    @field_validator("k")
    @classmethod
    def k_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError(f"k must be even, got {v}")
        return v

    @model_validator(mode="after")
    def ell_multiple(self) -> "EstimatorConfig":
        if self.ell % self.k:
            raise ValueError(f"ell={self.ell} must be a multiple of k={self.k}")
        if self.ell > self.n:
            raise ValueError(f"ell={self.ell} exceeds n={self.n}")
        return self

    @property
    def m_resolved(self) -> float:
        return self.m if self.m is not None else table_m(self.n)


class CircuitCheckConfig(_Strict):
    dicke_l: List[int] = Field(default_factory=lambda: [1, 2, 3])
    dicke_count_l: List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    shuffle_c: List[int] = Field(default_factory=lambda: [2, 3, 4])
    oracle_instances: List[List[int]] = Field(
        default_factory=lambda: [[6, 2, 2, 3], [8, 4, 4, 4]],
        description="(n, k, ell, m) instances for the block-encoding check")
    guiding_instance: List[int] = Field(default_factory=lambda: [6, 2, 4, 3], description="(n, k, ell, m)")
    qsp_phases: int = Field(default=50, ge=1)
    tolerance: float = Field(default=1e-10, gt=0.0)

    @field_validator("oracle_instances")
    @classmethod
    def four_tuples(cls, v: List[List[int]]) -> List[List[int]]:
        if any(len(row) != 4 for row in v):
            raise ValueError("each oracle instance is [n, k, ell, m]")
        return v


class RunConfig(_Strict):
    seed: int = Field(default=0, ge=0)
    threads: int = Field(default_factory=default_threads, ge=1)
    out: Path = Field(default=Path("output"))
    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    spectral: SpectralConfig = Field(default_factory=SpectralConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    estimator: EstimatorConfig = Field(default_factory=EstimatorConfig)
    circuits: CircuitCheckConfig = Field(default_factory=CircuitCheckConfig)

    @classmethod
    def from_file(cls, path: Path) -> "RunConfig":
        return cls.model_validate(json.loads(Path(path).read_text()))

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """Apply dotted-key overrides (e.g. {'problem.n': 30}); None values are skipped."""
        doc = self.model_dump(mode="json")
        for key, value in overrides.items():
            if value is None:
                continue
            node = doc
            *parents, leaf = key.split(".")
            for p in parents:
                node = node[p]
            node[leaf] = value
        return RunConfig.model_validate(doc)

    def header(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
