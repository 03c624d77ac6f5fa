"""
Kikuchi spectral method for planted kXOR / spiked tensor PCA.

Components:
- model: instance parameters, seeded Poisson/Skellam sampling, asymmetric embedding
- combinatorics: subset ranking, Kikuchi statistics, Johnson-scheme eigenvalues
- kikuchi: explicit and implicit Kikuchi operators
- spectral: eigensolvers, detection thresholds and certificates
- guiding: guiding states, overlaps, amplitude-amplification sizing
- recovery: voting matrix, 1RDM rounding, boosting, recovery grid experiments
- resources: quantum resource estimates, FLOPs baseline, clause coloring
- circuits: circuit IR, gadgets, oracles, simulators, QSP rounding error
"""

from .combinatorics import (
    KikuchiStats,
    SubsetIndexer,
    eberlein,
    johnson_matrix,
    johnson_spectrum,
    kikuchi_stats,
)
from .config import (
    CircuitCheckConfig,
    EstimatorConfig,
    GridConfig,
    ProblemConfig,
    RunConfig,
    SpectralConfig,
)
from .errors import DegenerateInputError, DimensionCapError, TensorPCAError
from .guiding import (
    GuidingState,
    OverlapReport,
    amp_amp_reps,
    asym_guiding,
    build_guiding,
    overlap_report,
)
from .kikuchi import KikuchiOperator, build, matvec, quadratic_form
from .model import (
    AsymmetricTensorSample,
    ProblemParams,
    SparseSignedTensor,
    SpikeVector,
    sample_asymmetric_planted,
    sample_planted,
    sample_random,
    symmetric_embed,
)
from .recovery import (
    RecoveryResult,
    RecoveryStrategy,
    Setting,
    boost,
    fig2_experiment,
    recover,
    voting_matrix,
    weak_recover,
)
from .resources import ResourceReport, classical_flops, clause_coloring, emit_table1, estimate, qsp_length
from .spectral import DetectionCertificate, EigResult, Verdict, detect, thresholds, top_eigs

__all__ = [
    # Model
    'ProblemParams',
    'SpikeVector',
    'SparseSignedTensor',
    'AsymmetricTensorSample',
    'sample_planted',
    'sample_random',
    'sample_asymmetric_planted',
    'symmetric_embed',
    # Combinatorics
    'SubsetIndexer',
    'KikuchiStats',
    'kikuchi_stats',
    'eberlein',
    'johnson_matrix',
    'johnson_spectrum',
    # Kikuchi
    'KikuchiOperator',
    'build',
    'matvec',
    'quadratic_form',
    # Spectral
    'EigResult',
    'DetectionCertificate',
    'Verdict',
    'top_eigs',
    'thresholds',
    'detect',
    # Guiding
    'GuidingState',
    'OverlapReport',
    'build_guiding',
    'asym_guiding',
    'overlap_report',
    'amp_amp_reps',
    # Recovery
    'RecoveryResult',
    'RecoveryStrategy',
    'Setting',
    'voting_matrix',
    'weak_recover',
    'boost',
    'recover',
    'fig2_experiment',
    # Resources
    'ResourceReport',
    'estimate',
    'emit_table1',
    'classical_flops',
    'clause_coloring',
    'qsp_length',
    # Config
    'ProblemConfig',
    'SpectralConfig',
    'GridConfig',
    'EstimatorConfig',
    'CircuitCheckConfig',
    'RunConfig',
    # Errors
    'TensorPCAError',
    'DimensionCapError',
    'DegenerateInputError',
]
