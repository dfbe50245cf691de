"""Numerics for conformal Riemannian morphisms.

Linear maps between inner-product spaces are tested for being *geometric*
(conformal on some complement of the kernel), smooth maps between charts are
classified pointwise and over samples, and the characterization identities
``P o P = lam P`` / ``Q o Q = lam Q`` and the inequality
``factor * rank <= |df|_F^2`` are checked numerically.
"""
from .geometric import (
    FactorOutOfRange,
    FactorSet,
    GeometricAnalysis,
    analyze,
    cluster_singular_values,
    conformality_residual,
    construct_conf_subspace,
)
from .linalg import (
    DEFAULT_TOL,
    DependentBasis,
    InnerSpace,
    InvalidInnerSpace,
    MapBetween,
    SubspaceBasis,
    TolerancePolicy,
    frobenius_norm,
    kernel_basis,
    metric_adjoint,
    metric_svd,
    numerical_rank,
    orthogonal_complement,
)
from .manifolds import (
    ChartManifold,
    EikonalRecord,
    PointClassification,
    RankScanReport,
    SampleSet,
    SmoothMapSpec,
    classify_point,
    classify_samples,
    eikonal_check,
    gradient,
    jacobian_at,
    pullback_metric,
    rank_scan,
    scalar_morphism_check,
)
from .operators import NotAComplement, OperatorCheck, check_characterization, diamond, p_operator, q_operator
from .oracle import oracle_is_geometric
from .fixtures import gallery

__version__ = "0.1.0"
