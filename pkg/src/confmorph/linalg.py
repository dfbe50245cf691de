"""Linear algebra on finite-dimensional real inner-product spaces.

Every space carries a symmetric positive-definite Gram matrix ``G`` so that
``<u, v> = u.T @ G @ v``.  Metric operations (adjoints, singular values,
kernels, complements) are computed by Cholesky whitening: with ``G = R.T R``
the map ``T`` becomes the Euclidean matrix ``R_W @ T @ inv(R_V)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg


class InvalidInnerSpace(ValueError):
    """Gram matrix is not symmetric positive definite."""


class DependentBasis(ValueError):
    """Basis vectors are linearly dependent."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds that turn exact equalities into numerical ones.

    ``rank_rel_tol`` decides which singular values count as nonzero (relative
    to the largest one), ``cluster_rel_tol`` decides when two singular values
    are considered equal, and ``residual_tol`` bounds identity residuals.
    """

    rank_rel_tol: float = 1e-10
    cluster_rel_tol: float = 1e-8
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel_tol", "cluster_rel_tol", "residual_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")
        if self.cluster_rel_tol < self.rank_rel_tol:
            raise ValueError("cluster_rel_tol must be >= rank_rel_tol")


DEFAULT_TOL = TolerancePolicy()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class InnerSpace:
    """Real inner-product space ``R^dim`` with Gram matrix ``gram``."""

    gram: np.ndarray
    chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.gram, dtype=float))
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise InvalidInnerSpace(f"Gram matrix must be square and non-empty, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InvalidInnerSpace("Gram matrix has non-finite entries")
        g = 0.5 * (g + g.T)
        try:
            r = scipy.linalg.cholesky(g, lower=False)
        except np.linalg.LinAlgError as exc:
            raise InvalidInnerSpace("Gram matrix is not positive definite") from exc
        object.__setattr__(self, "gram", _frozen(g))
        object.__setattr__(self, "chol", _frozen(r))

    @classmethod
    def euclidean(cls, dim: int) -> "InnerSpace":
        if dim < 1:
            raise InvalidInnerSpace(f"dimension must be positive, got {dim}")
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def is_euclidean(self) -> bool:
        return bool(np.array_equal(self.gram, np.eye(self.dim)))

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.gram @ np.asarray(v))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def whiten(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates in a metric-orthonormal frame: ``R @ v``."""
        return self.chol @ vectors

    def unwhiten(self, coords: np.ndarray) -> np.ndarray:
        return scipy.linalg.solve_triangular(self.chol, coords, lower=False)

    def __eq__(self, other):
        return isinstance(other, InnerSpace) and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash(self.gram.tobytes())


@dataclass(frozen=True, eq=False)
class MapBetween:
    """Linear map ``domain -> codomain`` stored as a ``(codomain.dim, domain.dim)`` matrix."""

    matrix: np.ndarray
    domain: InnerSpace
    codomain: InnerSpace

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim == 1:
            m = m.reshape(self.codomain.dim, -1) if m.size else m.reshape(self.codomain.dim, 0)
        expected = (self.codomain.dim, self.domain.dim)
        if m.shape != expected:
            raise ValueError(f"matrix shape {m.shape} does not match spaces {expected}")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def euclidean(cls, matrix) -> "MapBetween":
        m = np.atleast_2d(np.asarray(matrix, dtype=float))
        return cls(m, InnerSpace.euclidean(m.shape[1]), InnerSpace.euclidean(m.shape[0]))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __call__(self, u) -> np.ndarray:
        return self.matrix @ np.asarray(u, dtype=float)

    def __matmul__(self, other: "MapBetween") -> "MapBetween":
        if other.codomain != self.domain:
            raise ValueError("cannot compose maps: intermediate spaces differ")
        return MapBetween(self.matrix @ other.matrix, other.domain, self.codomain)

    def scaled(self, c: float) -> "MapBetween":
        return MapBetween(c * self.matrix, self.domain, self.codomain)

    def whitened(self) -> np.ndarray:
        """Euclidean matrix of the map between metric-orthonormal frames."""
        left = self.codomain.chol @ self.matrix
        return scipy.linalg.solve_triangular(self.domain.chol.T, left.T, lower=True).T


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Subspace given by the columns of ``vectors`` (shape ``(ambient_dim, k)``)."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 2:
            raise ValueError("basis must be a 2-D array of column vectors")
        object.__setattr__(self, "vectors", _frozen(v))

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def from_vectors(cls, vectors, ambient_dim: Optional[int] = None) -> "SubspaceBasis":
        """Build from a list of row-style vectors (one per basis element)."""
        rows = [np.asarray(v, dtype=float) for v in vectors]
        if not rows:
            if ambient_dim is None:
                raise ValueError("ambient_dim required for an empty basis")
            return cls.empty(ambient_dim)
        return cls(np.column_stack(rows))

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def size(self) -> int:
        return self.vectors.shape[1]

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.vectors.T)


class MetricSVD(NamedTuple):
    singular_values: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray


def metric_adjoint(T: MapBetween) -> MapBetween:
    """Adjoint ``T*`` with ``<T u, w>_W = <u, T* w>_V``, i.e. ``G_V^-1 T^T G_W``."""
    rhs = T.matrix.T @ T.codomain.gram
    adj = scipy.linalg.cho_solve((T.domain.chol, False), rhs)
    return MapBetween(adj, T.codomain, T.domain)


def _normalize_signs(v: np.ndarray, u: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    # Largest-magnitude entry of each right vector positive (first index wins ties).
    v = v.copy()
    u = u.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            v[:, j] = -col
            if j < k:
                u[:, j] = -u[:, j]
    return v, u


def metric_svd(T: MapBetween) -> MetricSVD:
    """Singular value decomposition with respect to the two Gram matrices.

    Returns ``min(m, n)`` descending singular values, a full set of
    ``G_V``-orthonormal right vectors (columns) and ``G_W``-orthonormal left
    vectors such that ``T @ v_i = s_i * w_i``.
    """
    m, n = T.shape
    if m == 0 or n == 0:
        return MetricSVD(np.zeros(0), np.eye(n), np.eye(m))
    a = T.whitened()
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    right = T.domain.unwhiten(vh.T)
    left = T.codomain.unwhiten(u)
    right, left = _normalize_signs(right, left, len(s))
    return MetricSVD(s, right, left)


def rank_threshold(singular_values, tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None) -> float:
    s = np.asarray(singular_values)
    ref = scale if scale is not None else (float(s.max()) if s.size else 0.0)
    return tol.rank_rel_tol * ref


def _count_above(s: np.ndarray, tol: TolerancePolicy, scale: Optional[float]) -> int:
    if s.size == 0 or s.max() == 0.0:
        return 0
    return int(np.sum(s > rank_threshold(s, tol, scale)))


def numerical_rank(T: MapBetween, tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None) -> int:
    """Number of singular values above ``rank_rel_tol * sigma_max``.

    ``scale`` replaces ``sigma_max`` as the reference magnitude; pass a common
    scale when comparing ranks across many sample points.
    """
    return _count_above(metric_svd(T).singular_values, tol, scale)


def kernel_basis(T: MapBetween, tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None) -> SubspaceBasis:
    """``G_V``-orthonormal basis of the numerical null space."""
    svd = metric_svd(T)
    r = _count_above(svd.singular_values, tol, scale)
    return SubspaceBasis(svd.right_vectors[:, r:])


def frobenius_norm(T: MapBetween) -> float:
    """``sqrt(trace(T* T))`` with the metric adjoint."""
    tr = np.trace(metric_adjoint(T).matrix @ T.matrix)
    return float(np.sqrt(max(tr, 0.0)))


def basis_rank(B: SubspaceBasis, space: InnerSpace, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    if B.size == 0:
        return 0
    s = np.linalg.svd(space.whiten(B.vectors), compute_uv=False)
    return _count_above(s, tol, None)


def orthonormalize(B: SubspaceBasis, space: InnerSpace, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Metric-orthonormal basis of the same span; raises on dependent input."""
    if B.size == 0:
        return B
    if basis_rank(B, space, tol) < B.size:
        raise DependentBasis("basis vectors are linearly dependent")
    q, _ = np.linalg.qr(space.whiten(B.vectors))
    return SubspaceBasis(space.unwhiten(q))


def orthogonal_complement(B: SubspaceBasis, space: InnerSpace, tol: TolerancePolicy = DEFAULT_TOL) -> SubspaceBasis:
    """Metric-orthonormal basis of ``{v : <b, v> = 0 for all b in B}``."""
    if B.ambient_dim != space.dim:
        raise ValueError("basis and space dimensions differ")
    if B.size == 0:
        return SubspaceBasis(space.unwhiten(np.eye(space.dim)))
    if basis_rank(B, space, tol) < B.size:
        raise DependentBasis("basis vectors are linearly dependent")
    # In whitened coordinates the metric complement is the Euclidean one.
    q, _ = np.linalg.qr(space.whiten(B.vectors), mode="complete")
    return SubspaceBasis(space.unwhiten(q[:, B.size:]))


def in_span(v, B: SubspaceBasis, space: InnerSpace) -> float:
    """Metric distance from ``v`` to ``span(B)`` relative to ``|v|``."""
    v = np.asarray(v, dtype=float)
    nv = space.norm(v)
    if nv == 0.0:
        return 0.0
    if B.size == 0:
        return 1.0
    a = space.whiten(B.vectors)
    b = space.whiten(v)
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(np.linalg.norm(a @ coef - b) / nv)
