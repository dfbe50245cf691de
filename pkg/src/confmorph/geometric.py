"""Geometric functions: linear maps that are conformal on some kernel complement.

A linear map ``T: V -> W`` is geometric when some complement ``C`` of its
kernel satisfies ``<T u, T v>_W = r <u, v>_V`` on ``C`` for one ``r > 0``.

Decision rule
-------------
Sections ``s`` of ``T`` over its range (``T s = id``) are exactly
``s0 + L`` where ``s0`` is the pseudoinverse section (values in ``ker T``'s
orthogonal complement) and ``L`` takes values in ``ker T``.  The image of
``s`` is conformal with factor ``r`` iff ``L* L = I/r - s0* s0``.  In the
metric-orthonormal left singular frame ``s0* s0 = diag(1/sigma_i^2)``, so a
solution exists iff ``r <= sigma_min^2`` and the number of nonzero entries of
``1/r - 1/sigma_i^2`` does not exceed ``dim ker T``.  With ``r = sigma_min^2``
that count is the number of singular values strictly above the smallest
cluster; any smaller ``r`` needs ``rank <= nullity``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    MapBetween,
    MetricSVD,
    SubspaceBasis,
    TolerancePolicy,
    metric_svd,
    rank_threshold,
)


class FactorOutOfRange(ValueError):
    """Requested conformality factor is not admissible for the map."""


EMPTY = "empty"
POINT = "point"
INTERVAL = "half_open_interval"


@dataclass(frozen=True)
class FactorSet:
    """Admissible conformality factors: empty, a single value, or ``(0, upper]``."""

    kind: str
    upper: float = math.nan
    canonical: float = math.nan

    @property
    def lower_is_open_at_zero(self) -> bool:
        return self.kind == INTERVAL

    @property
    def value(self) -> float:
        return self.upper

    def contains(self, r: float, rel_tol: float = 0.0) -> bool:
        if self.kind == EMPTY or not (r > 0):
            return False
        if self.kind == POINT:
            return abs(r - self.upper) <= rel_tol * self.upper
        return r <= self.upper * (1.0 + rel_tol)

    def scaled(self, c2: float) -> "FactorSet":
        """Factor set of ``c * T`` given ``c2 = c**2 > 0``."""
        if self.kind == EMPTY:
            return self
        if math.isinf(self.upper):
            return self
        return FactorSet(self.kind, self.upper * c2, self.canonical * c2)

    def sample(self, rng: np.random.Generator) -> float:
        """Draw an admissible factor (the canonical one for a point set)."""
        if self.kind == EMPTY:
            raise FactorOutOfRange("no admissible factor")
        if self.kind == POINT:
            return self.upper
        hi = self.upper if math.isfinite(self.upper) else 10.0
        return float(hi * rng.uniform(0.05, 1.0))

    def to_dict(self) -> dict:
        if self.kind == EMPTY:
            return {"kind": EMPTY, "upper": None, "canonical": None}
        return {
            "kind": self.kind,
            "upper": self.upper if math.isfinite(self.upper) else None,
            "canonical": self.canonical,
            "lower_is_open_at_zero": self.lower_is_open_at_zero,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FactorSet":
        if d["kind"] == EMPTY:
            return cls(EMPTY)
        upper = math.inf if d.get("upper") is None else float(d["upper"])
        return cls(d["kind"], upper, float(d["canonical"]))


def cluster_singular_values(s, tol: TolerancePolicy = DEFAULT_TOL) -> list[list[int]]:
    """Group descending positive singular values into clusters of near-equal values.

    Neighbours ``s[i] >= s[i+1]`` share a cluster when their gap is at most
    ``cluster_rel_tol * s[i]``.
    """
    s = np.asarray(s, dtype=float)
    clusters: list[list[int]] = []
    for i, v in enumerate(s):
        if clusters and s[i - 1] - v <= tol.cluster_rel_tol * s[i - 1]:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


@dataclass(frozen=True)
class GeometricAnalysis:
    is_geometric: bool
    rank: int
    nullity: int
    singular_values: np.ndarray
    sigma_min_multiplicity: int
    factors: FactorSet
    conf_basis: Optional[SubspaceBasis]
    kernel: SubspaceBasis
    cluster_values: tuple[float, ...] = ()
    cluster_sizes: tuple[int, ...] = ()
    spectral_margin: float = math.inf

    @property
    def n_clusters(self) -> int:
        return len(self.cluster_values)

    @property
    def count_above_min(self) -> int:
        return self.rank - self.sigma_min_multiplicity

    def to_dict(self) -> dict:
        def cols(b: Optional[SubspaceBasis]):
            return None if b is None else [list(map(float, v)) for v in b]

        return {
            "is_geometric": self.is_geometric,
            "rank": self.rank,
            "nullity": self.nullity,
            "singular_values": [float(x) for x in self.singular_values],
            "sigma_min_multiplicity": self.sigma_min_multiplicity,
            "cluster_values": [float(x) for x in self.cluster_values],
            "cluster_sizes": list(self.cluster_sizes),
            "spectral_margin": None if math.isinf(self.spectral_margin) else self.spectral_margin,
            "factors": self.factors.to_dict(),
            "conf_basis": cols(self.conf_basis),
            "kernel": cols(self.kernel),
        }


def _spectrum(svd: MetricSVD, tol: TolerancePolicy, scale: Optional[float]) -> tuple[int, list[list[int]]]:
    s = svd.singular_values
    if s.size == 0 or s.max() == 0.0:
        return 0, []
    rank = int(np.sum(s > rank_threshold(s, tol, scale)))
    return rank, cluster_singular_values(s[:rank], tol)


def _factor_set(s: np.ndarray, rank: int, nullity: int, geometric: bool) -> FactorSet:
    if rank == 0:
        return FactorSet(INTERVAL, math.inf, 1.0)
    if not geometric:
        return FactorSet(EMPTY)
    smin2 = float(s[rank - 1] ** 2)
    kind = INTERVAL if rank <= nullity else POINT
    return FactorSet(kind, smin2, smin2)


def _conf_from_svd(svd: MetricSVD, rank: int, r: float) -> SubspaceBasis:
    n = svd.right_vectors.shape[0]
    if rank == 0:
        return SubspaceBasis.empty(n)
    s = svd.singular_values[:rank]
    v = svd.right_vectors
    nullity = n - rank
    # Gram deficit of the pseudoinverse section, in the left singular frame.
    deficit = np.clip(1.0 / r - 1.0 / s**2, 0.0, None)
    order = np.argsort(-deficit, kind="stable")
    lift = np.zeros((n, rank))
    for slot, j in enumerate(order[:nullity]):
        lift[:, j] = math.sqrt(deficit[j]) * v[:, rank + slot]
    return SubspaceBasis(v[:, :rank] / s + lift)


def analyze(T: MapBetween, tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None) -> GeometricAnalysis:
    """Decide whether ``T`` is geometric and describe its admissible factors.

    ``scale`` is forwarded to the rank threshold (see ``numerical_rank``).
    When ``T`` is geometric, ``conf_basis`` is built for the canonical factor.
    """
    svd = metric_svd(T)
    n = T.domain.dim
    rank, clusters = _spectrum(svd, tol, scale)
    nullity = n - rank
    s = svd.singular_values
    min_mult = len(clusters[-1]) if clusters else 0
    geometric = rank == 0 or (rank - min_mult) <= nullity
    factors = _factor_set(s, rank, nullity, geometric)
    kernel = SubspaceBasis(svd.right_vectors[:, rank:])
    conf = _conf_from_svd(svd, rank, factors.canonical) if geometric else None
    cvals = tuple(float(s[c[-1]]) for c in clusters)
    margin = math.inf
    for a, b in zip(clusters, clusters[1:]):
        hi, lo = s[a[-1]], s[b[0]]
        margin = min(margin, float((hi - lo) / hi))
    return GeometricAnalysis(
        is_geometric=geometric,
        rank=rank,
        nullity=nullity,
        singular_values=s,
        sigma_min_multiplicity=min_mult,
        factors=factors,
        conf_basis=conf,
        kernel=kernel,
        cluster_values=cvals,
        cluster_sizes=tuple(len(c) for c in clusters),
        spectral_margin=margin,
    )


def construct_conf_subspace(
    T: MapBetween, r: float, tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None
) -> SubspaceBasis:
    """Complement ``C`` of ``ker T`` on which ``T`` scales inner products by ``r``.

    Basis vectors are ``s0(w_j) + L(w_j)`` for the metric-orthonormal left
    singular vectors ``w_j`` spanning the range, where ``L`` maps into the
    kernel with ``L* L = I/r - s0* s0``.  The returned vectors are
    orthogonal with squared norm ``1/r`` each.
    """
    svd = metric_svd(T)
    rank, clusters = _spectrum(svd, tol, scale)
    n = T.domain.dim
    nullity = n - rank
    s = svd.singular_values
    min_mult = len(clusters[-1]) if clusters else 0
    geometric = rank == 0 or (rank - min_mult) <= nullity
    factors = _factor_set(s, rank, nullity, geometric)
    if not factors.contains(r, 2.0 * tol.cluster_rel_tol):
        raise FactorOutOfRange(f"factor {r!r} is not admissible ({factors.to_dict()})")
    return _conf_from_svd(svd, rank, r)


def conformality_residual(T: MapBetween, C: SubspaceBasis, r: float) -> float:
    """``|Gram(T C) - r Gram(C)|_F`` relative to ``max(1, |Gram(T C)|_F)``."""
    if C.size == 0:
        return 0.0
    tc = T.matrix @ C.vectors
    img = tc.T @ T.codomain.gram @ tc
    src = C.vectors.T @ T.domain.gram @ C.vectors
    return float(np.linalg.norm(img - r * src) / max(1.0, np.linalg.norm(img)))
