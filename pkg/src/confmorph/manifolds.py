"""Pointwise and sampled classification of smooth maps between charts.

Manifolds are represented by a single chart: a dimension, a metric field
``x -> G(x)`` and an optional bounding box.  A map is a callable on chart
coordinates with an optional analytic Jacobian (central differences
otherwise).

Sampled verdicts are evidence, not proofs.  Ranks over a sample set are
computed against one common reference scale (the largest singular value seen
anywhere in the set) so that a vanishing differential registers as a rank
drop instead of being rescaled to full rank.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .geometric import EMPTY, POINT, FactorSet, GeometricAnalysis, analyze
from .linalg import DEFAULT_TOL, InnerSpace, MapBetween, TolerancePolicy, frobenius_norm

DEFAULT_FD_STEP = 1e-5


class MapEvaluationError(RuntimeError):
    """The map or its Jacobian could not be evaluated at a point."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ChartManifold:
    dim: int
    metric_field: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain_box: Optional[tuple[tuple[float, float], ...]] = None

    def gram_at(self, x) -> np.ndarray:
        if self.metric_field is None:
            return np.eye(self.dim)
        return np.asarray(self.metric_field(np.asarray(x, dtype=float)), dtype=float)

    def space_at(self, x) -> InnerSpace:
        return InnerSpace(self.gram_at(x))

    def contains(self, x, slack: float = 1e-12) -> bool:
        if self.domain_box is None:
            return True
        return all(lo - slack <= xi <= hi + slack for xi, (lo, hi) in zip(np.atleast_1d(x), self.domain_box))


def euclidean(dim: int, box=None) -> ChartManifold:
    return ChartManifold(dim, None, None if box is None else tuple(tuple(map(float, b)) for b in box))


@dataclass(frozen=True)
class SmoothMapSpec:
    map: Callable[[np.ndarray], np.ndarray]
    in_dim: int
    out_dim: int
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = DEFAULT_FD_STEP
    name: str = ""

    def __call__(self, x) -> np.ndarray:
        return _evaluate(self.map, x, (self.out_dim,))

    def without_jacobian(self) -> "SmoothMapSpec":
        return SmoothMapSpec(self.map, self.in_dim, self.out_dim, None, self.fd_step, self.name)


def linear_spec(matrix, name: str = "linear") -> SmoothMapSpec:
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    return SmoothMapSpec(lambda x: A @ x, A.shape[1], A.shape[0], lambda x: A, name=name)


def _evaluate(fn, x, shape) -> np.ndarray:
    try:
        y = np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)
    except Exception as exc:  # user callables may raise anything
        raise MapEvaluationError(f"evaluation failed at {np.asarray(x).tolist()}: {exc}") from exc
    y = y.reshape(shape)
    if not np.all(np.isfinite(y)):
        raise MapEvaluationError(f"non-finite value at {np.asarray(x).tolist()}")
    return y


def fd_jacobian(fn, x, out_dim: int, step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Central-difference Jacobian with step ``step`` on every axis."""
    x = np.asarray(x, dtype=float)
    J = np.empty((out_dim, x.size))
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = step
        J[:, j] = (_evaluate(fn, x + e, (out_dim,)) - _evaluate(fn, x - e, (out_dim,))) / (2 * step)
    return J


def jacobian_matrix(spec: SmoothMapSpec, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if spec.jacobian is not None:
        return _evaluate(spec.jacobian, x, (spec.out_dim, spec.in_dim))
    return fd_jacobian(spec.map, x, spec.out_dim, spec.fd_step)


def jacobian_at(spec: SmoothMapSpec, x, chartM: ChartManifold, chartN: ChartManifold) -> MapBetween:
    """Differential at ``x`` as a map between the tangent spaces at ``x`` and ``f(x)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != chartM.dim or spec.in_dim != chartM.dim or spec.out_dim != chartN.dim:
        raise ValueError("point, map and chart dimensions are inconsistent")
    if not chartM.contains(x):
        raise PreconditionError(f"point {x.tolist()} lies outside the domain box")
    J = jacobian_matrix(spec, x)
    return MapBetween(J, chartM.space_at(x), chartN.space_at(spec(x)))


@dataclass(frozen=True)
class EikonalRecord:
    lhs: float
    rhs: float
    holds: bool
    equality: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "equality": self.equality}


FLAG_NAMES = (
    "immersion",
    "submersion",
    "geometric",
    "conformal_riemannian_map",
    "riemannian_map",
    "isometric_immersion",
    "conformal_immersion",
)


@dataclass(frozen=True)
class PointClassification:
    point: np.ndarray
    rank: int
    nullity: int
    analysis: GeometricAnalysis
    flags: dict
    frobenius_sq: float
    eikonal: Optional[EikonalRecord]

    @property
    def canonical_factor(self) -> Optional[float]:
        return self.analysis.factors.canonical if self.analysis.is_geometric else None

    def to_dict(self, with_analysis: bool = True) -> dict:
        d = {
            "point": [float(v) for v in self.point],
            "rank": self.rank,
            "nullity": self.nullity,
            "flags": dict(self.flags),
            "canonical_factor": self.canonical_factor,
            "factors": self.analysis.factors.to_dict(),
            "frobenius_sq": self.frobenius_sq,
            "eikonal": None if self.eikonal is None else self.eikonal.to_dict(),
        }
        if with_analysis:
            d["analysis"] = self.analysis.to_dict()
        return d


def _eikonal(analysis: GeometricAnalysis, frob_sq: float, tol: TolerancePolicy) -> EikonalRecord:
    lhs = analysis.factors.canonical * analysis.rank
    rhs = frob_sq
    holds = lhs <= rhs + tol.residual_tol * max(1.0, rhs)
    equality = abs(rhs - lhs) <= 2.0 * max(analysis.rank, 1) * tol.cluster_rel_tol * max(rhs, 1e-300) or rhs == lhs
    return EikonalRecord(float(lhs), float(rhs), bool(holds), bool(equality))


def classify_differential(T: MapBetween, tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None,
                          point=None) -> PointClassification:
    """Taxonomy flags, factor data and eikonal fields for one differential."""
    a = analyze(T, tol, scale)
    one_cluster = a.n_clusters <= 1
    unit = a.rank == 0 or abs(a.cluster_values[-1] ** 2 - 1.0) <= 2.0 * tol.cluster_rel_tol
    immersion = a.nullity == 0
    flags = {
        "immersion": immersion,
        "submersion": a.rank == T.codomain.dim,
        "geometric": a.is_geometric,
        "conformal_riemannian_map": one_cluster,
        "riemannian_map": one_cluster and unit,
        "isometric_immersion": immersion and one_cluster and unit,
        "conformal_immersion": immersion and a.is_geometric,
    }
    frob_sq = frobenius_norm(T) ** 2
    eik = _eikonal(a, frob_sq, tol) if a.is_geometric else None
    pt = np.zeros(0) if point is None else np.atleast_1d(np.asarray(point, dtype=float))
    return PointClassification(pt, a.rank, a.nullity, a, flags, float(frob_sq), eik)


def classify_point(spec: SmoothMapSpec, x, chartM: ChartManifold, chartN: ChartManifold,
                   tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None) -> PointClassification:
    return classify_differential(jacobian_at(spec, x, chartM, chartN), tol, scale, point=x)


def eikonal_check(spec: SmoothMapSpec, x, chartM: ChartManifold, chartN: ChartManifold,
                  tol: TolerancePolicy = DEFAULT_TOL, scale: Optional[float] = None) -> EikonalRecord:
    """``canonical_factor * rank <= |df_x|_F^2``; equality iff a single singular cluster."""
    c = classify_point(spec, x, chartM, chartN, tol, scale)
    if c.eikonal is None:
        raise PreconditionError(f"differential at {c.point.tolist()} is not geometric")
    return c.eikonal


def gradient(scalar_spec: SmoothMapSpec, x, chartM: ChartManifold) -> np.ndarray:
    """Metric gradient ``G(x)^-1 df_x^T`` of a real-valued map."""
    if scalar_spec.out_dim != 1:
        raise ValueError("gradient requires a scalar map")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    df = jacobian_matrix(scalar_spec, x)[0]
    return np.linalg.solve(chartM.gram_at(x), df)


def pullback_metric(spec: SmoothMapSpec, x, chartM: ChartManifold, chartN: ChartManifold) -> np.ndarray:
    """``J^T G_N(f(x)) J``; positive definite exactly at immersion points."""
    T = jacobian_at(spec, x, chartM, chartN)
    g = T.matrix.T @ T.codomain.gram @ T.matrix
    return 0.5 * (g + g.T)


def is_positive_definite(g: np.ndarray, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    w = np.linalg.eigvalsh(g)
    return bool(w.size and w.min() > tol.rank_rel_tol * max(w.max(), 0.0) and w.min() > 0)


# --- samples -----------------------------------------------------------------


@dataclass(frozen=True)
class SampleSet:
    """Sample points with an adjacency structure (grid neighbours or path order)."""

    points: np.ndarray
    edges: tuple[tuple[int, int], ...] = ()
    shape: Optional[tuple[int, ...]] = None

    @classmethod
    def grid(cls, axes: Sequence[tuple[float, float, int]]) -> "SampleSet":
        """Tensor grid; ``axes`` is a ``(min, max, count)`` triple per coordinate."""
        for lo, hi, cnt in axes:
            if int(cnt) < 1:
                raise ValueError("grid counts must be positive")
        coords = [np.linspace(lo, hi, int(cnt)) for lo, hi, cnt in axes]
        shape = tuple(len(c) for c in coords)
        pts = np.array(list(itertools.product(*coords)), dtype=float).reshape(-1, len(axes))
        idx = np.arange(pts.shape[0]).reshape(shape)
        edges = []
        for ax in range(len(shape)):
            a = np.moveaxis(idx, ax, 0)
            edges.extend(zip(a[:-1].ravel().tolist(), a[1:].ravel().tolist()))
        return cls(pts, tuple(edges), shape)

    @classmethod
    def path(cls, points) -> "SampleSet":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(pts, tuple((i, i + 1) for i in range(len(pts) - 1)))

    def subset(self, keep) -> "SampleSet":
        """Restrict to the points where ``keep`` (boolean array) is true."""
        keep = np.asarray(keep, dtype=bool)
        new_index = -np.ones(len(keep), dtype=int)
        new_index[keep] = np.arange(int(keep.sum()))
        edges = tuple((int(new_index[i]), int(new_index[j])) for i, j in self.edges if keep[i] and keep[j])
        return SampleSet(self.points[keep], edges, None)

    def __len__(self):
        return self.points.shape[0]

    def components(self) -> np.ndarray:
        n = len(self)
        if not self.edges:
            return np.arange(n)
        i, j = np.array(self.edges).T
        adj = scipy.sparse.coo_matrix((np.ones(len(i)), (i, j)), shape=(n, n))
        return scipy.sparse.csgraph.connected_components(adj, directed=False)[1]


def sample_differentials(spec: SmoothMapSpec, samples: SampleSet, chartM: ChartManifold,
                         chartN: ChartManifold) -> list[MapBetween]:
    return [jacobian_at(spec, x, chartM, chartN) for x in samples.points]


def common_scale(differentials: Sequence[MapBetween]) -> float:
    s = [np.linalg.norm(T.whitened(), 2) if T.matrix.size else 0.0 for T in differentials]
    return float(max(s, default=0.0))


def classify_samples(spec: SmoothMapSpec, samples: SampleSet, chartM: ChartManifold, chartN: ChartManifold,
                     tol: TolerancePolicy = DEFAULT_TOL) -> list[PointClassification]:
    """Classify every sample with a rank threshold shared across the set."""
    diffs = sample_differentials(spec, samples, chartM, chartN)
    scale = common_scale(diffs) or None
    return [classify_differential(T, tol, scale, point=x) for T, x in zip(diffs, samples.points)]


def factors_compatible(a: FactorSet, b: FactorSet, rel: float = 0.1) -> bool:
    """Whether some factor lies in both sets up to ``rel`` relative slack."""
    if a.kind == EMPTY or b.kind == EMPTY:
        return False
    if a.kind == POINT and b.kind == POINT:
        return abs(a.upper - b.upper) <= rel * max(a.upper, b.upper)
    if a.kind == POINT:
        return a.upper <= b.upper * (1 + rel)
    if b.kind == POINT:
        return b.upper <= a.upper * (1 + rel)
    return True


@dataclass(frozen=True)
class RankScanReport:
    samples: list
    locally_constant: bool
    distinct_ranks: frozenset
    min_factor: Optional[float]
    component_ranks: list = field(default_factory=list)
    rank_changes: list = field(default_factory=list)
    all_geometric: bool = False
    factor_continuous: bool = False
    classifications: list = field(default_factory=list, repr=False)

    @property
    def morphism_consistent(self) -> bool:
        """Sampled evidence: geometric everywhere, compatible factors, constant rank.

        Rank constancy is included because the sampled region is a compact box,
        where a positive continuous factor is bounded below.
        """
        return self.all_geometric and self.factor_continuous and self.locally_constant

    def verdict_line(self) -> str:
        mf = "n/a" if self.min_factor is None else f"{self.min_factor:.12g}"
        return f"rank locally constant: {'yes' if self.locally_constant else 'no'}; min canonical factor: {mf}"

    def to_dict(self) -> dict:
        return {
            "samples": [{"point": [float(v) for v in p], "rank": int(r)} for p, r in self.samples],
            "locally_constant": self.locally_constant,
            "distinct_ranks": sorted(int(r) for r in self.distinct_ranks),
            "component_ranks": [sorted(int(r) for r in c) for c in self.component_ranks],
            "rank_changes": [[int(i), int(j)] for i, j in self.rank_changes],
            "min_factor": self.min_factor,
            "all_geometric": self.all_geometric,
            "factor_continuous": self.factor_continuous,
            "morphism_consistent": self.morphism_consistent,
            "verdict": self.verdict_line(),
        }


def scan_report(samples: SampleSet, cls: Sequence[PointClassification]) -> RankScanReport:
    ranks = np.array([c.rank for c in cls], dtype=int)
    comp = samples.components()
    component_ranks = [frozenset(ranks[comp == k].tolist()) for k in np.unique(comp)]
    changes = [(i, j) for i, j in samples.edges if ranks[i] != ranks[j]]
    factors = [c.canonical_factor for c in cls if c.analysis.is_geometric and c.rank > 0]
    all_geo = all(c.analysis.is_geometric for c in cls)
    cont = all_geo and all(
        factors_compatible(cls[i].analysis.factors, cls[j].analysis.factors) for i, j in samples.edges
    )
    return RankScanReport(
        samples=[(p, int(r)) for p, r in zip(samples.points, ranks)],
        locally_constant=all(len(c) == 1 for c in component_ranks),
        distinct_ranks=frozenset(ranks.tolist()),
        min_factor=float(min(factors)) if factors else None,
        component_ranks=component_ranks,
        rank_changes=changes,
        all_geometric=all_geo,
        factor_continuous=cont,
        classifications=list(cls),
    )


def rank_scan(spec: SmoothMapSpec, sample_set: SampleSet, chartM: ChartManifold, chartN: ChartManifold,
              tol: TolerancePolicy = DEFAULT_TOL) -> RankScanReport:
    """Rank function over the samples with a constancy verdict per connected component."""
    return scan_report(sample_set, classify_samples(spec, sample_set, chartM, chartN, tol))


# --- real-valued maps ----------------------------------------------------------


@dataclass(frozen=True)
class ScalarMorphismReport:
    is_morphism: bool
    branch: str  # "constant", "nonvanishing_gradient" or "not_a_morphism"
    factors: np.ndarray
    vanishing: tuple[int, ...]
    brackets: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "is_morphism": self.is_morphism,
            "branch": self.branch,
            "factors": [float(v) for v in self.factors],
            "vanishing": list(self.vanishing),
            "brackets": [list(b) for b in self.brackets],
        }


def scalar_morphism_check(scalar_spec: SmoothMapSpec, samples, chartM: ChartManifold,
                          tol: TolerancePolicy = DEFAULT_TOL) -> ScalarMorphismReport:
    """Constant, or nonvanishing gradient at every sample.

    Reports ``|grad f|^2`` per sample (the factor of a real-valued morphism).
    Gradients below ``rank_rel_tol`` times the largest sampled gradient norm
    count as vanishing.  On one-dimensional path-ordered samples a sign change
    of ``f'`` between neighbours also counts, since a critical point lies
    between them.
    """
    pts = samples.points if isinstance(samples, SampleSet) else np.asarray(samples, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    grads = np.array([gradient(scalar_spec, x, chartM) for x in pts])
    lam = np.array([g @ chartM.gram_at(x) @ g for g, x in zip(grads, pts)])
    norms = np.sqrt(np.clip(lam, 0.0, None))
    top = float(norms.max()) if norms.size else 0.0
    if top == 0.0:
        return ScalarMorphismReport(True, "constant", lam, (), ())
    vanishing = tuple(int(i) for i in np.flatnonzero(norms <= tol.rank_rel_tol * top))
    brackets = []
    if pts.shape[1] == 1:
        d = grads[:, 0]
        for i in range(len(d) - 1):
            if i in vanishing or i + 1 in vanishing:
                continue
            if d[i] * d[i + 1] < 0:
                brackets.append((float(pts[i, 0]), float(pts[i + 1, 0])))
    ok = not vanishing and not brackets
    return ScalarMorphismReport(ok, "nonvanishing_gradient" if ok else "not_a_morphism", lam, vanishing,
                                tuple(brackets))
