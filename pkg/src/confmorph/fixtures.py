"""Named example maps with their expected classifications."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .manifolds import ChartManifold, SmoothMapSpec, euclidean


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    spec: SmoothMapSpec
    chartM: ChartManifold
    chartN: ChartManifold
    box: tuple[tuple[float, float], ...]
    description: str
    expected: dict = field(default_factory=dict)
    # Pointwise factor the map is known to have, e.g. exp(2 a_3) for example8.
    known_factor: Optional[Callable[[np.ndarray], float]] = None


def _example7(lam: float = 2.0) -> GalleryEntry:
    A = lam * np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    spec = SmoothMapSpec(lambda x: A @ x, 3, 2, lambda x: A, name="example7")
    box = ((-1.0, 1.0),) * 3
    return GalleryEntry(
        "example7", spec, euclidean(3), euclidean(2), box,
        f"f(x,y,z) = {lam:g}(x+y, z); two different Conf subspaces",
        {"geometric": "all", "ranks": {2}, "canonical_factor": lam**2, "conformal_riemannian_map": False},
        lambda a: lam**2,
    )


def _ex8_map(x):
    e = math.exp(x[2])
    return np.array([e * (x[0] - x[1]), 0.0, 0.0, e * (x[3] - x[1])])


def _ex8_jac(x):
    a1, a2, a3, a4 = x
    e = math.exp(a3)
    return np.array([
        [e, -e, e * (a1 - a2), 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, -e, e * (a4 - a2), e],
    ])


def _curve(x):
    t = x[0]
    return np.array([t**3, t**6])


def _curve_jac(x):
    t = x[0]
    return np.array([[3 * t**2], [6 * t**5]])


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _linear(name, A, description, expected, known=None) -> GalleryEntry:
    A = np.asarray(A, dtype=float)
    spec = SmoothMapSpec(lambda x: A @ x, A.shape[1], A.shape[0], lambda x: A, name=name)
    box = ((-1.0, 1.0),) * A.shape[1]
    return GalleryEntry(name, spec, euclidean(A.shape[1]), euclidean(A.shape[0]), box, description, expected, known)


def _hyperbolic(dim: int = 2) -> ChartManifold:
    return ChartManifold(dim, lambda x: np.eye(dim) / x[-1] ** 2, ((-1.0, 1.0), (0.5, 2.0)))


def _build() -> dict[str, GalleryEntry]:
    entries = [
        _example7(),
        GalleryEntry(
            "example8",
            SmoothMapSpec(_ex8_map, 4, 4, _ex8_jac, name="example8"),
            euclidean(4), euclidean(4), ((-1.0, 1.0),) * 4,
            "f(x) = (e^{x3}(x1-x2), 0, 0, e^{x3}(x4-x2)); Conf not orthogonal to the kernel",
            {"geometric": "all", "ranks": {2}},
            lambda a: math.exp(2 * a[2]),
        ),
        GalleryEntry(
            "example10-curve",
            SmoothMapSpec(_curve, 1, 2, _curve_jac, name="example10-curve"),
            euclidean(1, ((0.25, 2.0),)), euclidean(2), ((0.25, 2.0),),
            "regular curve c(t) = (t^3, t^6) on t > 0; factor |c'(t)|^2",
            {"geometric": "all", "ranks": {1}, "conformal_immersion": True},
            lambda t: 9 * t[0] ** 4 + 36 * t[0] ** 10,
        ),
        _linear("example11-similarity", 3.0 * _rotation(0.7),
                "3 times a rotation: a linear isomorphism that is geometric",
                {"geometric": "all", "ranks": {2}, "canonical_factor": 9.0, "conformal_riemannian_map": True},
                lambda a: 9.0),
        _linear("example11-shear", [[1.0, 1.0], [0.0, 1.0]],
                "shear: a linear isomorphism that is not a multiple of an orthogonal map",
                {"geometric": "none", "ranks": {2}}),
        GalleryEntry(
            "example12-curve",
            SmoothMapSpec(_curve, 1, 2, _curve_jac, name="example12-curve"),
            euclidean(1, ((0.25, 2.0),)), euclidean(2), ((0.25, 2.0),),
            "c(t) = (t^3, t^6) on t > 0: a morphism that is not harmonic",
            {"geometric": "all", "ranks": {1}},
            lambda t: 9 * t[0] ** 4 + 36 * t[0] ** 10,
        ),
        _linear("example12-diag", [[2.0, 0.0], [0.0, 3.0]],
                "f(x,y) = (2x, 3y): harmonic but not geometric anywhere",
                {"geometric": "none", "ranks": {2}}),
        GalleryEntry(
            "example14-f",
            SmoothMapSpec(lambda x: np.array([x[0] ** 2 + x[0], x[0] ** 2]), 1, 2,
                          lambda x: np.array([[2 * x[0] + 1], [2 * x[0]]]), name="example14-f"),
            euclidean(1), euclidean(2), ((-1.0, 1.0),),
            "f(x) = (x^2 + x, x^2): a regular curve",
            {"geometric": "all", "ranks": {1}},
            lambda x: (2 * x[0] + 1) ** 2 + 4 * x[0] ** 2,
        ),
        _linear("example14-g", [[1.0, 0.0]], "g(x,y) = x: a Riemannian map",
                {"geometric": "all", "ranks": {1}, "canonical_factor": 1.0, "riemannian_map": True},
                lambda a: 1.0),
        GalleryEntry(
            "example14-composite",
            SmoothMapSpec(lambda x: np.array([x[0] ** 2 + x[0]]), 1, 1,
                          lambda x: np.array([[2 * x[0] + 1]]), name="example14-composite"),
            euclidean(1), euclidean(1), ((-1.0, 1.0),),
            "g o f (x) = x^2 + x: derivative vanishes at -1/2, not a morphism",
            {"ranks": {0, 1}, "rank_drop_at": -0.5, "locally_constant": False},
        ),
        _linear("scalar-linear", [[1.0, 0.0]], "f(x,y) = x: unit gradient",
                {"geometric": "all", "ranks": {1}, "canonical_factor": 1.0}, lambda a: 1.0),
        GalleryEntry(
            "scalar-radial",
            SmoothMapSpec(lambda x: np.array([math.hypot(x[0], x[1])]), 2, 1,
                          lambda x: (np.asarray(x) / math.hypot(x[0], x[1]))[None, :], name="scalar-radial"),
            euclidean(2, ((0.5, 2.0), (0.5, 2.0))), euclidean(1), ((0.5, 2.0), (0.5, 2.0)),
            "distance from the origin: unit gradient away from 0",
            {"geometric": "all", "ranks": {1}, "canonical_factor": 1.0, "riemannian_map": True},
            lambda a: 1.0,
        ),
        GalleryEntry(
            "scalar-quadratic",
            SmoothMapSpec(lambda x: np.array([0.5 * float(np.dot(x, x))]), 2, 1,
                          lambda x: np.asarray(x, dtype=float)[None, :], name="scalar-quadratic"),
            euclidean(2), euclidean(1), ((-1.0, 1.0), (-1.0, 1.0)),
            "|x|^2 / 2: gradient vanishes at the origin",
            {"ranks": {0, 1}, "locally_constant": False},
        ),
        GalleryEntry(
            "constant",
            SmoothMapSpec(lambda x: np.array([1.0, -2.0]), 2, 2, lambda x: np.zeros((2, 2)), name="constant"),
            euclidean(2), euclidean(2), ((-1.0, 1.0), (-1.0, 1.0)),
            "constant map: rank 0 everywhere",
            {"geometric": "all", "ranks": {0}},
        ),
        GalleryEntry(
            "hyperbolic-isometry",
            SmoothMapSpec(lambda x: np.asarray(x, dtype=float), 2, 2, lambda x: np.eye(2), name="hyperbolic-isometry"),
            _hyperbolic(), _hyperbolic(), ((-1.0, 1.0), (0.5, 2.0)),
            "identity of the upper half-plane with metric I / y^2",
            {"geometric": "all", "ranks": {2}, "canonical_factor": 1.0, "isometric_immersion": True},
            lambda a: 1.0,
        ),
    ]
    return {e.name: e for e in entries}


_GALLERY = _build()


def gallery() -> list[GalleryEntry]:
    return list(_GALLERY.values())


def gallery_names() -> list[str]:
    return list(_GALLERY)


def get(name: str) -> GalleryEntry:
    try:
        return _GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown gallery entry {name!r}; known: {', '.join(_GALLERY)}") from None


def example7(lam: float = 2.0) -> GalleryEntry:
    return _example7(lam)
