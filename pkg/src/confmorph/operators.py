"""Generalized adjoint of a map restricted to a kernel complement, and P/Q.

For a complement ``H`` of ``ker T`` the diamond operator is the adjoint of
``T|_H : H -> range(T)`` on the range, extended by zero on the range's
orthogonal complement.  With ``B`` a basis of ``H`` it has the closed form
``B (B^T G_V B)^-1 B^T T^T G_W``; the zero extension is automatic because
``B^T T^T G_W w = 0`` whenever ``w`` is orthogonal to ``range(T)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .linalg import (
    DEFAULT_TOL,
    MapBetween,
    SubspaceBasis,
    TolerancePolicy,
    basis_rank,
    kernel_basis,
    metric_svd,
    numerical_rank,
)


class NotAComplement(ValueError):
    """Supplied subspace is not a complement of the kernel."""


@dataclass(frozen=True)
class OperatorCheck:
    operator_name: str
    lam: float
    residual: float
    scale: float
    passes: bool

    def to_dict(self) -> dict:
        return {
            "operator_name": self.operator_name,
            "lambda": self.lam,
            "residual": self.residual,
            "scale": self.scale,
            "passes": self.passes,
        }


def check_complement(T: MapBetween, H: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL,
                     scale: Optional[float] = None) -> None:
    """Raise ``NotAComplement`` unless ``H (+) ker T`` is the whole domain."""
    n = T.domain.dim
    if H.ambient_dim != n:
        raise NotAComplement(f"H lives in dimension {H.ambient_dim}, domain has {n}")
    K = kernel_basis(T, tol, scale)
    if H.size + K.size != n:
        raise NotAComplement(f"dim H = {H.size} but codim ker T = {n - K.size}")
    stacked = SubspaceBasis(np.hstack([H.vectors, K.vectors]))
    if basis_rank(stacked, T.domain, tol) < n:
        raise NotAComplement("H meets ker T nontrivially")


def diamond(T: MapBetween, H: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL,
            scale: Optional[float] = None) -> MapBetween:
    """Adjoint of ``T|_H`` on ``range(T)``, zero on ``range(T)``'s orthogonal complement."""
    check_complement(T, H, tol, scale)
    m, n = T.shape
    if H.size == 0:
        return MapBetween(np.zeros((n, m)), T.codomain, T.domain)
    B = H.vectors
    gram_h = B.T @ T.domain.gram @ B
    rhs = B.T @ T.matrix.T @ T.codomain.gram
    coef = scipy.linalg.solve(gram_h, rhs, assume_a="pos")
    return MapBetween(B @ coef, T.codomain, T.domain)


def p_operator(T: MapBetween, H: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL,
               scale: Optional[float] = None) -> MapBetween:
    """``diamond(T, H) o T`` on the domain."""
    return diamond(T, H, tol, scale) @ T


def q_operator(T: MapBetween, H: SubspaceBasis, tol: TolerancePolicy = DEFAULT_TOL,
               scale: Optional[float] = None) -> MapBetween:
    """``T o diamond(T, H)`` on the codomain."""
    return T @ diamond(T, H, tol, scale)


def horizontal_space(T: MapBetween, tol: TolerancePolicy = DEFAULT_TOL,
                     scale: Optional[float] = None) -> SubspaceBasis:
    """Metric orthogonal complement of the kernel, ``ker(T)^perp``."""
    svd = metric_svd(T)
    return SubspaceBasis(svd.right_vectors[:, : numerical_rank(T, tol, scale)])


def _identity_check(name: str, op: np.ndarray, lam: float, tol: TolerancePolicy) -> OperatorCheck:
    sq = op @ op
    residual = float(np.linalg.norm(sq - lam * op))
    scale = float(max(1.0, np.linalg.norm(sq), np.linalg.norm(lam * op)))
    return OperatorCheck(name, float(lam), residual, scale, residual < tol.residual_tol * scale)


def check_characterization(T: MapBetween, H: SubspaceBasis, lam: float,
                           tol: TolerancePolicy = DEFAULT_TOL,
                           scale: Optional[float] = None) -> tuple[OperatorCheck, OperatorCheck]:
    """Residuals of ``P o P = lam P`` and ``Q o Q = lam Q`` for the given complement."""
    d = diamond(T, H, tol, scale)
    P = d.matrix @ T.matrix
    Q = T.matrix @ d.matrix
    return _identity_check("P", P, lam, tol), _identity_check("Q", Q, lam, tol)
