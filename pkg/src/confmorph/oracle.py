"""Search-based check of the geometric-function definition for small maps.

Independent of the spectral decision rule in :mod:`confmorph.geometric`: it
parametrizes every complement of the kernel as a graph
``{x + M x : x in X}`` over a fixed complement ``X`` (with ``M: X -> ker T``)
and minimizes the conformality residual over ``(M, r)`` directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .linalg import DEFAULT_TOL, MapBetween, TolerancePolicy

MAX_ORACLE_DIM = 5


@dataclass(frozen=True)
class OracleResult:
    verdict: bool
    residual: float
    factor: float
    restarts_used: int

    def __iter__(self):
        # Unpacks as (verdict, residual).
        return iter((self.verdict, self.residual))


def _metric_orthonormal(B: np.ndarray, G: np.ndarray) -> np.ndarray:
    if B.shape[1] == 0:
        return B
    L = scipy.linalg.cholesky(B.T @ G @ B, lower=True)
    return scipy.linalg.solve_triangular(L, B.T, lower=True).T


def oracle_is_geometric(
    T: MapBetween,
    tol: TolerancePolicy = DEFAULT_TOL,
    budget: int = 8,
    rng: np.random.Generator | int | None = 0,
) -> OracleResult:
    """Minimize ``|S - r (G0 + M^T M)|_F / |S|_F`` over kernel graphs.

    ``S`` is the pulled-back Gram of ``T`` on a metric complement ``X`` of
    the kernel and ``G0`` the Gram of ``X``.  A verdict of ``True`` is a
    certificate; ``False`` only means no witness was found within ``budget``
    random restarts.
    """
    n = T.domain.dim
    if n > MAX_ORACLE_DIM:
        raise ValueError(f"oracle is limited to domain dim <= {MAX_ORACLE_DIM}, got {n}")
    rng = np.random.default_rng(rng)
    A = np.asarray(T.matrix)
    if not np.any(A):
        return OracleResult(True, 0.0, 1.0, 0)

    Gv, Gw = T.domain.gram, T.codomain.gram
    K = scipy.linalg.null_space(A, rcond=tol.rank_rel_tol)
    X = scipy.linalg.null_space(K.T @ Gv) if K.shape[1] else np.eye(n)
    K = _metric_orthonormal(K, Gv)
    d, k = K.shape[1], X.shape[1]

    TX = A @ X
    S = TX.T @ Gw @ TX
    G0 = X.T @ Gv @ X
    s_norm = np.linalg.norm(S)
    iu = np.triu_indices(k)

    def resid(p):
        M = p[:-1].reshape(d, k)
        return ((S - math.exp(p[-1]) * (G0 + M.T @ M)) / s_norm)[iu]

    best = (math.inf, math.nan)
    used = 0
    for attempt in range(max(1, budget)):
        used = attempt + 1
        M0 = rng.normal(scale=1.0 if attempt else 0.0, size=(d, k))
        A0 = G0 + M0.T @ M0
        r0 = max(np.trace(S) / np.trace(A0), 1e-300)
        p0 = np.append(M0.ravel(), math.log(r0))
        sol = scipy.optimize.least_squares(resid, p0, method="lm" if p0.size <= iu[0].size else "trf",
                                           xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        M = sol.x[:-1].reshape(d, k)
        r = math.exp(sol.x[-1])
        res = float(np.linalg.norm(S - r * (G0 + M.T @ M)) / s_norm)
        if res < best[0]:
            best = (res, r)
        if best[0] < 0.01 * tol.residual_tol:
            break
    return OracleResult(best[0] < tol.residual_tol, best[0], best[1], used)
