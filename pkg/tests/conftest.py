import numpy as np
import pytest
from scipy.stats import ortho_group

from confmorph import InnerSpace, MapBetween

ACCEPTANCE_LINES: list[str] = []


def random_spd(rng, n, floor=0.5):
    A = rng.normal(size=(n, n))
    return A @ A.T + floor * np.eye(n)


def random_orthogonal(rng, n):
    if n == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return ortho_group.rvs(n, random_state=rng)


def map_from_whitened(Aw, Gv, Gw):
    """Map whose whitened matrix (between metric-orthonormal frames) is ``Aw``."""
    V, W = InnerSpace(Gv), InnerSpace(Gw)
    return MapBetween(W.unwhiten(Aw) @ V.chol, V, W)


def map_from_spectrum(rng, m, n, sigma, Gv=None, Gw=None):
    """Random map with prescribed metric singular values (padded with zeros)."""
    Gv = random_spd(rng, n) if Gv is None else Gv
    Gw = random_spd(rng, m) if Gw is None else Gw
    S = np.zeros((m, n))
    for i, s in enumerate(sigma):
        S[i, i] = s
    Aw = random_orthogonal(rng, m) @ S @ random_orthogonal(rng, n).T
    return map_from_whitened(Aw, Gv, Gw)


def random_geometric(rng, max_dim=5, one_cluster=None):
    """Random map that is geometric by construction, with its spectrum."""
    while True:
        n = int(rng.integers(1, max_dim + 1))
        m = int(rng.integers(1, max_dim + 1))
        k = int(rng.integers(1, min(m, n) + 1))
        nullity = n - k
        lo_mult = max(1, k - nullity)
        mult = k if one_cluster else int(rng.integers(lo_mult, k + 1))
        if one_cluster is False and mult == k:
            if k - 1 < lo_mult:
                continue
            mult = int(rng.integers(lo_mult, k))
        smin = rng.uniform(0.5, 2.0)
        above = np.sort(smin * (1 + rng.uniform(0.1, 2.0, size=k - mult)))[::-1]
        sigma = np.concatenate([above, np.full(mult, smin)])
        return map_from_spectrum(rng, m, n, sigma), sigma


def random_non_geometric(rng, max_dim=5):
    """Random map with more singular clusters above the minimum than kernel dimensions."""
    while True:
        n = int(rng.integers(2, max_dim + 1))
        m = int(rng.integers(2, max_dim + 1))
        k = int(rng.integers(1, min(m, n) + 1))
        if k - 1 <= n - k:
            continue
        gaps = rng.uniform(0.1, 1.0, size=k)
        sigma = np.cumsum(gaps)[::-1] + 0.3
        return map_from_spectrum(rng, m, n, sigma), sigma


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
