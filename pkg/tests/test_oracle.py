import numpy as np
import pytest

from confmorph import InnerSpace, MapBetween, TolerancePolicy, analyze, oracle_is_geometric

from conftest import random_spd
from test_linalg import EX7


def test_example7_certified():
    res = oracle_is_geometric(MapBetween.euclidean(EX7))
    assert res.verdict and res.residual < 1e-8
    assert res.factor == pytest.approx(4.0, rel=1e-6)


@pytest.mark.parametrize("budget", [1, 4, 16])
def test_diag_never_certified(budget):
    T = MapBetween.euclidean(np.diag([2.0, 3.0]))
    verdict, residual = oracle_is_geometric(T, budget=budget, rng=budget)
    assert not verdict
    # best r for S = diag(4, 9) against I is 6.5 with residual |(-2.5, 2.5)| / |(4, 9)|
    assert residual == pytest.approx(np.hypot(2.5, 2.5) / np.hypot(4, 9), rel=1e-6)
    assert not analyze(T).is_geometric


def test_zero_map():
    assert oracle_is_geometric(MapBetween.euclidean(np.zeros((2, 2)))).verdict


def test_dimension_limit():
    with pytest.raises(ValueError):
        oracle_is_geometric(MapBetween.euclidean(np.ones((1, 6))))


def test_seeded_reproducible():
    rng = np.random.default_rng(3)
    T = MapBetween(rng.normal(size=(3, 4)), InnerSpace(random_spd(rng, 4)), InnerSpace(random_spd(rng, 3)))
    a = oracle_is_geometric(T, rng=7)
    b = oracle_is_geometric(T, rng=7)
    assert a == b


def test_agreement_small_sample(rng):
    tol = TolerancePolicy()
    for _ in range(60):
        m, n = rng.integers(1, 5, size=2)
        T = MapBetween(rng.uniform(-2, 2, (m, n)), InnerSpace(random_spd(rng, n)), InnerSpace(random_spd(rng, m)))
        a = analyze(T, tol)
        if a.spectral_margin < 10 * tol.cluster_rel_tol:
            continue
        assert oracle_is_geometric(T, tol, rng=rng).verdict == a.is_geometric
