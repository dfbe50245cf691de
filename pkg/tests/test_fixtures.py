import numpy as np
import pytest

from confmorph import SampleSet, gallery, rank_scan
from confmorph import fixtures


def test_names_unique_and_lookup():
    names = [e.name for e in gallery()]
    assert len(names) == len(set(names))
    for required in ("example7", "example8", "example10-curve", "example11-similarity", "example12-curve",
                     "example12-diag", "example14-f", "example14-g", "example14-composite"):
        assert required in names
    with pytest.raises(KeyError):
        fixtures.get("example99")


@pytest.mark.parametrize("entry", gallery(), ids=lambda e: e.name)
def test_expected_classification(entry):
    axes = [(lo, hi, 101 if len(entry.box) == 1 else 5) for lo, hi in entry.box]
    rep = rank_scan(entry.spec, SampleSet.grid(axes), entry.chartM, entry.chartN)
    exp = entry.expected
    cls = rep.classifications
    assert rep.distinct_ranks == exp["ranks"]
    if exp.get("geometric") == "all":
        assert rep.all_geometric
    if exp.get("geometric") == "none":
        assert not any(c.analysis.is_geometric for c in cls)
    if "canonical_factor" in exp:
        np.testing.assert_allclose([c.canonical_factor for c in cls], exp["canonical_factor"], rtol=1e-10)
    for flag in ("conformal_riemannian_map", "riemannian_map", "isometric_immersion", "conformal_immersion"):
        if flag in exp:
            assert all(c.flags[flag] == exp[flag] for c in cls)
    if "locally_constant" in exp:
        assert rep.locally_constant == exp["locally_constant"]
    if "rank_drop_at" in exp:
        drops = [p[0] for p, r in rep.samples if r < max(exp["ranks"])]
        assert drops and all(abs(d - exp["rank_drop_at"]) <= 0.02 for d in drops)
    if entry.known_factor is not None:
        for c in cls:
            assert c.analysis.factors.contains(entry.known_factor(c.point), 1e-8), (entry.name, c.point)
