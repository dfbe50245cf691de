"""Rank scans over sample grids and real-valued morphisms.

Run with ``python3 demos/04_rank_scans.py``.
"""
from confmorph import SampleSet, rank_scan, scalar_morphism_check
from confmorph import fixtures
from confmorph.manifolds import euclidean

# f and g from the composite example are morphisms on their own; their
# composite x -> x^2 + x has a critical point at -1/2.
for name in ("example14-f", "example14-g", "example14-composite"):
    e = fixtures.get(name)
    grid = SampleSet.grid([(lo, hi, 101 if e.spec.in_dim == 1 else 11) for lo, hi in e.box])
    rep = rank_scan(e.spec, grid, e.chartM, e.chartN)
    print(f"{name:20s} {rep.verdict_line()}  ranks {sorted(rep.distinct_ranks)}")
    s = scalar_morphism_check(e.spec, grid, e.chartM) if e.spec.out_dim == 1 else None
    if s is not None and not s.is_morphism:
        where = [float(grid.points[i, 0]) for i in s.vanishing] or [0.5 * (a + b) for a, b in s.brackets]
        print(" " * 21, "gradient vanishes near", where)

# The curve t -> (t^3, t^6) is regular on its gallery box t > 0 but loses
# rank at t = 0, so a scan across the origin sees the rank change.
e = fixtures.get("example12-curve")
line = SampleSet.grid([(-1.0, 1.0, 41)])
rep = rank_scan(e.spec, line, euclidean(1), euclidean(2))
print("curve on [-1, 1]:", rep.verdict_line())
print("  rank changes between t =", [(round(float(line.points[i, 0]), 3), round(float(line.points[j, 0]), 3)) for i, j in rep.rank_changes])

# A map that is geometric everywhere on a 4-d grid, with a varying factor.
e = fixtures.get("example8")
rep = rank_scan(e.spec, SampleSet.grid([(-1.0, 1.0, 5)] * 4), e.chartM, e.chartN)
print("example8", rep.verdict_line(), "morphism consistent:", rep.morphism_consistent)
