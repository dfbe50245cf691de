"""Pointwise classification of smooth maps and the eikonal inequality.

Run with ``python3 demos/03_smooth_maps.py``.
"""
import math

import numpy as np

from confmorph import classify_point, eikonal_check
from confmorph import fixtures
from confmorph.expressions import parse_map
from confmorph.manifolds import PreconditionError, euclidean

# The exponential example in four variables: rank 2 everywhere, and
# exp(2 a_3) is one admissible factor among the interval (0, sigma_min^2].
ex8 = fixtures.get("example8")
for a in ([0.0, 0.0, 0.0, 0.0], [0.5, -0.3, 0.8, 0.1], [-1.0, 1.0, -1.0, 0.0]):
    c = classify_point(ex8.spec, a, ex8.chartM, ex8.chartN)
    print(f"a = {a}: rank {c.rank}, factors {c.analysis.factors.to_dict()}, "
          f"exp(2 a3) admissible: {c.analysis.factors.contains(math.exp(2 * a[2]))}")

# Eikonal inequality: factor * rank <= |df|_F^2, equality for a single cluster.
for name in ("example7", "example11-similarity", "example11-shear"):
    e = fixtures.get(name)
    x = np.full(e.spec.in_dim, 0.3)
    try:
        rec = eikonal_check(e.spec, x, e.chartM, e.chartN)
    except PreconditionError as err:
        print(f"{name:22s} no factor to test: {err}")
        continue
    print(f"{name:22s} lhs {rec.lhs:8.4f}  rhs {rec.rhs:8.4f}  equality {rec.equality}")

# Maps can also be typed in.  A rotation scaled by 3 is conformal everywhere.
spec = parse_map("f(x,y) = (3x - 0*y, 3y)")
c = classify_point(spec, [0.2, 0.4], euclidean(2), euclidean(2))
print("typed map flags:", {k: v for k, v in c.flags.items() if v})

# The identity of the upper half plane with metric (dx^2 + dy^2) / y^2 on both sides.
hyp = fixtures.get("hyperbolic-isometry")
c = classify_point(hyp.spec, [0.1, 1.0], hyp.chartM, hyp.chartN)
print("hyperbolic identity: factor", c.canonical_factor, "riemannian_map", c.flags["riemannian_map"])
