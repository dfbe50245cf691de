"""Geometric linear maps: detection, admissible factors, Conf subspaces.

Run with ``python3 demos/01_linear_maps.py``.
"""
import numpy as np

from confmorph import InnerSpace, MapBetween, analyze, construct_conf_subspace, oracle_is_geometric
from confmorph.geometric import conformality_residual

# f(x, y, z) = 2(x + y, z).  The kernel is spanned by (1, -1, 0).
T = MapBetween.euclidean([[2.0, 2.0, 0.0], [0.0, 0.0, 2.0]])
a = analyze(T)
print("singular values:", a.singular_values)
print("geometric:", a.is_geometric, "rank:", a.rank, "nullity:", a.nullity)
print("admissible factors:", a.factors.to_dict())

# Singular values are (2 sqrt 2, 2).  The one kernel direction is used up
# tilting the larger one down to 2, so the factor is pinned at 4.
C = construct_conf_subspace(T, 4.0)
print(f"Conf basis columns:\n{np.round(C.vectors, 4)}")
print("conformality residual:", conformality_residual(T, C, 4.0))

# With a second kernel direction every r in (0, 4] becomes admissible.
T2 = MapBetween.euclidean([[2.0, 2.0, 0.0, 0.0], [0.0, 0.0, 2.0, 0.0]])
print("with an extra kernel direction:", analyze(T2).factors.to_dict())
for r in (4.0, 1.0, 0.25):
    C = construct_conf_subspace(T2, r)
    print(f"  r = {r:4.2f}  residual {conformality_residual(T2, C, r):.1e}")

# diag(2, 3) has no kernel to absorb the mismatch, so it is not geometric.
D = MapBetween.euclidean(np.diag([2.0, 3.0]))
print("diag(2, 3) geometric:", analyze(D).is_geometric)

# ... unless the target metric makes the two axes equally long.
D_metric = MapBetween(np.diag([2.0, 3.0]), InnerSpace.euclidean(2), InnerSpace(np.diag([1.0, 4.0 / 9.0])))
print("with target Gram diag(1, 4/9):", analyze(D_metric).is_geometric, analyze(D_metric).factors.canonical)

# The optimisation oracle agrees, without looking at singular values.
for M in (T, D, D_metric):
    res = oracle_is_geometric(M, rng=0)
    print(f"oracle verdict {res.verdict!s:5}  residual {res.residual:.2e}")
