"""The generalized adjoint and the P, Q characterization.

Run with ``python3 demos/02_operators.py``.
"""
import numpy as np

from confmorph import (
    InnerSpace,
    MapBetween,
    SubspaceBasis,
    analyze,
    check_characterization,
    construct_conf_subspace,
    diamond,
    metric_adjoint,
    p_operator,
    q_operator,
)
from confmorph.operators import horizontal_space

T = MapBetween.euclidean([[2.0, 2.0, 0.0], [0.0, 0.0, 2.0]])

# Two different complements of the kernel, both conformal with factor 4.
H1 = SubspaceBasis.from_vectors([[1, 0, 0], [0, 0, 1]])
H2 = SubspaceBasis.from_vectors([[0, 1, 0], [0, 0, 1]])
for name, H in (("H1", H1), ("H2", H2)):
    P, Q = p_operator(T, H).matrix, q_operator(T, H).matrix
    print(name, "P =\n", P)
    print(name, "Q =\n", Q)
    p, q = check_characterization(T, H, 4.0)
    print(f"  P^2 = 4P: {p.passes} ({p.residual:.1e})   Q^2 = 4Q: {q.passes} ({q.residual:.1e})")

# On the orthogonal complement of the kernel the generalized adjoint is the
# ordinary metric adjoint, here (x, y) -> 2(x, x, y).
print("adjoint:\n", metric_adjoint(T).matrix)
print("diamond on ker-perp:\n", diamond(T, horizontal_space(T)).matrix)

# Same story with curved (SPD) inner products on both sides.
rng = np.random.default_rng(1)
A = rng.normal(size=(4, 4))
V = InnerSpace(A @ A.T + np.eye(4))
B = rng.normal(size=(3, 3))
W = InnerSpace(B @ B.T + np.eye(3))
M = MapBetween(rng.normal(size=(3, 2)) @ rng.normal(size=(2, 4)), V, W)
a = analyze(M)
print("random rank-2 map geometric:", a.is_geometric, "factors:", a.factors.to_dict())
if a.is_geometric:
    r = a.factors.canonical
    H = construct_conf_subspace(M, r)
    p, q = check_characterization(M, H, r)
    print(f"  residuals at r = {r:.4f}: P {p.residual:.1e}, Q {q.residual:.1e}")
