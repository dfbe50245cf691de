"""Parse ``f(x,y)=(2x, 3y)``-style map definitions into :class:`SmoothMapSpec`.

Components may use +, -, *, /, ^ or **, numeric constants, the coordinate
names and ``exp``.  Jacobians are differentiated symbolically.
"""
from __future__ import annotations

import re

import numpy as np
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from .manifolds import SmoothMapSpec

_TRANSFORMS = standard_transformations + (implicit_multiplication_application, convert_xor)
_HEADER = re.compile(r"^\s*([A-Za-z_]\w*)\s*\(([^)]*)\)\s*=\s*(.+)$", re.S)


class ExpressionError(ValueError):
    pass


def _split_components(body: str) -> list[str]:
    body = body.strip()
    if body.startswith("(") and body.endswith(")"):
        depth = 0
        for i, ch in enumerate(body):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(body) - 1:
                break
        else:
            body = body[1:-1]
    parts, depth, cur = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    parts.append(cur)
    parts = [p.strip() for p in parts]
    if not all(parts):
        raise ExpressionError("empty component in map definition")
    return parts


def parse_map(text: str) -> SmoothMapSpec:
    m = _HEADER.match(text)
    if not m:
        raise ExpressionError(f"expected 'name(x, y, ...) = (expr, ...)', got {text!r}")
    name, args, body = m.groups()
    names = [a.strip() for a in args.split(",") if a.strip()]
    if not names or len(set(names)) != len(names):
        raise ExpressionError("argument list must name distinct coordinates")
    syms = sympy.symbols(names, real=True)
    local = dict(zip(names, syms))
    local["exp"] = sympy.exp
    local["E"] = sympy.E
    comps = []
    for part in _split_components(body):
        try:
            expr = parse_expr(part, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
        except Exception as exc:
            raise ExpressionError(f"cannot parse component {part!r}: {exc}") from exc
        expr = sympy.sympify(expr)
        unknown = expr.free_symbols - set(syms)
        if unknown:
            raise ExpressionError(f"unknown symbols {sorted(map(str, unknown))} in {part!r}")
        funcs = {type(f) for f in expr.atoms(sympy.Function)}
        if funcs - {sympy.exp}:
            raise ExpressionError(f"only polynomials and exp are supported, got {part!r}")
        comps.append(expr)
    jac = sympy.Matrix(comps).jacobian(syms)
    f_num = sympy.lambdify([syms], comps, "numpy")
    j_num = sympy.lambdify([syms], jac, "numpy")
    out_dim, in_dim = len(comps), len(syms)

    def fmap(x):
        return np.array(f_num(list(x)), dtype=float).reshape(out_dim)

    def fjac(x):
        return np.array(j_num(list(x)), dtype=float).reshape(out_dim, in_dim)

    return SmoothMapSpec(fmap, in_dim, out_dim, fjac, name=text.strip())
