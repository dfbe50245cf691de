"""Command-line front end.

    confmorph analyze INPUT.json [--oracle] [--format json|csv] [--out PATH]
    confmorph classify (--map NAME | --expr "f(x,y)=(2x,3y)") [--grid SPEC]
    confmorph scan     (--map NAME | --expr ...) [--grid SPEC]
    confmorph gallery

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import fixtures as gallery_mod
from .expressions import ExpressionError, parse_map
from .geometric import FactorOutOfRange, analyze
from .linalg import (
    DependentBasis,
    InnerSpace,
    InvalidInnerSpace,
    MapBetween,
    SubspaceBasis,
    TolerancePolicy,
    frobenius_norm,
)
from .manifolds import (
    FLAG_NAMES,
    MapEvaluationError,
    PointClassification,
    PreconditionError,
    SampleSet,
    classify_samples,
    euclidean,
    scan_report,
)
from .operators import NotAComplement, check_characterization
from .oracle import MAX_ORACLE_DIM, oracle_is_geometric

SCHEMA_VERSION = "1.0"


class InputError(ValueError):
    pass


# --- input parsing -------------------------------------------------------------


def parse_matrix(obj) -> np.ndarray:
    rows = obj.get("rows") if isinstance(obj, dict) else obj
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and r for r in rows):
        raise InputError("matrix must be a non-empty list of non-empty rows")
    if len({len(r) for r in rows}) != 1:
        raise InputError("matrix rows have different lengths")
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix entries must be numbers: {exc}") from exc
    if not np.all(np.isfinite(a)):
        raise InputError("matrix entries must be finite")
    return a


def parse_space(obj, dim: int) -> InnerSpace:
    if obj is None or obj == "euclidean":
        return InnerSpace.euclidean(dim)
    if not isinstance(obj, dict):
        raise InputError("space must be an object {'dim': n, 'gram': rows | 'euclidean'}")
    if int(obj.get("dim", dim)) != dim:
        raise InputError(f"space dim {obj.get('dim')} does not match matrix dimension {dim}")
    gram = obj.get("gram", "euclidean")
    if gram == "euclidean":
        return InnerSpace.euclidean(dim)
    g = parse_matrix(gram)
    if g.shape != (dim, dim):
        raise InputError(f"gram shape {g.shape} does not match dim {dim}")
    return InnerSpace(g)


def load_analyze_input(data) -> tuple[MapBetween, Optional[SubspaceBasis], Optional[float]]:
    if not isinstance(data, dict):
        raise InputError("input must be a JSON object")
    A = parse_matrix(data["matrix"] if "matrix" in data else data)
    domain = parse_space(data.get("domain"), A.shape[1])
    codomain = parse_space(data.get("codomain"), A.shape[0])
    T = MapBetween(A, domain, codomain)
    H = None
    if data.get("H") is not None:
        vecs = data["H"]
        if not isinstance(vecs, list) or any(len(v) != A.shape[1] for v in vecs):
            raise InputError("H must be a list of domain vectors")
        H = SubspaceBasis.from_vectors(vecs, A.shape[1])
    lam = data.get("lambda")
    if (H is None) != (lam is None):
        raise InputError("'H' and 'lambda' must be given together")
    return T, H, None if lam is None else float(lam)


def parse_grid(text: str, dim: int, min_count: int = 1) -> list[tuple[float, float, int]]:
    """``"axis:min:max:count;..."`` (axis name optional); one entry is broadcast to all axes."""
    axes = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        parts = chunk.split(":")
        if len(parts) == 4:
            parts = parts[1:]
        if len(parts) != 3:
            raise InputError(f"bad grid axis {chunk!r}; expected axis:min:max:count")
        try:
            lo, hi, cnt = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InputError(f"bad grid axis {chunk!r}: {exc}") from exc
        if cnt < min_count:
            raise InputError(f"grid count must be >= {min_count}, got {cnt}")
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise InputError(f"bad grid range {lo}..{hi}")
        axes.append((lo, hi, cnt))
    if len(axes) == 1 and dim > 1:
        axes = axes * dim
    if len(axes) != dim:
        raise InputError(f"grid has {len(axes)} axes but the map has {dim} inputs")
    return axes


# --- output --------------------------------------------------------------------


def tolerances_dict(tol: TolerancePolicy) -> dict:
    return {"rank_rel_tol": tol.rank_rel_tol, "cluster_rel_tol": tol.cluster_rel_tol,
            "residual_tol": tol.residual_tol}


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return v


def point_row(c: PointClassification) -> dict:
    row = {f"x{i}": float(v) for i, v in enumerate(c.point)}
    f = c.analysis.factors.to_dict()
    row.update({
        "rank": c.rank,
        "nullity": c.nullity,
        "canonical_factor": c.canonical_factor,
        "factor_kind": f["kind"],
        "factor_upper": f["upper"],
    })
    row.update({k: c.flags[k] for k in FLAG_NAMES})
    e = c.eikonal
    row.update({
        "frobenius_sq": c.frobenius_sq,
        "eikonal_lhs": None if e is None else e.lhs,
        "eikonal_rhs": None if e is None else e.rhs,
        "eikonal_holds": None if e is None else e.holds,
        "eikonal_equality": None if e is None else e.equality,
    })
    return row


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


# --- commands ------------------------------------------------------------------


def cmd_analyze(args, tol: TolerancePolicy) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc
    T, H, lam = load_analyze_input(data)
    a = analyze(T, tol)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "tolerances": tolerances_dict(tol),
        "matrix": T.matrix.tolist(),
        "analysis": a.to_dict(),
        "frobenius_sq": frobenius_norm(T) ** 2,
    }
    if H is not None:
        report["operator_checks"] = [c.to_dict() for c in check_characterization(T, H, lam, tol)]
    if args.oracle:
        if T.domain.dim > MAX_ORACLE_DIM:
            raise InputError(f"--oracle needs domain dim <= {MAX_ORACLE_DIM}")
        o = oracle_is_geometric(T, tol, budget=args.budget, rng=args.seed)
        report["oracle"] = {"verdict": o.verdict, "residual": o.residual,
                            "factor": None if math.isnan(o.factor) else o.factor, "seed": args.seed}
    if args.format == "json":
        _emit(_dump(report), args.out)
    else:
        f = a.factors.to_dict()
        row = {"is_geometric": a.is_geometric, "rank": a.rank, "nullity": a.nullity,
               "sigma_min_multiplicity": a.sigma_min_multiplicity, "factor_kind": f["kind"],
               "factor_upper": f["upper"], "canonical_factor": f["canonical"],
               "frobenius_sq": report["frobenius_sq"]}
        row.update({f"sigma{i}": float(s) for i, s in enumerate(a.singular_values)})
        for c in report.get("operator_checks", []):
            row[f"{c['operator_name']}_residual"] = c["residual"]
            row[f"{c['operator_name']}_passes"] = c["passes"]
        _emit(to_csv([row]), args.out)
    return 0


def _resolve_map(args):
    if bool(args.map) == bool(args.expr):
        raise InputError("give exactly one of --map NAME or --expr DEFINITION")
    if args.map:
        try:
            entry = gallery_mod.get(args.map)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from exc
        spec, chartM, chartN, box = entry.spec, entry.chartM, entry.chartN, entry.box
        label = entry.name
    else:
        spec = parse_map(args.expr)
        chartM, chartN = euclidean(spec.in_dim), euclidean(spec.out_dim)
        box = None
        label = spec.name
    if args.fd_step is not None:
        spec = dataclasses.replace(spec, jacobian=None, fd_step=float(args.fd_step))
    return spec, chartM, chartN, box, label


def _samples(args, spec, box, min_count: int) -> tuple[SampleSet, list]:
    if args.grid:
        axes = parse_grid(args.grid, spec.in_dim, min_count)
    elif box is not None:
        axes = [(lo, hi, 5) for lo, hi in box]
    else:
        raise InputError("--grid is required for expression maps")
    return SampleSet.grid(axes), axes


def cmd_classify(args, tol: TolerancePolicy) -> int:
    spec, chartM, chartN, box, label = _resolve_map(args)
    samples, axes = _samples(args, spec, box, 1)
    cls = classify_samples(spec, samples, chartM, chartN, tol)
    rows = [point_row(c) for c in cls]
    if args.format == "csv":
        _emit(to_csv(rows), args.out)
        return 0
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "map": label,
        "tolerances": tolerances_dict(tol),
        "grid": [list(a) for a in axes],
        "records": rows,
        "summary": {
            "n_points": len(rows),
            "n_geometric": sum(r["geometric"] for r in rows),
            "distinct_ranks": sorted({r["rank"] for r in rows}),
        },
    }
    _emit(_dump(report), args.out)
    return 0


def cmd_scan(args, tol: TolerancePolicy) -> int:
    spec, chartM, chartN, box, label = _resolve_map(args)
    samples, axes = _samples(args, spec, box, 2)
    cls = classify_samples(spec, samples, chartM, chartN, tol)
    rep = scan_report(samples, cls)
    if args.format == "csv":
        _emit(to_csv([point_row(c) for c in cls]), args.out)
    else:
        d = rep.to_dict()
        d.update({"schema_version": SCHEMA_VERSION, "command": "scan", "map": label,
                  "tolerances": tolerances_dict(tol), "grid": [list(a) for a in axes]})
        _emit(_dump(d), args.out)
    print(rep.verdict_line(), file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_gallery(args, tol: TolerancePolicy) -> int:
    rows = [{"name": e.name, "in_dim": e.spec.in_dim, "out_dim": e.spec.out_dim, "description": e.description}
            for e in gallery_mod.gallery()]
    if args.format == "csv":
        _emit(to_csv(rows), args.out)
    else:
        _emit(_dump({"schema_version": SCHEMA_VERSION, "command": "gallery", "entries": rows}), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-10, help="relative rank threshold")
    common.add_argument("--tol-cluster", type=float, default=1e-8, help="relative singular-value cluster gap")
    common.add_argument("--tol-residual", type=float, default=1e-8, help="identity residual tolerance")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for the search oracle")

    ap = argparse.ArgumentParser(prog="confmorph", description="Conformal Riemannian morphism numerics")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="analyze a linear map read from JSON")
    p.add_argument("input")
    p.add_argument("--oracle", action="store_true", help="also run the search oracle")
    p.add_argument("--budget", type=int, default=8, help="oracle restarts")

    for name, helptext in (("classify", "classify a map at grid points"), ("scan", "rank scan over a grid")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--map", help="gallery name")
        p.add_argument("--expr", help="map definition, e.g. 'f(x,y)=(2x,3y)'")
        p.add_argument("--grid", help="'axis:min:max:count;...'")
        p.add_argument("--fd-step", type=float, default=None, help="use central differences with this step")

    sub.add_parser("gallery", parents=[common], help="list built-in example maps")
    return ap


COMMANDS = {"analyze": cmd_analyze, "classify": cmd_classify, "scan": cmd_scan, "gallery": cmd_gallery}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = TolerancePolicy(args.tol_rank, args.tol_cluster, args.tol_residual)
        return COMMANDS[args.command](args, tol)
    except (MapEvaluationError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (InputError, ExpressionError, InvalidInnerSpace, DependentBasis, NotAComplement,
            FactorOutOfRange, PreconditionError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
