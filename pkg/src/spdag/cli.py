"""Command line front end.

Four subcommands: ``learn`` runs the ordering search (or the matrix
factorization route), ``baseline`` runs a constraint-based skeleton
method, ``check`` evaluates an assumption against a candidate graph,
and ``simulate`` drives the seeded experiment grid.

Vertex labels in the output follow the input: a graph file written
1-based comes back 1-based, a sample CSV with a header row names the
columns, and bare covariance matrices fall back to 0-based indices.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import assumptions
from .baselines import pc_pattern, sgs_pattern
from .exceptions import CapacityError, DagTextError, NumericalError
from .graph import Dag, EquivClassPattern, load_dag_file
from .oracle import (
    TestConfig,
    caching_wrapper,
    dsep_backend,
    fisher_z_backend,
    gaussian_exact_backend,
    lambda_backend,
    load_covariance_csv,
    load_samples_csv,
)
from .sp import PERMUTATION_CAP, CHOL_TOL, sp_search, sp_search_cholesky
from .harness import config_from_file, run_grid, write_outputs

BACKENDS = ("dsep", "gaussian", "fisher", "lambda", "cholesky")

ASSUMPTIONS = {
    "markov": assumptions.check_markov,
    "smr": assumptions.check_smr,
    "adjacency": assumptions.check_adjacency_faithfulness,
    "orientation": assumptions.check_orientation_faithfulness,
    "restricted": assumptions.check_restricted_faithfulness,
    "triangle": assumptions.check_triangle_faithfulness,
    "sgs-min": assumptions.check_sgs_minimality,
    "p-min": assumptions.check_p_minimality,
}


class UsageError(ValueError):
    """Bad argument combination or unreadable input."""


def _covariance_names(path):
    """Column names from a covariance CSV header, if one is present."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or not any(f.strip() for f in row):
                continue
            try:
                [float(f) for f in row]
            except ValueError:
                return [f.strip() for f in row]
            return None
    return None


def _build_backend(args, *, allow_cholesky=False):
    """Resolve --backend/--input into (ci_backend_or_matrix, label_fn).

    The cholesky route returns the covariance itself since the search
    consumes the matrix, not a query interface.
    """
    kind = args.backend
    if kind == "cholesky" and not allow_cholesky:
        raise UsageError("--backend cholesky only applies to the learn command")
    if kind == "dsep":
        doc = load_dag_file(args.input)
        base = doc.label_base
        return dsep_backend(doc.dag), lambda v: v + base

    if kind == "fisher":
        data, names = load_samples_csv(args.input)
        if args.center:
            data = data - data.mean(axis=0)
        cfg = TestConfig(alpha=args.alpha)
        return fisher_z_backend(data, cfg), lambda v: names[v]

    sigma = load_covariance_csv(args.input)
    names = _covariance_names(args.input)
    label = (lambda v: names[v]) if names else (lambda v: v)
    if kind == "gaussian":
        tol = args.tol if args.tol is not None else None
        return gaussian_exact_backend(sigma, zero_tol=tol), label
    if kind == "lambda":
        if args.lam is None:
            raise UsageError("--backend lambda requires --lambda")
        return lambda_backend(sigma, args.lam), label
    return sigma, label  # cholesky


def _edge_list(edges, label):
    return [[label(j), label(k)] for j, k in sorted(edges)]


def _pattern_json(pat: EquivClassPattern, label):
    return {
        "skeleton": [[label(j), label(k)] for j, k in sorted(pat.skeleton)],
        "v_structures": [
            [label(j), label(mid), label(k)] for j, mid, k in sorted(pat.v_structures)
        ],
    }


def _subject_json(obj, label):
    """Witness subjects hold vertex indices, index tuples, sets, or DAGs."""
    if isinstance(obj, Dag):
        return {"edges": _edge_list(obj.edges, label)}
    if isinstance(obj, (frozenset, set)):
        return sorted((_subject_json(x, label) for x in obj), key=str)
    if isinstance(obj, (tuple, list)):
        return [_subject_json(x, label) for x in obj]
    if isinstance(obj, (int, np.integer)):
        return label(int(obj))
    return str(obj)


def _write_json(doc, out):
    text = json.dumps(doc, indent=2) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _search_json(result, label, wall_ms):
    return {
        "min_edges": result.min_edges,
        "winners": [_edge_list(g.edges, label) for g in result.ordered_winners()],
        "classes": [_pattern_json(c, label) for c in result.ordered_classes()],
        "unique_class": result.unique_class,
        "permutations_scanned": result.permutations_scanned,
        "wall_time_ms": round(wall_ms, 3),
    }


def cmd_learn(args) -> int:
    built, label = _build_backend(args, allow_cholesky=True)
    t0 = time.perf_counter()
    if args.backend == "cholesky":
        tol = args.tol if args.tol is not None else CHOL_TOL
        result = sp_search_cholesky(built, chol_tol=tol, max_p=args.max_p)
    else:
        result = sp_search(
            caching_wrapper(built), max_p=args.max_p, workers=args.threads
        )
    wall_ms = (time.perf_counter() - t0) * 1000.0
    _write_json(_search_json(result, label, wall_ms), args.out)
    kind = "class" if result.unique_class else "classes"
    print(
        f"minimum {result.min_edges} edges, {len(result.winners)} optimal "
        f"DAGs in {len(result.classes)} equivalence {kind} "
        f"({result.permutations_scanned} orderings scanned)"
    )
    return 0


def cmd_baseline(args) -> int:
    built, label = _build_backend(args)
    ci = caching_wrapper(built)
    t0 = time.perf_counter()
    pattern = sgs_pattern(ci) if args.method == "sgs" else pc_pattern(ci)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    doc = {
        "method": args.method,
        "min_edges": len(pattern.skeleton),
        "winners": [],
        "classes": [_pattern_json(pattern, label)],
        "unique_class": True,
        "permutations_scanned": 0,
        "wall_time_ms": round(wall_ms, 3),
    }
    _write_json(doc, args.out)
    print(
        f"{args.method} skeleton has {len(pattern.skeleton)} edges, "
        f"{len(pattern.v_structures)} v-structures"
    )
    return 0


def cmd_check(args) -> int:
    doc = load_dag_file(args.graph)
    label = lambda v: v + doc.label_base
    t0 = time.perf_counter()
    if args.assumption == "lambda-smr":
        if args.backend != "lambda":
            raise UsageError("--assumption lambda-smr requires --backend lambda")
        if args.lam is None:
            raise UsageError("--assumption lambda-smr requires --lambda")
        sigma = load_covariance_csv(args.input)
        report = assumptions.check_lambda_strong_smr(doc.dag, sigma, args.lam)
    else:
        built, _ = _build_backend(args)
        report = ASSUMPTIONS[args.assumption](doc.dag, caching_wrapper(built))
    wall_ms = (time.perf_counter() - t0) * 1000.0
    out = {
        "assumption": args.assumption,
        "holds": report.holds,
        "total_violations": report.total_violations,
        "witnesses": [
            {"subject": _subject_json(w.subject, label), "reason": w.reason}
            for w in report.witnesses
        ],
        "wall_time_ms": round(wall_ms, 3),
    }
    _write_json(out, args.out)
    verdict = "holds" if report.holds else f"fails ({report.total_violations} violations)"
    print(f"{args.assumption}: {verdict}")
    return 0


def cmd_simulate(args) -> int:
    cfg = config_from_file(args.config)
    result = run_grid(cfg, workers=args.threads)
    paths = write_outputs(result, args.out_dir)
    print(
        f"{len(result.records)} records over {len(result.cells)} cells "
        f"({len(result.skips)} skips) -> {args.out_dir}"
    )
    for name in ("trials", "aggregate", "summary"):
        print(f"  {paths[name]}")
    if paths["figures"]:
        print(f"  {len(paths['figures'])} figure panels")
    return 0


def _add_backend_args(sub, *, with_cholesky):
    choices = BACKENDS if with_cholesky else tuple(b for b in BACKENDS if b != "cholesky")
    sub.add_argument("--backend", required=True, choices=choices)
    sub.add_argument(
        "--input",
        required=True,
        help="graph file (dsep), sample CSV (fisher), or covariance CSV",
    )
    sub.add_argument(
        "--alpha", type=float, default=0.01, help="test size for the fisher backend"
    )
    sub.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=None,
        help="partial-correlation threshold for the lambda backend",
    )
    sub.add_argument(
        "--tol",
        type=float,
        default=None,
        help="zero tolerance (gaussian) or factor tolerance (cholesky)",
    )
    sub.add_argument(
        "--center",
        action="store_true",
        help="subtract column means before the fisher test (real data)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sp", description=__doc__.split("\n")[0])
    subs = parser.add_subparsers(dest="command", required=True)

    learn = subs.add_parser("learn", help="search all orderings for the sparsest DAGs")
    _add_backend_args(learn, with_cholesky=True)
    learn.add_argument("--max-p", type=int, default=PERMUTATION_CAP)
    learn.add_argument("--threads", type=int, default=1)
    learn.add_argument("--out", required=True, help="result JSON path ('-' for stdout)")
    learn.set_defaults(func=cmd_learn)

    base = subs.add_parser("baseline", help="run a constraint-based skeleton method")
    base.add_argument("--method", required=True, choices=("sgs", "pc"))
    _add_backend_args(base, with_cholesky=False)
    base.add_argument("--out", required=True, help="result JSON path ('-' for stdout)")
    base.set_defaults(func=cmd_baseline)

    check = subs.add_parser("check", help="test an assumption for a candidate graph")
    check.add_argument(
        "--assumption",
        required=True,
        choices=tuple(ASSUMPTIONS) + ("lambda-smr",),
    )
    check.add_argument("--graph", required=True, help="candidate DAG text file")
    _add_backend_args(check, with_cholesky=False)
    check.add_argument("--out", required=True, help="report JSON path ('-' for stdout)")
    check.set_defaults(func=cmd_check)

    sim = subs.add_parser("simulate", help="run a seeded recovery experiment grid")
    sim.add_argument("--config", required=True, help="key=value or JSON config file")
    sim.add_argument("--out-dir", required=True)
    sim.add_argument("--threads", type=int, default=1)
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        UsageError,
        DagTextError,
        CapacityError,
        NumericalError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
