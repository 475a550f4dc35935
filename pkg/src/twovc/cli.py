"""Command-line front end: ``twovc fit | simulate | degree``.

Inputs are headerless numeric CSV files. Results are printed (or written to
``--out``) as a single JSON document. Exit codes: 0 success, 1 input error,
2 estimate does not exist (``fit`` only).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .degree import degree_experiment
from .errors import TwoVCError
from .estimator import FitConfig, fit, simulate
from .model import ModelSpec, VariancePoint, build_one_way_model
from .oracle import dense_objective, grid_refine_mle
from .spectral import EIG_TOL, reduce, sufficient_stats

EXIT_OK, EXIT_INPUT, EXIT_NONEXISTENT = 0, 1, 2


class InputError(TwoVCError):
    pass


def read_matrix(path) -> np.ndarray:
    try:
        A = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise InputError("E_READ", f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise InputError("E_PARSE", f"{path}: {exc}") from None
    if not np.all(np.isfinite(A)):
        raise InputError("E_PARSE", f"{path}: non-finite entries")
    return A


def read_vector(path) -> np.ndarray:
    A = read_matrix(path)
    if min(A.shape) != 1:
        raise InputError("E_DIM", f"{path}: expected a single row or column, got {A.shape}")
    return A.ravel()


def parse_groups(text: str) -> list[int]:
    """Group sizes from ``"2,2,3"`` or from a file holding such a line."""
    if Path(text).is_file():
        text = Path(text).read_text().strip()
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise InputError("E_GROUPS", f"cannot parse group sizes {text!r}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InputError("E_PARSE", f"cannot parse numbers {text!r}") from None


def _design(arg, n):
    if arg is None or arg == "ones":
        return np.ones((n, 1))
    return read_matrix(arg)


def _groups_from_incidence(Z):
    """Group sizes if ``Z`` is a contiguous 0/1 block incidence matrix, else None."""
    if not np.all((Z == 0) | (Z == 1)) or not np.all(Z.sum(axis=1) == 1):
        return None
    labels = Z.argmax(axis=1)
    if np.any(np.diff(labels) < 0) or len(np.unique(labels)) != Z.shape[1]:
        return None
    return [int(k) for k in Z.sum(axis=0)]


def build_model(args) -> ModelSpec:
    sources = [a for a in (args.v, args.z, args.groups) if a is not None]
    if len(sources) != 1:
        raise InputError("E_ARGS", "give exactly one of --v, --z, --groups")
    xarg = args.x if args.x is not None else args.w
    if args.x is not None and args.w is not None:
        raise InputError("E_ARGS", "--x and --w are aliases; give only one")
    if args.groups is not None:
        sizes = parse_groups(args.groups)
        return build_one_way_model(sizes, _design(xarg, sum(sizes)))
    if args.z is not None:
        Z = read_matrix(args.z)
        sizes = _groups_from_incidence(Z)
        X = _design(xarg, Z.shape[0])
        if sizes is not None and len(sizes) >= 2:
            return build_one_way_model(sizes, X)
        return ModelSpec(X, Z @ Z.T)
    V = read_matrix(args.v)
    return ModelSpec(_design(xarg, V.shape[0]), V)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return None if math.isnan(obj) or math.isinf(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit(doc: dict, out) -> None:
    text = json.dumps(_clean(doc), indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    spec = build_model(args)
    y = read_vector(args.y)
    config = FitConfig(eig_tol=args.eig_tol, rank_tol=args.rank_tol, root_tol=args.root_tol, exact=args.exact)
    res = fit(y, spec, args.mode, config)
    doc = res.as_dict()
    doc["tolerances"] = config.as_dict()
    if args.oracle and res.exists:
        summary = reduce(spec, rel_tol=config.eig_tol)
        stats = sufficient_stats(y, summary.B, summary)
        o = grid_refine_mle(stats, summary, args.mode)
        doc["oracle"] = {
            "s_hat": o.as_dict(),
            "loglik_gap": dense_objective(res.s_hat, y, spec, args.mode) - dense_objective(o, y, spec, args.mode),
        }
    _emit(doc, args.out)
    return EXIT_OK if res.exists else EXIT_NONEXISTENT


def cmd_simulate(args) -> int:
    spec = build_model(args)
    beta = parse_floats(args.beta) if args.beta else None
    y = simulate(spec, beta, VariancePoint(args.sigma1_sq, args.sigma2_sq), args.seed)
    text = "\n".join(repr(float(v)) for v in y) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_degree(args) -> int:
    spec = build_model(args)
    rep = degree_experiment(spec, args.mode, args.reps, args.seed, exact=not args.float,
                            workers=args.workers, eig_tol=args.eig_tol)
    _emit(rep.as_dict(), args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INPUT, f"error E_ARGS: {message}\n")


def _model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--x", help="design matrix CSV, or 'ones' for an intercept-only design")
    g.add_argument("--w", help="alias of --x for the one-way layout")
    g.add_argument("--v", help="random-effect kernel V as CSV")
    g.add_argument("--z", help="random-effect factor Z as CSV (V = Z Z')")
    g.add_argument("--groups", help="one-way group sizes, e.g. '2,2,3', or a file with that line")
    g.add_argument("--eig-tol", type=float, default=EIG_TOL, help="relative eigenvalue grouping tolerance")
    g.add_argument("--out", help="output path (default: stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twovc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="global ML or REML estimate")
    _model_args(p)
    p.add_argument("--y", required=True, help="response vector CSV")
    p.add_argument("--mode", choices=("ml", "reml"), default="ml")
    p.add_argument("--rank-tol", type=float, default=1e-8)
    p.add_argument("--root-tol", type=float, default=1e-6, help="spurious-root residual threshold")
    p.add_argument("--exact", action="store_true", help="build the polynomial in exact rational arithmetic")
    p.add_argument("--oracle", action="store_true", help="cross-check against the grid oracle")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="draw y from the model")
    _model_args(p)
    p.add_argument("--beta", help="comma-separated fixed effects (default zeros)")
    p.add_argument("--sigma1-sq", type=float, default=1.0)
    p.add_argument("--sigma2-sq", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("degree", help="solution counts over generic replicates")
    _model_args(p)
    p.add_argument("--mode", choices=("ml", "reml"), default="ml")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--float", action="store_true", help="float polynomial instead of exact rational")
    p.set_defaults(func=cmd_degree)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TwoVCError as exc:
        print(f"error {exc.code}: {exc.args[0]}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"error E_ASSERT: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
