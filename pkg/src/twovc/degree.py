"""Empirical check of the ML / REML degree bounds on generic (Gaussian) data."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateSpectrumError, ModelError, NoCriticalPointsError, ZeroPolynomialError
from .likelihood import has_between_signal
from .model import ModelSpec, check_genericity
from .roots import ThetaCheck, solution_count, theta_family_check  # noqa: F401  (re-exported)
from .spectral import EIG_TOL, SpectralSummary, reduce, sufficient_stats

DEGENERATE_TOL = 1e-12


def theoretical_bounds(summary: SpectralSummary, one_way_q: Optional[int] = None) -> dict:
    """General bounds ``2d + d0 - 4`` (ML) and ``2d - 3`` (REML), plus ``3q - 3`` / ``2q - 3`` for one-way layouts."""
    d, d0 = summary.d, summary.d0
    out = {"ml_bound": 2 * d + d0 - 4, "reml_bound": 2 * d - 3}
    if one_way_q is not None:
        q = one_way_q
        out["one_way_ml_bound"] = 3 * q - 3
        out["one_way_reml_bound"] = 2 * q - 3
        assert d0 <= q + 1 and d <= q, "one-way eigenvalue counts exceed q+1 / q"
        assert out["ml_bound"] <= out["one_way_ml_bound"]
        assert out["reml_bound"] <= out["one_way_reml_bound"]
    return out


@dataclass
class DegreeReport:
    model: dict
    mode: str
    replicates: int
    seed: int
    exact: bool
    counts: dict
    max_count: int
    bound: int
    general_bound: int
    degrees: dict
    max_degree: int
    violations: list = field(default_factory=list)
    degenerate_replicates: int = 0
    theta_solutions: int = 0
    multiple_root_replicates: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def _replicate(args):
    summary, mode, seed, index, exact = args
    rng = np.random.default_rng([seed, index])
    y = rng.standard_normal(summary.n)
    stats = sufficient_stats(y, summary.B, summary)
    total = stats.weighted_total(summary.nu)
    if not has_between_signal(summary, stats, DEGENERATE_TOL) or total <= 0.0:
        return index, None
    try:
        sc = solution_count(summary, stats, mode, exact)
    except (ZeroPolynomialError, DegenerateSpectrumError) as exc:
        return index, {"error": exc.code}
    except NoCriticalPointsError:
        return index, {"count": 0, "degree": 0, "theta": False, "multiple": False}
    return index, {"count": sc.count, "degree": sc.degree, "theta": sc.theta.has_solution,
                   "multiple": sc.has_multiple}


def degree_experiment(spec: ModelSpec, mode: str = "ml", replicates: int = 200, seed: int = 0,
                      exact: bool = True, workers: int = 1, eig_tol: float = EIG_TOL) -> DegreeReport:
    """Solution counts over ``replicates`` i.i.d. standard-normal data vectors.

    Replicate ``i`` draws from ``default_rng([seed, i])`` so results do not
    depend on ``workers``. A replicate whose between-eigenspace statistics
    all vanish is counted as degenerate and excluded.

    Raises:
        ModelError: the model fails the almost-sure existence condition for ``mode``.
    """
    mode = mode.lower()
    if replicates < 1:
        raise ModelError("E_REPS", "replicates must be >= 1")
    gen = check_genericity(spec)
    if mode == "ml" and not gen["ml_as"]:
        raise ModelError("E_GENERIC", "span([X, V]) is all of R^n: ML estimate fails to exist")
    if mode == "reml" and not gen["reml_as"]:
        raise ModelError("E_GENERIC", "span(MV) equals span(M): REML estimate fails to exist")

    summary = reduce(spec, rel_tol=eig_tol)
    q = spec.one_way.q if spec.one_way is not None else None
    bounds = theoretical_bounds(summary, q)
    general = bounds["ml_bound"] if mode == "ml" else bounds["reml_bound"]
    if q is not None:
        bound = bounds["one_way_ml_bound"] if mode == "ml" else bounds["one_way_reml_bound"]
    else:
        bound = general

    jobs = [(summary, mode, seed, i, exact) for i in range(replicates)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, jobs, chunksize=max(1, replicates // (4 * workers))))
    else:
        results = [_replicate(j) for j in jobs]

    counts: Counter = Counter()
    degrees: Counter = Counter()
    violations = []
    degenerate = theta = multiple = 0
    for index, res in results:
        if res is None:
            degenerate += 1
            continue
        if "error" in res:
            violations.append({"replicate": index, "kind": res["error"]})
            continue
        counts[res["count"]] += 1
        degrees[res["degree"]] += 1
        theta += int(res["theta"])
        multiple += int(res["multiple"])
        if res["count"] > bound:
            violations.append({"replicate": index, "kind": "count", "count": res["count"], "bound": bound})
        if res["degree"] > general:
            violations.append({"replicate": index, "kind": "degree", "degree": res["degree"], "bound": general})

    model = {"n": spec.n, "p": spec.p, **summary.metadata()}
    model.pop("eig_tol")
    if q is not None:
        model["group_sizes"] = list(spec.one_way.group_sizes)
        model["q"] = q
    return DegreeReport(
        model=model,
        mode=mode,
        replicates=replicates,
        seed=seed,
        exact=exact,
        counts={str(k): counts[k] for k in sorted(counts)},
        max_count=max(counts, default=0),
        bound=bound,
        general_bound=general,
        degrees={str(k): degrees[k] for k in sorted(degrees)},
        max_degree=max(degrees, default=0),
        violations=violations,
        degenerate_replicates=degenerate,
        theta_solutions=theta,
        multiple_root_replicates=multiple,
    )
