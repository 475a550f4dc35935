"""Global ML / REML fits: every interior critical point against the ``s1 = 0`` boundary."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ModelError, NoCriticalPointsError, ZeroPolynomialError
from .likelihood import boundary_sigma2, has_between_signal, loglik, relative_residuals
from .model import ModelSpec, VariancePoint, check_ml_existence, check_reml_existence
from .roots import BOUNDARY, INTERIOR, CandidateSolution, solve, theta_family_check
from .spectral import EIG_TOL, SpectralSummary, distinct_eigen, reduce, sufficient_stats

log = logging.getLogger(__name__)

TIE_TOL = 1e-10


@dataclass(frozen=True)
class FitConfig:
    eig_tol: float = EIG_TOL
    rank_tol: float = 1e-8
    root_tol: float = 1e-6
    exact: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class FitResult:
    mode: str
    s_hat: Optional[VariancePoint]
    beta_hat: Optional[np.ndarray]
    loglik: Optional[float]
    candidates: list[CandidateSolution]
    boundary_value: Optional[float]
    existence_check: bool
    existence: dict
    diagnostics: dict = field(default_factory=dict)
    reason: Optional[str] = None

    @property
    def exists(self) -> bool:
        return self.s_hat is not None

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "s_hat": self.s_hat.as_dict() if self.s_hat is not None else None,
            "beta_hat": None if self.beta_hat is None else [float(b) for b in self.beta_hat],
            "loglik": self.loglik,
            "boundary_value": self.boundary_value,
            "existence": self.existence,
            "reason": self.reason,
            "degree_info": {k: self.diagnostics.get(k) for k in ("poly_degree", "bound", "n_solutions")},
            "candidates": [c.as_dict() for c in self.candidates],
            "diagnostics": {k: v for k, v in self.diagnostics.items()
                            if k not in ("poly_degree", "bound", "n_solutions")},
        }


def _mode(mode: str) -> str:
    mode = mode.lower()
    if mode not in ("ml", "reml"):
        raise ModelError("E_MODE", f"unknown mode {mode!r}")
    return mode


def gls_beta(s: VariancePoint, y, spec: ModelSpec, summary: Optional[SpectralSummary] = None) -> np.ndarray:
    """``(X' S^-1 X)^-1 X' S^-1 y`` with ``S = s1 V + s2 I``, via the eigenspaces of ``V``."""
    s.require_admissible()
    y = np.asarray(y, dtype=float).ravel()
    if summary is not None:
        blocks = zip(summary.alpha, summary.v_bases)
    else:
        blocks = ((b.value, b.basis) for b in distinct_eigen(spec.V))
    X = spec.X
    XtSX = np.zeros((spec.p, spec.p))
    XtSy = np.zeros(spec.p)
    for a, U in blocks:
        w = 1.0 / (a * s.sigma1_sq + s.sigma2_sq)
        UX = U.T @ X
        XtSX += w * UX.T @ UX
        XtSy += w * UX.T @ (U.T @ y)
    return np.linalg.solve(XtSX, XtSy)


def simulate(spec: ModelSpec, beta, s: VariancePoint, seed) -> np.ndarray:
    """Draw ``y = X beta + L u + s2^(1/2) eps`` with ``L L' = s1 V``."""
    s.require_admissible()
    beta = np.zeros(spec.p) if beta is None else np.asarray(beta, dtype=float).ravel()
    if beta.shape[0] != spec.p:
        raise ModelError("E_DIM", f"beta has length {beta.shape[0]}, expected {spec.p}")
    rng = np.random.default_rng(seed)
    w, U = np.linalg.eigh(spec.V)
    L = U * np.sqrt(s.sigma1_sq * np.clip(w, 0.0, None))
    u = rng.standard_normal(spec.n)
    eps = rng.standard_normal(spec.n)
    return spec.X @ beta + L @ u + np.sqrt(s.sigma2_sq) * eps


def fit(y, spec: ModelSpec, mode: str = "ml", config: FitConfig = FitConfig(),
        B: Optional[np.ndarray] = None) -> FitResult:
    """Global maximiser of the ML or REML likelihood over ``s1 >= 0, s2 > 0``.

    Interior candidates are the real roots in ``[0, 1)`` of the critical-point
    polynomial; they compete with the best point on ``s1 = 0``. Ties within
    1e-10 go to the interior point.
    """
    mode = _mode(mode)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != spec.n:
        raise ModelError("E_DIM", f"y has length {y.shape[0]}, expected {spec.n}")
    existence = {
        "ml_condition": check_ml_existence(y, spec, config.rank_tol),
        "reml_condition": check_reml_existence(y, spec, config.rank_tol),
    }
    key = "ml_condition" if mode == "ml" else "reml_condition"
    if not existence[key]:
        reason = ("y lies in span([X, V])" if mode == "ml" else "My lies in span(MV)")
        return FitResult(mode, None, None, None, [], None, False, existence, reason=reason)

    summary = reduce(spec, B=B, rel_tol=config.eig_tol)
    stats = sufficient_stats(y, summary.B, summary)
    diag: dict = {"spectrum": summary.metadata(), "T": list(stats.T)}
    if mode == "ml":
        diag["bound"] = 2 * summary.d + summary.d0 - 4
    else:
        diag["bound"] = 2 * summary.d - 3

    s_b = VariancePoint(0.0, boundary_sigma2(summary, stats, mode))
    l_b = loglik(s_b, summary, stats, mode)
    boundary = CandidateSolution(0.0j, complex(s_b.sigma_sq), (0j, complex(s_b.sigma2_sq)), BOUNDARY,
                                 relative_residuals(0.0, s_b.sigma2_sq, summary, stats, mode))

    cands: list[CandidateSolution] = []
    if has_between_signal(summary, stats):
        try:
            poly, cands = solve(summary, stats, mode, config.exact, config.root_tol)
            diag["poly_degree"] = poly.degree
            diag["degree_flag"] = poly.degree_flag
        except NoCriticalPointsError:
            diag["poly_degree"] = 0
        except ZeroPolynomialError:
            diag["poly_degree"] = -1
            diag["warning"] = "polynomial identically zero: non-generic data"
        diag["n_solutions"] = sum(1 for c in cands if c.is_solution())
        diag["theta_check"] = theta_family_check(summary, stats, mode).as_dict()
    else:
        diag["poly_degree"] = None
        diag["n_solutions"] = 0
        diag["note"] = "T_i = 0 for all i < d: boundary-only path"

    best_s, best_l, tie = s_b, l_b, False
    for c in cands:
        if c.classification != INTERIOR:
            continue
        s = VariancePoint(max(c.s[0].real, 0.0), c.s[1].real)
        val = loglik(s, summary, stats, mode)
        if val > best_l + TIE_TOL or (best_s is s_b and abs(val - best_l) <= TIE_TOL):
            tie = best_s is s_b and abs(val - best_l) <= TIE_TOL
            best_s, best_l = s, val
    diag["tie"] = tie
    diag["winner"] = "boundary" if best_s is s_b else "interior"
    if best_s.sigma2_sq < 1e-12 * stats.weighted_total(summary.nu):
        diag["warning"] = "best point has sigma2_sq near 0"
        log.warning("best candidate has sigma2_sq %.3e", best_s.sigma2_sq)

    beta = gls_beta(best_s, y, spec, summary)
    return FitResult(mode, best_s, beta, float(best_l), cands + [boundary], float(l_b), True, existence, diag)
