"""Brute-force reference computations.

Nothing here touches the polynomial path: likelihoods are evaluated from
dense matrices and the optimum is located by a grid scan over ``rho`` with
golden-section refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import ModelSpec, VariancePoint
from .spectral import SpectralSummary, SufficientStats

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleConfig:
    rho_grid_points: int = 4096
    refine_iters: int = 80
    dense_tol: float = 1e-10

    def __post_init__(self):
        if self.rho_grid_points < 64:
            raise ValueError("rho_grid_points must be >= 64")


def _concentrated(rho, summary: SpectralSummary, stats: SufficientStats, mode: str):
    """Objective in ``rho`` with ``sigma_sq`` replaced by its closed-form optimum."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    m = np.asarray(summary.m)[:, None]
    nu = np.asarray(summary.nu, dtype=float)[:, None]
    T = np.asarray(stats.T)[:, None]
    phi_m = (m - 1.0) * rho[None, :] + 1.0
    quad = np.sum(nu * T / phi_m, axis=0)
    if mode == "ml":
        N = summary.n
        a = np.asarray(summary.alpha)[:, None]
        k = np.asarray(summary.s_mult, dtype=float)[:, None]
        logdet = np.sum(k * np.log((a - 1.0) * rho[None, :] + 1.0), axis=0)
    else:
        N = summary.n - summary.p
        logdet = np.sum(nu * np.log(phi_m), axis=0)
    sig = quad / N
    return -N * np.log(sig) - logdet - N, sig


def grid_refine_mle(stats: SufficientStats, summary: SpectralSummary, mode: str = "ml",
                    config: OracleConfig = OracleConfig()) -> VariancePoint:
    """Maximiser over ``rho in [0, 1 - 1e-6]`` by grid scan and golden-section refinement."""
    mode = mode.lower()
    grid = np.linspace(0.0, 1.0 - 1e-6, config.rho_grid_points)
    vals, _ = _concentrated(grid, summary, stats, mode)
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]

    def f(r):
        return float(_concentrated(r, summary, stats, mode)[0][0])

    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(config.refine_iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    best = max([(f(x), x) for x in (a, b, 0.5 * (a + b), grid[k])])
    rho = best[1]
    sig = float(_concentrated(rho, summary, stats, mode)[1][0])
    return VariancePoint(sig * rho, sig * (1.0 - rho))


def anova_balanced(y, q: int, r: int) -> dict:
    """Classical balanced one-way ANOVA estimator (``W = 1_n``, ``q`` groups of size ``r``)."""
    if r < 2:
        raise ValueError("r must be >= 2 (within-group mean square undefined)")
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != q * r:
        raise ValueError(f"expected {q * r} observations, got {y.shape[0]}")
    groups = y.reshape(q, r)
    means = groups.mean(axis=1)
    ssw = float(((groups - means[:, None]) ** 2).sum())
    ssb = float(r * ((means - y.mean()) ** 2).sum())
    msw = ssw / (q * (r - 1))
    msb = ssb / (q - 1)
    s1 = (msb - msw) / r
    if msw == 0.0:
        return {"sigma1_sq": max(s1, 0.0), "sigma2_sq": 0.0, "boundary_flag": True, "admissible": False}
    if s1 > 0.0:
        return {"sigma1_sq": s1, "sigma2_sq": msw, "boundary_flag": False, "admissible": True}
    return {"sigma1_sq": 0.0, "sigma2_sq": msw, "boundary_flag": True, "admissible": True}


def dense_loglik(s: VariancePoint, y, spec: ModelSpec, config: OracleConfig = OracleConfig()) -> float:
    """``-log det S - y' (M S M)^+ y`` evaluated with a dense pseudo-inverse."""
    s.require_admissible()
    y = np.asarray(y, dtype=float).ravel()
    n = spec.n
    S = s.sigma1_sq * spec.V + s.sigma2_sq * np.eye(n)
    sign, logdet = np.linalg.slogdet(S)
    if sign <= 0:
        raise np.linalg.LinAlgError("covariance is singular")
    M = np.eye(n) - spec.X @ np.linalg.pinv(spec.X)
    R = np.linalg.pinv(M @ S @ M, rcond=config.dense_tol, hermitian=True)
    return float(-logdet - y @ R @ y)


def dense_reml_loglik(s: VariancePoint, y, spec: ModelSpec) -> float:
    """ML likelihood of the error contrasts ``z = K y`` with ``K`` from ``scipy.linalg.null_space``."""
    s.require_admissible()
    y = np.asarray(y, dtype=float).ravel()
    K = scipy.linalg.null_space(spec.X.T).T
    S = K @ (s.sigma1_sq * spec.V + s.sigma2_sq * np.eye(spec.n)) @ K.T
    z = K @ y
    cho = scipy.linalg.cho_factor(S)
    logdet = 2.0 * np.sum(np.log(np.diag(cho[0])))
    return float(-logdet - z @ scipy.linalg.cho_solve(cho, z))


def dense_gls_beta(s: VariancePoint, y, spec: ModelSpec) -> np.ndarray:
    S = s.sigma1_sq * spec.V + s.sigma2_sq * np.eye(spec.n)
    Si_X = np.linalg.solve(S, spec.X)
    return np.linalg.solve(spec.X.T @ Si_X, Si_X.T @ np.asarray(y, dtype=float).ravel())


def dense_objective(s: VariancePoint, y, spec: ModelSpec, mode: str = "ml") -> float:
    if mode.lower() == "ml":
        return dense_loglik(s, y, spec)
    return dense_reml_loglik(s, y, spec)
