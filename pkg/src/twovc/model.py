"""Model specification for the two-variance-component linear mixed model.

The model is ``Y ~ N(X beta, s1 * V + s2 * I_n)`` with ``X`` of full column
rank ``p < n`` and ``V`` symmetric non-negative definite. The one-way layout
``Y = W beta + Z alpha + eps`` is the special case ``X = W``, ``V = Z Z'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ModelError

RANK_TOL = 1e-8
SYM_TOL = 1e-10


def _numeric_rank(A: np.ndarray, tol: float = RANK_TOL) -> int:
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def _column_basis(A: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``A`` (relative SVD cut-off)."""
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    U, sv, _ = np.linalg.svd(A, full_matrices=False)
    if sv[0] == 0.0:
        return np.zeros((A.shape[0], 0))
    return U[:, sv > tol * sv[0]]


@dataclass(frozen=True)
class OneWayLayout:
    Z: np.ndarray
    group_sizes: tuple[int, ...]

    @property
    def q(self) -> int:
        return len(self.group_sizes)


@dataclass(frozen=True)
class ModelSpec:
    """Fixed-effects design ``X`` (n x p) and random-effect kernel ``V`` (n x n).

    Construction validates shape, full column rank of ``X``, ``p < n`` and
    that ``V`` is symmetric, PSD and non-zero. ``rank(V) < n`` is not checked
    here; a full-rank ``V`` is caught by :func:`twovc.spectral.reduce`.
    """

    X: np.ndarray
    V: np.ndarray
    one_way: Optional[OneWayLayout] = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        V = np.asarray(self.V, dtype=float)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "V", V)

        if X.ndim != 2:
            raise ModelError("E_DIM", "X must be a 2-D matrix")
        n, p = X.shape
        if p < 1 or p >= n:
            raise ModelError("E_DIM", f"need 1 <= p < n, got n={n}, p={p}")
        if V.shape != (n, n):
            raise ModelError("E_DIM", f"V must be {n}x{n}, got {V.shape}")
        if _numeric_rank(X) != p:
            raise ModelError("E_RANK", "X is rank deficient")
        scale = max(np.abs(V).max(), 0.0)
        if scale == 0.0:
            raise ModelError("E_V", "V must be non-zero")
        if np.abs(V - V.T).max() > SYM_TOL * scale:
            raise ModelError("E_V", "V is not symmetric")
        if np.linalg.eigvalsh(V).min() < -RANK_TOL * scale * n:
            raise ModelError("E_V", "V is not positive semi-definite")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def W(self) -> np.ndarray:
        return self.X


@dataclass(frozen=True)
class VariancePoint:
    """A pair of variance components ``(sigma1_sq, sigma2_sq)``.

    ``sigma_sq`` and ``rho`` give the total-variance / ratio coordinates,
    ``sigma1_sq = sigma_sq * rho`` and ``sigma2_sq = sigma_sq * (1 - rho)``.
    """

    sigma1_sq: float
    sigma2_sq: float

    @property
    def sigma_sq(self) -> float:
        return self.sigma1_sq + self.sigma2_sq

    @property
    def rho(self) -> float:
        return self.sigma1_sq / (self.sigma1_sq + self.sigma2_sq)

    @classmethod
    def from_rho(cls, sigma_sq: float, rho: float) -> "VariancePoint":
        return cls(sigma_sq * rho, sigma_sq * (1.0 - rho))

    def is_admissible(self) -> bool:
        return self.sigma1_sq >= 0.0 and self.sigma2_sq > 0.0

    def require_admissible(self) -> None:
        if self.sigma2_sq <= 0.0:
            raise ModelError("E_VARIANCE", "sigma2_sq must be > 0")
        if self.sigma1_sq < 0.0:
            raise ModelError("E_VARIANCE", "sigma1_sq must be >= 0")

    def as_dict(self) -> dict:
        return {"sigma1_sq": float(self.sigma1_sq), "sigma2_sq": float(self.sigma2_sq)}


def incidence_matrix(group_sizes: Sequence[int]) -> np.ndarray:
    sizes = [int(k) for k in group_sizes]
    Z = np.zeros((sum(sizes), len(sizes)))
    start = 0
    for k, nk in enumerate(sizes):
        Z[start:start + nk, k] = 1.0
        start += nk
    return Z


def build_one_way_model(group_sizes: Sequence[int], W) -> ModelSpec:
    """One-way layout with group-incidence ``Z`` and ``V = Z Z'``.

    Raises:
        ModelError: non-positive group size, fewer than two groups, row
            mismatch between ``W`` and the groups, rank-deficient ``W``, or
            ``1_n`` outside the column space of ``W``.
    """
    sizes = tuple(int(k) for k in group_sizes)
    if len(sizes) < 2:
        raise ModelError("E_GROUPS", "need at least two groups")
    if any(k <= 0 for k in sizes):
        raise ModelError("E_GROUPS", "group sizes must be positive")
    n = sum(sizes)
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    if W.shape[0] != n:
        raise ModelError("E_DIM", f"W has {W.shape[0]} rows but group sizes sum to {n}")
    if _numeric_rank(W) != W.shape[1]:
        raise ModelError("E_RANK", "W is rank deficient")
    ones = np.ones(n)
    coef, *_ = np.linalg.lstsq(W, ones, rcond=None)
    if np.linalg.norm(W @ coef - ones) > RANK_TOL * np.sqrt(n):
        raise ModelError("E_MEAN", "1_n is not in the column space of W")
    Z = incidence_matrix(sizes)
    return ModelSpec(W, Z @ Z.T, one_way=OneWayLayout(Z, sizes))


def residual_projector(X) -> np.ndarray:
    """``M = I - X X^+``, the orthogonal projector onto ``span(X)``'s complement."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if _numeric_rank(X) != X.shape[1]:
        raise ModelError("E_RANK", "X is rank deficient")
    Q, _ = np.linalg.qr(X)
    M = np.eye(X.shape[0]) - Q @ Q.T
    return 0.5 * (M + M.T)


def null_space_basis(X, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Rows form an orthonormal basis of the orthogonal complement of ``span(X)``.

    The returned ``B`` is (n-p) x n with ``B B' = I`` and ``B' B = M``. With an
    ``rng`` the completion is rotated by a Haar-random orthogonal matrix, which
    gives a different but equally valid ``B``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if p >= n:
        raise ModelError("E_DIM", "null space is empty: p >= n")
    if _numeric_rank(X) != p:
        raise ModelError("E_RANK", "X is rank deficient")
    Q, _ = np.linalg.qr(X, mode="complete")
    B = Q[:, p:].T
    if rng is not None:
        G = rng.standard_normal((n - p, n - p))
        O, R = np.linalg.qr(G)
        O = O * np.sign(np.diag(R))
        B = O @ B
    return B


def _outside_span(v: np.ndarray, A: np.ndarray, tol: float) -> bool:
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return False
    U = _column_basis(A)
    resid = v - U @ (U.T @ v)
    return bool(np.linalg.norm(resid) > tol * norm)


def check_ml_existence(y, spec: ModelSpec, tol: float = 1e-8) -> bool:
    """True iff ``y`` lies outside ``span([X, V])``, i.e. the ML estimate exists."""
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != spec.n:
        raise ModelError("E_DIM", f"y has length {y.shape[0]}, expected {spec.n}")
    return _outside_span(y, np.hstack([spec.X, spec.V]), tol)


def check_reml_existence(y, spec: ModelSpec, tol: float = 1e-8) -> bool:
    """True iff ``M y`` lies outside ``span(M V)``, i.e. the REML estimate exists."""
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != spec.n:
        raise ModelError("E_DIM", f"y has length {y.shape[0]}, expected {spec.n}")
    M = residual_projector(spec.X)
    My = M @ y
    # My = 0 lies in every span; compare against ||y|| so tiny residues count as zero
    if np.linalg.norm(My) <= tol * np.linalg.norm(y):
        return False
    return _outside_span(My, M @ spec.V, tol)


def check_genericity(spec: ModelSpec) -> dict:
    """Almost-sure existence of the ML and REML estimates.

    ``ml_as`` holds iff ``rank([X, V]) < n``; ``reml_as`` iff ``B V B'`` is
    singular (zero eigenvalue with positive multiplicity).
    """
    n, p = spec.n, spec.p
    ml_as = _numeric_rank(np.hstack([spec.X, spec.V])) < n
    B = null_space_basis(spec.X)
    reml_as = _numeric_rank(B @ spec.V @ B.T) < n - p
    if ml_as and not reml_as:
        raise AssertionError("ML genericity must imply REML genericity")
    return {"ml_as": bool(ml_as), "reml_as": bool(reml_as)}
