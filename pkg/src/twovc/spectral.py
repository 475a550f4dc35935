"""Distinct-eigenvalue summaries of ``V`` and ``B V B'`` and the statistics ``T_i``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AssumptionError, ModelError
from .model import ModelSpec, null_space_basis

EIG_TOL = 1e-9


@dataclass(frozen=True)
class EigenBlock:
    value: float
    multiplicity: int
    basis: np.ndarray  # orthonormal columns spanning the eigenspace


def distinct_eigen(A, rel_tol: float = EIG_TOL) -> list[EigenBlock]:
    """Group the eigenvalues of a symmetric PSD matrix into distinct values.

    Consecutive eigenvalues (in decreasing order) whose gap is at most
    ``rel_tol * max(1, lambda_max)`` are merged; the group value is their
    mean. Eigenvalues below that threshold in absolute value are snapped to
    exactly 0.

    Raises:
        ModelError: ``A`` is not symmetric or has a clearly negative eigenvalue.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ModelError("E_DIM", "matrix must be square")
    if A.size and np.abs(A - A.T).max() > 1e-10 * max(1.0, np.abs(A).max()):
        raise ModelError("E_SYM", "matrix is not symmetric")
    w, U = np.linalg.eigh(0.5 * (A + A.T))
    w, U = w[::-1], U[:, ::-1]
    thresh = rel_tol * max(1.0, float(w[0]) if w.size else 1.0)
    if w.size and w[-1] < -thresh:
        raise ModelError("E_PSD", f"negative eigenvalue {w[-1]:.3e}")

    blocks: list[EigenBlock] = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k - 1] - w[k] > thresh:
            vals = w[start:k]
            value = float(vals.mean())
            if abs(value) <= thresh:
                value = 0.0
            blocks.append(EigenBlock(value, k - start, U[:, start:k]))
            start = k
    # a split zero cluster would leave two blocks at 0.0
    if len(blocks) > 1 and blocks[-2].value == 0.0 and blocks[-1].value == 0.0:
        a, b = blocks[-2], blocks[-1]
        blocks[-2:] = [EigenBlock(0.0, a.multiplicity + b.multiplicity, np.hstack([a.basis, b.basis]))]
    return blocks


@dataclass(frozen=True)
class SpectralSummary:
    """Distinct eigenvalues of ``B V B'`` (``m``, ``nu``) and of ``V`` (``alpha``, ``s_mult``).

    Both sequences are decreasing and end with an exact zero. ``eig_bases``
    live in the (n-p)-dimensional ``z = B y`` coordinates; ``v_bases`` in
    the original n coordinates. ``B`` is the null-space basis used.
    """

    m: tuple[float, ...]
    nu: tuple[int, ...]
    eig_bases: tuple[np.ndarray, ...]
    alpha: tuple[float, ...]
    s_mult: tuple[int, ...]
    v_bases: tuple[np.ndarray, ...]
    B: np.ndarray
    n: int
    p: int
    eig_tol: float = EIG_TOL
    one_way_q: Optional[int] = None

    @property
    def d(self) -> int:
        return len(self.m)

    @property
    def d0(self) -> int:
        return len(self.alpha)

    def metadata(self) -> dict:
        return {
            "m": list(self.m),
            "nu": list(self.nu),
            "d": self.d,
            "alpha": list(self.alpha),
            "s": list(self.s_mult),
            "d0": self.d0,
            "eig_tol": self.eig_tol,
        }


def reduce(spec: ModelSpec, B: Optional[np.ndarray] = None, rel_tol: float = EIG_TOL) -> SpectralSummary:
    """Spectral summary of a model.

    Raises:
        AssumptionError: ``B V B'`` is non-singular (``nu_d = 0``), which also
            covers a full-rank ``V``.
    """
    if B is None:
        B = null_space_basis(spec.X)
    BVB = B @ spec.V @ B.T
    m_blocks = distinct_eigen(0.5 * (BVB + BVB.T), rel_tol)
    if m_blocks[-1].value != 0.0:
        raise AssumptionError("E_NU_D", "B V B' is non-singular: model violates nu_d > 0")
    v_blocks = distinct_eigen(spec.V, rel_tol)
    if v_blocks[-1].value != 0.0:
        raise AssumptionError("E_RANK_V", "V has full rank")

    summary = SpectralSummary(
        m=tuple(b.value for b in m_blocks),
        nu=tuple(b.multiplicity for b in m_blocks),
        eig_bases=tuple(b.basis for b in m_blocks),
        alpha=tuple(b.value for b in v_blocks),
        s_mult=tuple(b.multiplicity for b in v_blocks),
        v_bases=tuple(b.basis for b in v_blocks),
        B=B,
        n=spec.n,
        p=spec.p,
        eig_tol=rel_tol,
        one_way_q=spec.one_way.q if spec.one_way is not None else None,
    )
    q = summary.one_way_q
    if q is not None:
        assert summary.d0 <= q + 1, f"d0={summary.d0} exceeds q+1={q + 1}"
        assert summary.d <= q, f"d={summary.d} exceeds q={q}"
    return summary


@dataclass(frozen=True)
class SufficientStats:
    z: np.ndarray
    T: tuple[float, ...]

    def weighted_total(self, nu) -> float:
        return float(sum(n_i * t for n_i, t in zip(nu, self.T)))


def sufficient_stats(y, B: np.ndarray, summary: SpectralSummary) -> SufficientStats:
    """``z = B y`` and ``T_i = z' E_i z / nu_i``."""
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != B.shape[1]:
        raise ModelError("E_DIM", f"y has length {y.shape[0]}, expected {B.shape[1]}")
    z = B @ y
    T = []
    for basis, nu in zip(summary.eig_bases, summary.nu):
        if basis.shape[0] != z.shape[0]:
            raise ModelError("E_DIM", "basis does not match z")
        c = basis.T @ z
        T.append(float(c @ c) / nu)
    return SufficientStats(z=z, T=tuple(T))
