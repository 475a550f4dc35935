"""Complex roots of the likelihood polynomials and their classification.

Each root ``rho`` is mapped back to variance components through
``sigma_sq(rho)`` and ``(s1, s2) = (sigma_sq * rho, sigma_sq * (1 - rho))``,
then checked against the original two-equation system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrumError, NoCriticalPointsError, SpuriousPointError, ZeroPolynomialError
from .likelihood import (
    build_ml_polynomial,
    build_reml_polynomial,
    has_between_signal,
    relative_residuals,
    sigma_from_rho,
)
from .polynomial import Polynomial, deflate, rationalize
from .spectral import SpectralSummary, SufficientStats

INTERIOR, BOUNDARY, COMPLEX, EXTERIOR, SPURIOUS, POLE = (
    "interior-real", "boundary", "complex", "exterior", "spurious", "pole",
)

SPURIOUS_TOL = 1e-6
INTERIOR_TOL = 1e-8
IMAG_TOL = 1e-8
POLE_MATCH_TOL = 1e-9
DEFLATE_TOL = 1e-12
MULTIPLE_TOL = 1e-6


def _horner(coeffs, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _newton_polish(coeffs: np.ndarray, x: complex, iters: int = 40) -> complex:
    dcoeffs = coeffs[1:] * np.arange(1, len(coeffs))
    best, best_r = x, abs(_horner(coeffs, x))
    for _ in range(iters):
        if best_r == 0.0:
            break
        dp = _horner(dcoeffs, x)
        if dp == 0:
            break
        x = x - _horner(coeffs, x) / dp
        r = abs(_horner(coeffs, x))
        if r < best_r:
            best, best_r = x, r
        elif r > 2 * best_r:
            break
        if abs(x - best) <= 1e-16 * abs(x) and r >= best_r:
            break
    return best


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    n = len(coeffs) - 1
    if n == 1:
        return np.array([-coeffs[0] / coeffs[1]], dtype=complex)
    C = np.zeros((n, n))
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -coeffs[:-1] / coeffs[-1]
    # geev balances the matrix before the QR iteration
    return scipy.linalg.eigvals(C, check_finite=True).astype(complex)


def _is_zero_remainder(coeffs, root, rem) -> bool:
    if isinstance(rem, Fraction):
        return rem == 0
    scale = sum(abs(float(c)) * abs(root) ** k for k, c in enumerate(coeffs))
    return abs(rem) <= DEFLATE_TOL * scale


def all_roots(poly: Polynomial, anchors: Sequence = ()) -> list[complex]:
    """All ``degree`` complex roots of ``poly``, with multiplicity.

    ``anchors`` are known candidate roots (the pole locations). Each is tried
    first and divided out as often as it divides ``poly`` (exactly for
    rational coefficients, to a 1e-12 relative remainder otherwise); they are
    returned verbatim. The rest come from the eigenvalues of the balanced
    companion matrix, each refined by Newton iteration.

    Raises:
        ZeroPolynomialError: ``poly`` is identically zero.
        NoCriticalPointsError: ``poly`` is a non-zero constant.
    """
    P = poly.trimmed()
    if P.is_zero():
        raise ZeroPolynomialError()
    if P.degree == 0:
        raise NoCriticalPointsError()

    coeffs = list(P.coeffs)
    exact = P.exact
    found: list[complex] = []
    for a in dict.fromkeys(anchors):
        a = rationalize(a) if exact and not isinstance(a, Fraction) else a
        while len(coeffs) > 1:
            q, rem = deflate(coeffs, a)
            if not _is_zero_remainder(coeffs, a, rem):
                break
            coeffs = q
            found.append(complex(float(a)))

    rest = np.array([float(c) for c in coeffs])
    if len(rest) > 1:
        full = np.array([float(c) for c in P.coeffs])
        for x in _companion_roots(rest):
            x = _newton_polish(rest, complex(x))
            x = _newton_polish(full, x, iters=5)
            if abs(x.imag) <= IMAG_TOL * (1 + abs(x)):
                xr = _newton_polish(rest, complex(x.real))
                if abs(_horner(rest, xr)) <= abs(_horner(rest, x)) * 10:
                    x = complex(xr.real, 0.0)
            found.append(x)
    return found


def pole_locations(summary: SpectralSummary, mode: str = "ml") -> list[float]:
    """Values of ``rho`` where some ``phi_tau`` vanishes, ``rho = 1 / (1 - tau)``."""
    taus = list(summary.m)
    if mode.lower() == "ml":
        taus += list(summary.alpha)
    out = []
    for t in taus:
        if t != 1.0:
            out.append(1.0 / (1.0 - t))
    return list(dict.fromkeys(out))


@dataclass
class CandidateSolution:
    rho: complex
    sigma_sq: Optional[complex]
    s: Optional[tuple[complex, complex]]
    classification: str
    residuals: tuple[float, float] = (math.nan, math.nan)
    multiple: bool = False

    def is_solution(self) -> bool:
        return self.classification not in (SPURIOUS, POLE)

    def as_dict(self) -> dict:
        out = {
            "rho_re": float(self.rho.real),
            "rho_im": float(self.rho.imag),
            "class": self.classification,
            "residual": None if math.isnan(self.residuals[0]) else float(max(self.residuals)),
            "multiple": self.multiple,
        }
        if self.s is not None and self.classification in (INTERIOR, BOUNDARY, EXTERIOR):
            out["sigma1_sq"] = float(self.s[0].real)
            out["sigma2_sq"] = float(self.s[1].real)
        return out


def _mp(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _mp_recheck(rho, poly: Polynomial, summary, stats, mode):
    """Re-polish ``rho`` at 50 digits and return ``(rho, sigma_sq, residuals)``.

    For an exact polynomial the residuals are evaluated on the same
    rationalized spectral data the polynomial was built from.
    """
    with mpmath.workdps(50):
        coeffs = [_mp(c) for c in poly.trimmed().coeffs]
        conv = (lambda v: _mp(rationalize(v))) if poly.exact else _mp
        summary = replace(summary, m=tuple(conv(v) for v in summary.m),
                          alpha=tuple(conv(v) for v in summary.alpha))
        stats = SufficientStats(stats.z, tuple(conv(v) for v in stats.T))
        dcoeffs = [k * c for k, c in enumerate(coeffs) if k > 0]
        x = mpmath.mpc(rho)
        for _ in range(60):
            dp = _horner(dcoeffs, x)
            if dp == 0:
                break
            step = _horner(coeffs, x) / dp
            x -= step
            if abs(step) <= mpmath.mpf(10) ** -45 * (1 + abs(x)):
                break
        if abs(x.imag) <= IMAG_TOL * (1 + abs(x)):
            x = mpmath.mpf(x.real)
        sig = sigma_from_rho(x, summary, stats, mode)
        res = relative_residuals(sig * x, sig * (1 - x), summary, stats, mode)
        return complex(x), complex(sig), tuple(float(r) for r in res)


def recover_candidates(roots, summary: SpectralSummary, stats: SufficientStats, mode: str = "ml",
                       poly: Optional[Polynomial] = None,
                       spurious_tol: float = SPURIOUS_TOL) -> list[CandidateSolution]:
    """Classify roots as pole, spurious, interior-real, exterior (real, outside [0, 1)) or complex.

    ``poly`` enables a 50-digit re-check of every root whose double-precision
    residual exceeds the interior threshold; roots close to a pole are
    ill-conditioned in double precision.
    """
    mode = mode.lower()
    poles = pole_locations(summary, mode)
    roots = [complex(r) for r in roots]
    out = []
    for k, rho in enumerate(roots):
        multiple = any(j != k and abs(rho - other) <= MULTIPLE_TOL * (1 + abs(rho))
                       for j, other in enumerate(roots))
        if any(abs(rho - p) <= POLE_MATCH_TOL * (1 + abs(p)) for p in poles):
            out.append(CandidateSolution(rho, None, None, POLE, multiple=multiple))
            continue
        is_real = abs(rho.imag) <= IMAG_TOL * (1 + abs(rho))
        x = rho.real if is_real else rho
        try:
            sig = sigma_from_rho(x, summary, stats, mode)
        except SpuriousPointError:
            out.append(CandidateSolution(rho, None, None, SPURIOUS, multiple=multiple))
            continue
        if sig == 0:
            # sigma1_sq + sigma2_sq = 0: the excluded (theta, -theta) family
            out.append(CandidateSolution(rho, sig, None, SPURIOUS, multiple=multiple))
            continue
        res = relative_residuals(sig * x, sig * (1 - x), summary, stats, mode)
        if poly is not None and max(res) > INTERIOR_TOL:
            try:
                rho2, sig2, res2 = _mp_recheck(x, poly, summary, stats, mode)
            except SpuriousPointError:
                rho2 = None
            if rho2 is not None and max(res2) < max(res):
                rho, sig, res = rho2, sig2, res2
                is_real = abs(rho.imag) <= IMAG_TOL * (1 + abs(rho))
                x = rho.real if is_real else rho
                if is_real:
                    sig = complex(sig.real)
        s = (complex(sig * x), complex(sig * (1 - x)))
        if max(res) > spurious_tol:
            cls = SPURIOUS
        elif not is_real:
            cls = COMPLEX
        elif 0.0 <= x < 1.0 and sig.real > 0 and max(res) <= INTERIOR_TOL:
            cls = INTERIOR
        elif 0.0 <= x < 1.0 and sig.real > 0:
            cls = SPURIOUS
        else:
            cls = EXTERIOR
        out.append(CandidateSolution(complex(x), complex(sig), s, cls, res, multiple))
    return out


@dataclass
class ThetaCheck:
    """Outcome of testing for solutions of the form ``(theta, -theta)``.

    ``status`` is ``"generic"`` (denominator non-zero, residual computed),
    ``"degenerate"`` (denominator zero) or ``"skipped"`` (an eigenvalue equals 1).
    """

    denominator: float
    theta: Optional[float] = None
    residual: Optional[float] = None
    status: str = "generic"
    has_solution: bool = False

    def as_dict(self) -> dict:
        return {
            "denominator": self.denominator,
            "theta": self.theta,
            "residual": self.residual,
            "status": self.status,
            "has_solution": self.has_solution,
        }


def theta_family_check(summary: SpectralSummary, stats: SufficientStats, mode: str = "ml") -> ThetaCheck:
    """Evaluate the likelihood equations on the line ``s = (theta, -theta)``.

    There ``mu s1 + s2 = theta (mu - 1)``; the first equation fixes ``theta``
    and the residual of the second one decides whether a solution exists.
    In REML mode the right-hand sides use ``(m, nu)`` instead of ``(alpha, s)``.
    """
    if mode.lower() == "ml":
        taus, mults = summary.alpha, summary.s_mult
    else:
        taus, mults = summary.m, summary.nu
    if any(v == 1.0 for v in summary.m) or any(v == 1.0 for v in taus):
        return ThetaCheck(denominator=math.nan, status="skipped")

    terms = [k * t / (t - 1) for t, k in zip(taus[:-1], mults[:-1])]
    D = math.fsum(terms)
    if abs(D) <= 1e-12 * max(1.0, sum(abs(x) for x in terms)):
        return ThetaCheck(denominator=D, status="degenerate")

    num = math.fsum(nu * m * t / (m - 1) ** 2 for m, nu, t in zip(summary.m[:-1], summary.nu[:-1], stats.T[:-1]))
    theta = num / D
    left = [nu * t / (m - 1) ** 2 for m, nu, t in zip(summary.m, summary.nu, stats.T)]
    right = [theta * k / (t - 1) for t, k in zip(taus, mults)]
    resid = math.fsum(left) - math.fsum(right)
    scale = sum(abs(x) for x in left) + sum(abs(x) for x in right)
    found = theta != 0.0 and abs(resid) <= 1e-12 * max(scale, 1e-300)
    return ThetaCheck(denominator=D, theta=theta, residual=resid, has_solution=found)


@dataclass
class SolutionCount:
    count: int
    degree: int
    degree_flag: bool
    n_poles: int
    n_spurious: int
    has_multiple: bool
    theta: ThetaCheck
    candidates: list[CandidateSolution] = field(default_factory=list)

    def __int__(self) -> int:
        return self.count


def build_polynomial(summary: SpectralSummary, stats: SufficientStats, mode: str = "ml",
                     exact: bool = False) -> Polynomial:
    if mode.lower() == "ml":
        return build_ml_polynomial(summary, stats, exact)
    return build_reml_polynomial(summary, stats, exact)


def solve(summary: SpectralSummary, stats: SufficientStats, mode: str = "ml",
          exact: bool = False, spurious_tol: float = SPURIOUS_TOL) -> tuple[Polynomial, list[CandidateSolution]]:
    """Build the polynomial, find its roots and classify them."""
    poly = build_polynomial(summary, stats, mode, exact)
    poles = pole_locations(summary, mode)
    anchors = poles
    if exact:
        anchors = [1 / (1 - rationalize(t)) for t in (list(summary.m) + (list(summary.alpha) if mode.lower() == "ml" else []))
                   if rationalize(t) != 1]
    roots = all_roots(poly, anchors)
    return poly, recover_candidates(roots, summary, stats, mode, poly, spurious_tol)


def solution_count(summary: SpectralSummary, stats: SufficientStats, mode: str = "ml",
                   exact: bool = False) -> SolutionCount:
    """Number of complex solutions of the likelihood equations, with multiplicity.

    Pole and spurious roots are excluded. Solutions of the form
    ``(theta, -theta)`` are tested separately and added when present.

    Raises:
        DegenerateSpectrumError: the (theta, -theta) denominator vanishes while
            some ``T_i`` (``i < d``) is positive.
    """
    theta = theta_family_check(summary, stats, mode)
    if theta.status == "degenerate" and has_between_signal(summary, stats):
        raise DegenerateSpectrumError("E_DEGENERATE_SPECTRUM", "degenerate spectrum configuration")
    try:
        poly, cands = solve(summary, stats, mode, exact)
    except NoCriticalPointsError:
        poly = build_polynomial(summary, stats, mode, exact)
        cands = []
    count = sum(1 for c in cands if c.is_solution()) + int(theta.has_solution)
    return SolutionCount(
        count=count,
        degree=poly.degree,
        degree_flag=poly.degree_flag,
        n_poles=sum(1 for c in cands if c.classification == POLE),
        n_spurious=sum(1 for c in cands if c.classification == SPURIOUS),
        has_multiple=any(c.multiple for c in cands if c.is_solution()),
        theta=theta,
        candidates=cands,
    )
