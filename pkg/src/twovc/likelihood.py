"""Profile likelihoods and the univariate polynomials whose roots are their critical points.

With ``sigma_sq = s1 + s2`` and ``rho = s1 / sigma_sq`` every eigenvalue ``mu``
enters through ``phi_mu(rho) = (mu - 1) rho + 1``, since
``mu s1 + s2 = sigma_sq * phi_mu(rho)``.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DegenerateDataError, SpuriousPointError
from .model import VariancePoint
from .polynomial import Polynomial, poly_add, poly_mul, poly_prod, poly_scale, rationalize
from .spectral import SpectralSummary, SufficientStats

POLE_TOL = 1e-14


def phi(mu, rho):
    return (mu - 1) * rho + 1


def has_between_signal(summary: SpectralSummary, stats: SufficientStats, tol: float = 1e-12) -> bool:
    """Whether some ``T_i`` with ``i < d`` is positive (relative to ``sum nu_i T_i``)."""
    total = stats.weighted_total(summary.nu)
    if total <= 0.0:
        return False
    return any(nu * t > tol * total for nu, t in zip(summary.nu[:-1], stats.T[:-1]))


def _require_signal(summary, stats):
    if not has_between_signal(summary, stats):
        raise DegenerateDataError("E_NO_SIGNAL", "T_i = 0 for every i < d; reduction to rho is invalid")


def _check_pole(value, what):
    if abs(value) <= POLE_TOL:
        raise SpuriousPointError(f"{what} vanishes at this rho")


def h_value(rho, summary: SpectralSummary, stats: SufficientStats):
    """``H1(rho) / H2(rho)``; at an ML critical point this is ``sigma_sq``."""
    H1 = 0.0
    for m, nu, t in zip(summary.m[:-1], summary.nu[:-1], stats.T[:-1]):
        f = phi(m, rho)
        _check_pole(f, "phi_m")
        H1 += nu * m * t / f**2
    H2 = 0.0
    for a, s in zip(summary.alpha[:-1], summary.s_mult[:-1]):
        f = phi(a, rho)
        _check_pole(f, "phi_alpha")
        H2 += a * s / f
    if abs(H2) <= POLE_TOL * max(1.0, sum(summary.s_mult)):
        raise SpuriousPointError("H2 vanishes at this rho")
    return H1 / H2


def reml_sigma_value(rho, summary: SpectralSummary, stats: SufficientStats):
    """REML analogue of :func:`h_value`, from the first REML equation."""
    num = 0.0
    den = 0.0
    for m, nu, t in zip(summary.m[:-1], summary.nu[:-1], stats.T[:-1]):
        f = phi(m, rho)
        _check_pole(f, "phi_m")
        num += nu * m * t / f**2
        den += nu * m / f
    if abs(den) <= POLE_TOL * max(1.0, sum(summary.nu)):
        raise SpuriousPointError("REML denominator vanishes at this rho")
    return num / den


def _ring(summary: SpectralSummary, stats: SufficientStats, exact: bool):
    if exact:
        conv = rationalize
        one = Fraction(1)
        nu = [Fraction(v) for v in summary.nu]
        s = [Fraction(v) for v in summary.s_mult]
    else:
        conv = float
        one = 1.0
        nu = [float(v) for v in summary.nu]
        s = [float(v) for v in summary.s_mult]
    m = [conv(v) for v in summary.m]
    alpha = [conv(v) for v in summary.alpha]
    T = [conv(v) for v in stats.T]
    return one, m, nu, T, alpha, s


def _phi_poly(mu, one):
    return [one, mu - one]


def _prod_except(factors, skip, one):
    return poly_prod((f for k, f in enumerate(factors) if k not in skip), one)


def ml_polynomial_pieces(summary: SpectralSummary, stats: SufficientStats, exact: bool = False) -> dict:
    """The four polynomials with ``P = P1 P2 - P3 P4``.

    Each is the corresponding rational expression multiplied through by
    ``Q1 (1-rho)^2`` or ``Q2 (1-rho)^2`` with the factor cancellation done
    on the factor lists, never by dividing coefficient arrays.
    """
    one, m, nu, T, alpha, s = _ring(summary, stats, exact)
    d, d0 = len(m), len(alpha)
    omr = [one, -one]
    omr2 = poly_mul(omr, omr)
    phi2_m = [poly_mul(_phi_poly(mi, one), _phi_poly(mi, one)) for mi in m[:-1]]
    phi_a = [_phi_poly(aj, one) for aj in alpha[:-1]]
    Q1 = poly_prod(phi2_m, one)
    Q2 = poly_prod(phi_a, one)

    P1 = poly_scale(Q1, nu[-1] * T[-1])
    P3 = [0 * one]
    for i in range(d - 1):
        rest = _prod_except(phi2_m, {i}, one)
        P1 = poly_add(P1, poly_scale(poly_mul(omr2, rest), nu[i] * T[i]))
        P3 = poly_add(P3, poly_scale(rest, nu[i] * m[i] * T[i]))
    P2 = [0 * one]
    P4 = poly_scale(poly_mul(omr, Q2), s[-1])
    for j in range(d0 - 1):
        rest = _prod_except(phi_a, {j}, one)
        P2 = poly_add(P2, poly_scale(rest, alpha[j] * s[j]))
        P4 = poly_add(P4, poly_scale(poly_mul(omr2, rest), s[j]))
    return {"P1": P1, "P2": P2, "P3": P3, "P4": P4, "Q1": Q1, "Q2": Q2}


def build_ml_polynomial(summary: SpectralSummary, stats: SufficientStats, exact: bool = False) -> Polynomial:
    """Polynomial in ``rho`` whose non-pole roots are the ML critical points.

    Raises:
        DegenerateDataError: every ``T_i`` with ``i < d`` is zero.
    """
    _require_signal(summary, stats)
    pc = ml_polynomial_pieces(summary, stats, exact)
    P = Polynomial(poly_add(poly_mul(pc["P1"], pc["P2"]), poly_scale(poly_mul(pc["P3"], pc["P4"]), -1)))
    bound = 2 * summary.d + summary.d0 - 4
    assert P.degree <= bound, f"deg P = {P.degree} exceeds 2d+d0-4 = {bound}"
    return P


def build_reml_polynomial(summary: SpectralSummary, stats: SufficientStats, exact: bool = False) -> Polynomial:
    """Polynomial in ``rho`` whose non-pole roots are the REML critical points.

    In ``(R1* - R2*) Q1*`` the diagonal ``i = j`` terms cancel, leaving
    ``sum_{i != j} nu_i nu_j T_i (m_j - m_i) phi_j prod_{k != i, j} phi_k^2``.
    """
    _require_signal(summary, stats)
    one, m, nu, T, _, _ = _ring(summary, stats, exact)
    d = len(m)
    phis = [_phi_poly(mi, one) for mi in m]
    phi2 = [poly_mul(f, f) for f in phis]
    P = [0 * one]
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            c = nu[i] * nu[j] * T[i] * (m[j] - m[i])
            if c == 0:
                continue
            term = poly_mul(phis[j], _prod_except(phi2, {i, j}, one))
            P = poly_add(P, poly_scale(term, c))
    P = Polynomial(P)
    bound = 2 * d - 3
    assert P.degree <= bound, f"deg P* = {P.degree} exceeds 2d-3 = {bound}"
    return P


def _spectral_sums(s1, s2, summary: SpectralSummary, stats: SufficientStats, mode: str):
    lhs1 = lhs2 = 0.0
    for m, nu, t in zip(summary.m, summary.nu, stats.T):
        b = m * s1 + s2
        lhs1 += nu * m * t / b**2
        lhs2 += nu * t / b**2
    rhs1 = rhs2 = 0.0
    if mode == "ml":
        for a, s in zip(summary.alpha, summary.s_mult):
            b = a * s1 + s2
            rhs1 += s * a / b
            rhs2 += s / b
    else:
        for m, nu in zip(summary.m, summary.nu):
            b = m * s1 + s2
            rhs1 += nu * m / b
            rhs2 += nu / b
    return (lhs1, rhs1), (lhs2, rhs2)


def equation_sides(s1, s2, summary: SpectralSummary, stats: SufficientStats, mode: str = "ml"):
    """Both sides of the two likelihood equations at ``(s1, s2)`` (complex allowed)."""
    mode = _mode(mode)
    return _spectral_sums(s1, s2, summary, stats, mode)


def relative_residuals(s1, s2, summary: SpectralSummary, stats: SufficientStats, mode: str = "ml") -> tuple[float, float]:
    out = []
    for lhs, rhs in equation_sides(s1, s2, summary, stats, mode):
        denom = max(abs(lhs), abs(rhs))
        out.append(float(abs(lhs - rhs) / denom) if denom > 0 else 0.0)
    return tuple(out)


def _mode(mode: str) -> str:
    mode = mode.lower()
    if mode not in ("ml", "reml"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def _loglik(s: VariancePoint, summary, stats, mode):
    s.require_admissible()
    s1, s2 = s.sigma1_sq, s.sigma2_sq
    quad = math.fsum(nu * t / (m * s1 + s2) for m, nu, t in zip(summary.m, summary.nu, stats.T))
    if mode == "ml":
        logdet = math.fsum(k * math.log(a * s1 + s2) for a, k in zip(summary.alpha, summary.s_mult))
    else:
        logdet = math.fsum(nu * math.log(m * s1 + s2) for m, nu in zip(summary.m, summary.nu))
    return -logdet - quad


def profile_loglik(s: VariancePoint, summary: SpectralSummary, stats: SufficientStats) -> float:
    """Twice the ML log-likelihood (up to a constant) with ``beta`` profiled out."""
    return _loglik(s, summary, stats, "ml")


def reml_loglik(s: VariancePoint, summary: SpectralSummary, stats: SufficientStats) -> float:
    """Twice the REML log-likelihood (up to a constant), i.e. the likelihood of ``z = B y``."""
    return _loglik(s, summary, stats, "reml")


def loglik(s: VariancePoint, summary: SpectralSummary, stats: SufficientStats, mode: str = "ml") -> float:
    return _loglik(s, summary, stats, _mode(mode))


def score(s: VariancePoint, summary: SpectralSummary, stats: SufficientStats, mode: str = "ml") -> tuple[float, float]:
    """Partial derivatives of :func:`loglik` with respect to ``(s1, s2)``."""
    (l1, r1), (l2, r2) = equation_sides(s.sigma1_sq, s.sigma2_sq, summary, stats, mode)
    return float(l1 - r1), float(l2 - r2)


def boundary_sigma2(summary: SpectralSummary, stats: SufficientStats, mode: str = "ml") -> float:
    """Maximiser of the likelihood restricted to ``s1 = 0``."""
    total = stats.weighted_total(summary.nu)
    N = summary.n if _mode(mode) == "ml" else summary.n - summary.p
    return total / N


def sigma_from_rho(rho, summary: SpectralSummary, stats: SufficientStats, mode: str = "ml"):
    if _mode(mode) == "ml":
        return h_value(rho, summary, stats)
    return reml_sigma_value(rho, summary, stats)


__all__ = [
    "boundary_sigma2",
    "build_ml_polynomial",
    "build_reml_polynomial",
    "equation_sides",
    "h_value",
    "loglik",
    "ml_polynomial_pieces",
    "phi",
    "profile_loglik",
    "relative_residuals",
    "reml_loglik",
    "reml_sigma_value",
    "score",
    "sigma_from_rho",
]
