"""Dense univariate polynomials with float or exact rational coefficients.

Coefficients are stored in ascending order. All arithmetic here is
division-free; the only division is exact synthetic division by a linear
factor in :func:`deflate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

DROP_TOL = 1e-12


def rationalize(x: float, tol: float = 1e-12) -> Fraction:
    """Smallest-denominator continued-fraction convergent within ``tol * max(1, |x|)`` of ``x``."""
    target = Fraction(float(x))
    bound = Fraction(tol) * max(1, abs(target))
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    rem = target
    while True:
        a = math.floor(rem)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        conv = Fraction(h1, k1)
        if abs(conv - target) <= bound:
            return conv
        frac = rem - a
        if frac == 0:
            return conv
        rem = 1 / frac


def _is_exact(coeffs) -> bool:
    return all(isinstance(c, (Fraction, int)) for c in coeffs)


def _sum(values: Iterable, exact: bool):
    if exact:
        return sum(values, Fraction(0))
    return math.fsum(values)


def poly_mul(a: Sequence, b: Sequence) -> list:
    """Convolution of two ascending coefficient lists."""
    if not a or not b:
        return []
    exact = _is_exact(a) and _is_exact(b)
    out = []
    for k in range(len(a) + len(b) - 1):
        lo, hi = max(0, k - len(b) + 1), min(k, len(a) - 1)
        out.append(_sum((a[i] * b[k - i] for i in range(lo, hi + 1)), exact))
    return out


def poly_add(*polys: Sequence) -> list:
    if not polys:
        return []
    size = max(len(p) for p in polys)
    exact = all(_is_exact(p) for p in polys)
    zero = Fraction(0) if exact else 0.0
    padded = [list(p) + [zero] * (size - len(p)) for p in polys]
    return [_sum((p[k] for p in padded), exact) for k in range(size)]


def poly_scale(a: Sequence, c) -> list:
    return [c * x for x in a]


def poly_prod(factors: Iterable[Sequence], one) -> list:
    out = [one]
    for f in factors:
        out = poly_mul(out, f)
    return out


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial in ascending coefficient order.

    For float coefficients the reported degree ignores trailing coefficients
    below ``DROP_TOL * max|c|``; ``degree_flag`` is set when the decision was
    within a factor 10 of that threshold. Rational coefficients are exact.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def exact(self) -> bool:
        return _is_exact(self.coeffs)

    @property
    def scale(self) -> float:
        return max((abs(float(c)) for c in self.coeffs), default=0.0)

    def is_zero(self) -> bool:
        return self.degree < 0

    @property
    def degree(self) -> int:
        cs = self.coeffs
        if self.exact:
            for k in range(len(cs) - 1, -1, -1):
                if cs[k] != 0:
                    return k
            return -1
        big = self.scale
        if big == 0.0:
            return -1
        for k in range(len(cs) - 1, -1, -1):
            if abs(cs[k]) >= DROP_TOL * big:
                return k
        return -1

    @property
    def degree_flag(self) -> bool:
        if self.exact or self.is_zero():
            return False
        big = self.scale
        deg = self.degree
        lead = abs(float(self.coeffs[deg]))
        dropped = max((abs(float(c)) for c in self.coeffs[deg + 1:]), default=0.0)
        return lead < 10 * DROP_TOL * big or dropped > 0.1 * DROP_TOL * big

    def trimmed(self) -> "Polynomial":
        return Polynomial(self.coeffs[: self.degree + 1])

    def to_float(self) -> "Polynomial":
        return Polynomial(tuple(float(c) for c in self.coeffs))

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.trimmed().coeffs])

    def __call__(self, x):
        acc = 0 * x if isinstance(x, Number) else np.zeros_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(poly_add(self.coeffs, poly_scale(other.coeffs, -1)))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(poly_mul(self.coeffs, other.coeffs))


def deflate(coeffs: Sequence, root) -> tuple[list, object]:
    """Synthetic division by ``(x - root)``; returns ``(quotient, remainder)``."""
    n = len(coeffs) - 1
    if n < 1:
        return [], coeffs[0] if coeffs else 0
    q = [None] * n
    acc = coeffs[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = coeffs[k] + acc * root
    return q, acc
