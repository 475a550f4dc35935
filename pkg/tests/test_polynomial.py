from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twovc import Polynomial
from twovc.polynomial import deflate, poly_add, poly_mul, poly_prod, poly_scale, rationalize

small_ints = st.lists(st.integers(-20, 20), min_size=1, max_size=6)


class TestRationalize:
    @pytest.mark.parametrize("x, expected", [(0.5, Fraction(1, 2)), (2.0, Fraction(2)), (1 / 3, Fraction(1, 3)),
                                             (-0.1, Fraction(-1, 10)), (0.0, Fraction(0))])
    def test_simple(self, x, expected):
        assert rationalize(x) == expected

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-1e6, 1e6, allow_nan=False))
    def test_within_tolerance(self, x):
        r = rationalize(x)
        assert abs(float(r) - x) <= 1e-12 * max(1.0, abs(x)) * 1.0001


class TestArithmetic:
    @settings(max_examples=100, deadline=None)
    @given(small_ints, small_ints)
    def test_mul_matches_numpy(self, a, b):
        np.testing.assert_array_equal(poly_mul([float(v) for v in a], [float(v) for v in b]),
                                      np.convolve(a, b))

    @settings(max_examples=100, deadline=None)
    @given(small_ints, small_ints)
    def test_exact_mul(self, a, b):
        fa = [Fraction(v, 3) for v in a]
        fb = [Fraction(v, 7) for v in b]
        out = poly_mul(fa, fb)
        assert all(isinstance(c, Fraction) for c in out)
        ref = np.convolve(a, b)
        assert [c * 21 for c in out] == [Fraction(int(v)) for v in ref]

    def test_add_ragged(self):
        assert poly_add([1, 2], [3], [0, 0, 5]) == [4, 2, 5]

    def test_scale_and_prod(self):
        assert poly_scale([1, -2], 3) == [3, -6]
        assert poly_prod([[1, 1], [1, -1]], 1) == [1, 0, -1]
        assert poly_prod([], Fraction(1)) == [Fraction(1)]

    def test_fsum_cancellation(self):
        # plain summation would give 0 for the middle coefficient
        out = poly_mul([1e16, 1.0], [1.0, -1e16 + 2.0])
        assert out[1] == pytest.approx(1e16 * (-1e16 + 2.0) + 1.0, rel=1e-15)


class TestPolynomial:
    def test_degree_float_drop(self):
        assert Polynomial((1.0, 2.0, 1e-14)).degree == 1
        assert Polynomial((1.0, 2.0, 1e-10)).degree == 2

    def test_degree_flag(self):
        assert Polynomial((1.0, 2.0, 5e-12)).degree_flag
        assert not Polynomial((1.0, 2.0, 1.0)).degree_flag

    def test_degree_exact(self):
        p = Polynomial((Fraction(1), Fraction(0), Fraction(1, 10**30)))
        assert p.exact and p.degree == 2 and not p.degree_flag

    def test_zero(self):
        assert Polynomial((0.0, 0.0)).is_zero()
        assert Polynomial(()).degree == -1

    def test_eval_and_derivative(self):
        p = Polynomial((-15.0, 20.0, 35.0))
        assert p(3 / 7) == pytest.approx(0.0, abs=1e-13)
        assert p(-1.0) == 0.0
        assert p.derivative().coeffs == (20.0, 70.0)
        np.testing.assert_allclose(p(np.array([0.0, 1.0])), [-15.0, 40.0])

    def test_ops(self):
        a = Polynomial((1, 1))
        b = Polynomial((1, -1))
        assert (a * b).coeffs == (1, 0, -1)
        assert (a - b).coeffs == (0, 2)

    def test_as_array_trims(self):
        np.testing.assert_array_equal(Polynomial((1.0, 2.0, 0.0)).as_array(), [1.0, 2.0])


class TestDeflate:
    def test_exact(self):
        q, r = deflate([Fraction(-15), Fraction(20), Fraction(35)], Fraction(-1))
        assert r == 0 and q == [Fraction(-15), Fraction(35)]

    @settings(max_examples=100, deadline=None)
    @given(small_ints, st.integers(-5, 5))
    def test_roundtrip(self, a, root):
        c = [Fraction(v) for v in a]
        prod = poly_mul(c, [Fraction(-root), Fraction(1)])
        q, r = deflate(prod, Fraction(root))
        assert r == 0
        assert poly_add(q, [Fraction(0)] * len(c)) == poly_add(c, [Fraction(0)] * len(q))

    def test_remainder_is_value(self):
        coeffs = [1.0, -3.0, 2.0, 5.0]
        _, r = deflate(coeffs, 0.7)
        assert r == pytest.approx(Polynomial(tuple(coeffs))(0.7))
