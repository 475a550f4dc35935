import numpy as np
import pytest

from twovc import (
    AssumptionError,
    ModelError,
    ModelSpec,
    VariancePoint,
    build_one_way_model,
    distinct_eigen,
    null_space_basis,
    reduce,
    simulate,
    sufficient_stats,
)

from conftest import Y22


def oracle_distinct(A, decimals=8):
    w = np.round(np.linalg.eigvalsh(A), decimals) + 0.0
    vals, counts = np.unique(w, return_counts=True)
    return list(vals[::-1]), list(counts[::-1])


class TestDistinctEigen:
    def test_block_J2(self):
        J = np.ones((2, 2))
        A = np.block([[J, 0 * J], [0 * J, J]])
        blocks = distinct_eigen(A)
        assert [(b.value, b.multiplicity) for b in blocks] == [(pytest.approx(2.0), 2), (0.0, 2)]
        assert blocks[-1].value == 0.0

    def test_identity(self):
        blocks = distinct_eigen(np.eye(3))
        assert [(b.value, b.multiplicity) for b in blocks] == [(pytest.approx(1.0), 3)]

    def test_grouping(self):
        blocks = distinct_eigen(np.diag([3.0, 3.0 + 1e-14, 1.0]), rel_tol=1e-9)
        assert [b.multiplicity for b in blocks] == [2, 1]
        assert blocks[0].value == pytest.approx(3.0)
        assert blocks[1].value == pytest.approx(1.0)

    def test_reconstruction(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((6, 4))
        A = A @ A.T
        blocks = distinct_eigen(A)
        R = sum(b.value * b.basis @ b.basis.T for b in blocks)
        np.testing.assert_allclose(R, A, atol=1e-8)
        for b in blocks:
            np.testing.assert_allclose(b.basis.T @ b.basis, np.eye(b.multiplicity), atol=1e-12)

    def test_asymmetric(self):
        with pytest.raises(ModelError):
            distinct_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_negative(self):
        with pytest.raises(ModelError):
            distinct_eigen(np.diag([1.0, -0.5]))


class TestReduce:
    def test_balanced_2_2(self, spec22):
        s = reduce(spec22)
        assert s.alpha == (pytest.approx(2.0), 0.0) and s.s_mult == (2, 2) and s.d0 == 2
        assert s.m == (pytest.approx(2.0), 0.0) and s.nu == (1, 2) and s.d == 2

    def test_1_2_3(self, spec123):
        s = reduce(spec123)
        B = null_space_basis(spec123.X)
        a_vals, a_cnt = oracle_distinct(spec123.V)
        m_vals, m_cnt = oracle_distinct(B @ spec123.V @ B.T)
        np.testing.assert_allclose(s.alpha, [3.0, 2.0, 1.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(s.alpha, a_vals, atol=1e-7)
        assert list(s.s_mult) == a_cnt == [1, 1, 1, 3]
        np.testing.assert_allclose(s.m, m_vals, atol=1e-7)
        assert list(s.nu) == m_cnt
        assert s.d0 == 4 and s.d == 3

    def test_2_2_2(self):
        spec = build_one_way_model([2, 2, 2], np.ones(6))
        s = reduce(spec)
        assert s.d0 == 2 <= 4 and s.d == 2 <= 3
        assert s.nu == (2, 3)

    def test_invariants(self, spec123):
        s = reduce(spec123)
        assert sum(s.nu) == spec123.n - spec123.p
        assert sum(s.s_mult) == spec123.n
        assert s.m[-1] == 0.0 and s.nu[-1] > 0
        assert s.alpha[-1] == 0.0 and s.s_mult[-1] > 0
        E = [b @ b.T for b in s.eig_bases]
        np.testing.assert_allclose(sum(E), np.eye(5), atol=1e-10)
        for i in range(len(E)):
            np.testing.assert_allclose(E[i] @ E[i], E[i], atol=1e-10)
            for j in range(i + 1, len(E)):
                np.testing.assert_allclose(E[i] @ E[j], 0.0, atol=1e-10)

    def test_nu_d_zero(self):
        with pytest.raises(AssumptionError):
            reduce(build_one_way_model([1, 1, 1], np.ones(3)))

    def test_full_rank_V_generic(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((5, 5))
        with pytest.raises(AssumptionError):
            reduce(ModelSpec(np.ones(5), A @ A.T))

    def test_one_way_bounds(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            sizes = [int(k) for k in rng.integers(1, 6, size=int(rng.integers(2, 6)))]
            if max(sizes) == 1:
                continue
            s = reduce(build_one_way_model(sizes, np.ones(sum(sizes))))
            q = len(sizes)
            assert s.d0 <= q + 1 and s.d <= q


class TestSufficientStats:
    def test_golden(self, reduced22):
        summary, stats = reduced22
        # between SS 6.25 over nu_1 = 1, within SS 2.5 over nu_2 = 2
        assert stats.T == (pytest.approx(6.25, abs=1e-12), pytest.approx(1.25, abs=1e-12))
        # projector oracle
        y = Y22
        means = np.repeat([y[:2].mean(), y[2:].mean()], 2)
        assert np.sum((means - y.mean()) ** 2) == pytest.approx(6.25)
        assert np.sum((y - means) ** 2) / 2 == pytest.approx(1.25)

    def test_mean_space(self, spec22):
        summary = reduce(spec22)
        stats = sufficient_stats(3.7 * np.ones(4), summary.B, summary)
        np.testing.assert_allclose(stats.T, 0.0, atol=1e-24)

    def test_total(self, spec123):
        summary = reduce(spec123)
        y = np.random.default_rng(4).standard_normal(6)
        stats = sufficient_stats(y, summary.B, summary)
        M = np.eye(6) - 1 / 6
        assert stats.weighted_total(summary.nu) == pytest.approx(y @ M @ y, rel=1e-10)
        assert all(t >= 0 for t in stats.T)

    def test_basis_invariance(self, spec123):
        rng = np.random.default_rng(8)
        y = rng.standard_normal(6)
        s1 = reduce(spec123)
        s2 = reduce(spec123, B=null_space_basis(spec123.X, rng))
        assert not np.allclose(s1.B, s2.B)
        t1 = sufficient_stats(y, s1.B, s1).T
        t2 = sufficient_stats(y, s2.B, s2).T
        np.testing.assert_allclose(t1, t2, atol=1e-10)
        np.testing.assert_allclose(s1.m, s2.m, atol=1e-10)
        assert s1.nu == s2.nu

    def test_dimension_mismatch(self, spec22):
        summary = reduce(spec22)
        with pytest.raises(ModelError):
            sufficient_stats(np.ones(5), summary.B, summary)

    def test_chi_squared_moments(self):
        spec = build_one_way_model([2, 3, 4], np.ones(9))
        summary = reduce(spec)
        reps = 2000
        acc = np.zeros(summary.d)
        for r in range(reps):
            y = simulate(spec, [0.3], VariancePoint(1.0, 1.0), seed=r)
            T = np.array(sufficient_stats(y, summary.B, summary).T)
            acc += np.array(summary.nu) * T / (np.array(summary.m) + 1.0)
        mean = acc / reps
        nu = np.array(summary.nu)
        assert np.all(np.abs(mean - nu) <= 3 * np.sqrt(2 * nu / reps))
