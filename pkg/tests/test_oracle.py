import numpy as np
import pytest
import scipy.optimize

from twovc import VariancePoint, build_one_way_model, reduce, simulate, sufficient_stats
from twovc.oracle import (
    OracleConfig,
    anova_balanced,
    dense_loglik,
    dense_objective,
    dense_reml_loglik,
    grid_refine_mle,
)

from conftest import Y22


class TestAnova:
    def test_golden(self):
        a = anova_balanced(Y22, 2, 2)
        assert a == {"sigma1_sq": 2.5, "sigma2_sq": 1.25, "boundary_flag": False, "admissible": True}

    def test_boundary(self):
        a = anova_balanced([1.0, 5.0, 2.0, 4.0], 2, 2)
        assert a["boundary_flag"] and a["sigma1_sq"] == 0.0

    def test_degenerate_within(self):
        a = anova_balanced([1.0, 1.0, 3.0, 3.0], 2, 2)
        assert not a["admissible"]

    def test_errors(self):
        with pytest.raises(ValueError):
            anova_balanced([1.0, 2.0], 2, 1)
        with pytest.raises(ValueError):
            anova_balanced([1.0, 2.0, 3.0], 2, 2)


class TestGridRefine:
    def test_golden(self, reduced22):
        summary, stats = reduced22
        s = grid_refine_mle(stats, summary, "ml")
        assert s.sigma1_sq == pytest.approx(0.9375, rel=1e-6)
        s = grid_refine_mle(stats, summary, "reml")
        assert s.sigma1_sq == pytest.approx(2.5, rel=1e-6)

    def test_config(self):
        with pytest.raises(ValueError):
            OracleConfig(rho_grid_points=10)

    @pytest.mark.parametrize("mode", ["ml", "reml"])
    def test_matches_scipy(self, mode):
        # independent two-dimensional optimiser on the dense likelihood
        spec = build_one_way_model([3, 3, 3], np.ones(9))
        y = simulate(spec, [0.0], VariancePoint(2.0, 1.0), seed=12)
        summary = reduce(spec)
        stats = sufficient_stats(y, summary.B, summary)
        g = grid_refine_mle(stats, summary, mode)
        f = lambda t: -dense_objective(VariancePoint(np.exp(t[0]), np.exp(t[1])), y, spec, mode)
        opt = scipy.optimize.minimize(f, [0.0, 0.0], method="Nelder-Mead",
                                      options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000})
        assert g.sigma1_sq == pytest.approx(np.exp(opt.x[0]), rel=1e-4)
        assert g.sigma2_sq == pytest.approx(np.exp(opt.x[1]), rel=1e-4)


class TestDense:
    def test_ml_constant_free(self, spec22):
        # log det S for S = s1 V + s2 I with eigenvalues (2 s1 + s2)^2 s2^2
        s = VariancePoint(0.9375, 1.25)
        v = dense_loglik(s, Y22, spec22)
        expected = -2 * np.log(3.125) - 2 * np.log(1.25) - (6.25 / 3.125 + 2 * 1.25 / 1.25)
        assert v == pytest.approx(expected)

    def test_reml(self, spec22):
        s = VariancePoint(2.5, 1.25)
        expected = -np.log(6.25) - 2 * np.log(1.25) - (6.25 / 6.25 + 2.0)
        assert dense_reml_loglik(s, Y22, spec22) == pytest.approx(expected)
