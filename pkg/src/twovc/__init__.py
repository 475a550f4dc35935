"""Exact ML and REML estimation for linear mixed models with two variance components.

The likelihood equations are reduced to one polynomial in the variance
ratio ``rho = s1 / (s1 + s2)``; all of its complex roots are enumerated and
the real admissible ones compete with the ``s1 = 0`` boundary.
"""

from .degree import DegreeReport, degree_experiment, theoretical_bounds
from .errors import (
    AssumptionError,
    DegenerateDataError,
    DegenerateSpectrumError,
    ModelError,
    NoCriticalPointsError,
    SpuriousPointError,
    TwoVCError,
    ZeroPolynomialError,
)
from .estimator import FitConfig, FitResult, fit, gls_beta, simulate
from .likelihood import (
    build_ml_polynomial,
    build_reml_polynomial,
    h_value,
    profile_loglik,
    reml_loglik,
)
from .model import (
    ModelSpec,
    VariancePoint,
    build_one_way_model,
    check_genericity,
    check_ml_existence,
    check_reml_existence,
    null_space_basis,
    residual_projector,
)
from .polynomial import Polynomial
from .roots import CandidateSolution, all_roots, recover_candidates, solution_count, theta_family_check
from .spectral import SpectralSummary, SufficientStats, distinct_eigen, reduce, sufficient_stats

__version__ = "0.1.0"
