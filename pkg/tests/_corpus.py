"""Random model/data instances shared by the validation tests."""

import numpy as np

from twovc import ModelSpec, VariancePoint, build_one_way_model, simulate


def one_way_instance(rng):
    while True:
        q = int(rng.integers(2, 5))
        sizes = [int(k) for k in rng.integers(1, 5, size=q)]
        if max(sizes) > 1:
            break
    return build_one_way_model(sizes, np.ones(sum(sizes)))


def dense_instance(rng, n=8, p=2):
    """Random PSD ``V`` of rank ``n - 2`` sharing one direction with ``span(X)``.

    A fully generic rank-(n-2) ``V`` together with ``p = 2`` columns of ``X``
    spans R^n, which breaks both existence conditions.
    """
    X = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
    A = np.column_stack([X @ rng.standard_normal(p), rng.standard_normal((n, n - 3))])
    return ModelSpec(X, A @ A.T)


def corpus(size=100, seed=2024):
    """``(spec, y)`` pairs: alternating one-way and dense-V models, data simulated at random ``s``."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(size):
        spec = one_way_instance(rng) if k % 2 == 0 else dense_instance(rng)
        s = VariancePoint(float(rng.uniform(0.0, 3.0)), 1.0)
        y = simulate(spec, rng.standard_normal(spec.p), s, seed=int(rng.integers(2**31)))
        out.append((spec, y))
    return out
