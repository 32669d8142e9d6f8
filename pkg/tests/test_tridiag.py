import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import eigh_tridiagonal

from qproj.tridiag import EigenConvergenceError, gauss_weights, ql_implicit


def _scipy(d, e):
    w, v = eigh_tridiagonal(np.array(d), np.array(e))
    return w, v[0] ** 2


@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_matches_scipy(n, seed):
    rng = np.random.default_rng(seed)
    d = rng.normal(size=n).tolist()
    e = (rng.uniform(0.05, 2.0, size=n - 1)).tolist()
    nodes, first = ql_implicit(d, e)
    w_ref, z_ref = _scipy(d, e)
    scale = max(1.0, max(abs(x) for x in w_ref))
    assert np.all(np.diff(nodes) >= 0)
    assert np.max(np.abs(np.array(nodes) - w_ref)) <= 1e-12 * scale
    weights = gauss_weights(d, e, nodes)
    assert np.max(np.abs(np.array(weights) - z_ref)) <= 1e-12
    assert abs(sum(weights) - 1) <= 1e-12
    assert np.max(np.abs(np.array(first) ** 2 - z_ref)) <= 1e-10


def test_single_entry():
    nodes, first = ql_implicit([3.5], [])
    assert nodes == [3.5] and abs(first[0]) == 1
    assert gauss_weights([3.5], [], nodes) == [1.0]


def test_iteration_cap_reported():
    d = [0.0] * 12
    e = [1.0] * 11
    with pytest.raises(EigenConvergenceError) as info:
        ql_implicit(d, e, max_iter=1)
    assert info.value.iterations >= 1


def test_tiny_weights_have_relative_accuracy():
    # Hermite-like Jacobi matrix: weights span many orders of magnitude
    n = 40
    d = [0.0] * n
    e = [math.sqrt(k / 2) for k in range(1, n)]
    nodes, _ = ql_implicit(d, e)
    weights = gauss_weights(d, e, nodes)
    mpmath.mp.dps = 60
    J = mpmath.zeros(n, n)
    for i in range(n - 1):
        J[i, i + 1] = J[i + 1, i] = mpmath.sqrt(mpmath.mpf(i + 1) / 2)
    ev, Q = mpmath.eighe(J)
    ref = sorted((float(ev[i]), float(Q[0, i] ** 2)) for i in range(n))
    mpmath.mp.dps = 15
    for (x_ref, w_ref), x, w in zip(ref, nodes, weights):
        assert abs(x - x_ref) <= 1e-12 * max(1, abs(x_ref))
        assert abs(w - w_ref) <= 1e-11 * w_ref
    assert min(weights) < 1e-20
