from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qproj.qcore import (
    Backend,
    MixedBackendError,
    backend_of,
    coerce,
    exact_sqrt,
    parse_rational,
    q_binomial,
    q_factorial,
    q_number,
)

from strategies import unit_q


def test_q_number_examples():
    assert q_number(0, F(3, 5)) == 0
    assert q_number(3, 1) == 3
    assert q_number(4, F(1, 2)) == F(15, 8)
    assert isinstance(q_number(4, F(1, 2)), F)


def test_q_factorial_examples():
    assert q_factorial(0, F(2, 3)) == 1
    assert q_factorial(3, 1) == 6
    assert q_factorial(4, 2) == 315


def test_q_binomial_examples():
    assert q_binomial(7, 0, F(1, 3)) == 1
    assert q_binomial(4, 2, 1) == 6
    assert q_binomial(4, 2, 2) == 35


@pytest.mark.parametrize("n,k", [(3, -1), (3, 4)])
def test_q_binomial_rejects_out_of_range(n, k):
    with pytest.raises(ValueError):
        q_binomial(n, k, F(1, 2))


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        q_number(-1, F(1, 2))


@pytest.mark.parametrize("q", [F(0), F(1, 3), F(1, 2), F(1)])
def test_q_pascal_both_forms(q):
    for k in range(1, 21):
        for j in range(1, k + 1):
            lhs = q_binomial(k + 1, j, q)
            assert lhs == q**j * q_binomial(k, j, q) + q_binomial(k, j - 1, q)
            assert lhs == q_binomial(k, j, q) + q ** (k - j + 1) * q_binomial(k, j - 1, q)


@pytest.mark.parametrize("q", [F(0), F(1, 3), F(1, 2), F(1), F(5, 7)])
def test_splitting_identity(q):
    for k in range(21):
        for j in range(k + 1):
            assert q_number(k - j, q) + q ** (k - j) * q_number(j, q) == q_number(k, q)


@given(unit_q(), st.integers(0, 20), st.data())
def test_binomial_symmetry(q, n, data):
    k = data.draw(st.integers(0, n))
    assert q_binomial(n, k, q) == q_binomial(n, n - k, q)


@given(unit_q(), st.integers(0, 18), st.data())
def test_binomial_matches_factorial_ratio(q, n, data):
    k = data.draw(st.integers(0, n))
    # factorial ratio is an independent route; it needs [m]_q != 0, true for q >= 0, m >= 1
    expected = q_factorial(n, q) / (q_factorial(k, q) * q_factorial(n - k, q))
    assert q_binomial(n, k, q) == expected


@given(unit_q(max_den=50), st.integers(0, 20), st.data())
def test_float_matches_exact(q, n, data):
    k = data.draw(st.integers(0, n))
    for fn, args in ((q_number, (n,)), (q_factorial, (n,)), (q_binomial, (n, k))):
        exact = fn(*args, q)
        approx = fn(*args, float(q))
        assert isinstance(approx, float)
        assert abs(approx - float(exact)) <= 1e-13 * abs(float(exact)) + 1e-300


def test_q_number_is_horner_not_quotient():
    # at q = 1 the quotient form divides by zero; the sum form does not
    assert q_number(5, 1.0) == 5.0


def test_backend_rules():
    assert backend_of(1, F(1, 2)) is Backend.EXACT
    assert backend_of(1, 2.0) is Backend.FLOAT
    assert backend_of(1, 2) is Backend.EXACT
    with pytest.raises(MixedBackendError):
        backend_of(F(1, 2), 0.5)
    with pytest.raises(MixedBackendError):
        coerce(0.5, Backend.EXACT)
    with pytest.raises(MixedBackendError):
        backend_of(q_number(3, F(1, 2)), 0.5)
    assert coerce(3, Backend.FLOAT) == 3.0 and isinstance(coerce(3, Backend.FLOAT), float)


def test_parse_rational():
    assert parse_rational("7/10") == F(7, 10)
    assert parse_rational(" -3 ") == -3
    assert parse_rational("0.3") == F(3, 10)
    assert parse_rational("1e-2") == F(1, 100)
    with pytest.raises(ValueError):
        parse_rational("seven")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_exact_sqrt():
    assert exact_sqrt(F(9, 4)) == F(3, 2)
    assert exact_sqrt(F(2)) is None
    assert exact_sqrt(F(0)) == 0
    assert exact_sqrt(F(-1)) is None
