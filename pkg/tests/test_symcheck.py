from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qproj.family import Params, eval_nonmonic_p
from qproj.qcore import q_binomial, q_number
from qproj.symcheck import (
    BASIS,
    Certificate,
    MultiPoly,
    RationalFunction,
    gamma_poly,
    h2_polynomial,
    q_binomial_poly,
    q_number_poly,
    verify_boundary_gammas,
    verify_delta_claim,
    verify_H2_t_cancellation,
    verify_HH0,
    verify_HHs,
    verify_pascal,
    verify_splitting,
)

from strategies import rationals, unit_q

q = MultiPoly.var("q")


def test_multipoly_arithmetic():
    assert (q + 1) * (q - 1) == q**2 - 1
    assert (q + 1) ** 0 == MultiPoly.const(1)
    assert (q - q).is_zero()
    x = MultiPoly.var("x")
    e = (x * q + 3) ** 2
    assert e.degree("x") == 2 and e.degree("t") == 0
    assert e.coefficient("x", 1) == 6 * q
    assert e.eval({"q": F(1, 2), "x": 2}) == 16


def test_multipoly_no_division():
    with pytest.raises(TypeError):
        q / q


def test_mixed_variable_sets():
    p0 = MultiPoly.var("p0")
    assert (p0 + q) - p0 == q
    assert p0 * 0 == MultiPoly(BASIS)


def test_rational_function():
    r = RationalFunction(q + 1) / RationalFunction(q - 1)
    assert r * RationalFunction(q - 1) == RationalFunction(q + 1)
    assert (r - r).is_zero()
    assert r.eval({"q": F(3)}) == 2
    assert r.eval({"x": 1}) == r


def test_q_polys():
    for n in range(8):
        assert q_number_poly(n).eval({"q": 1}) == n
        for k in range(n + 1):
            assert q_binomial_poly(n, k).eval({"q": F(2, 3)}) == q_binomial(n, k, F(2, 3))
    assert gamma_poly(3, 2, 1) == (1 + q + q**2) * (1 + q)
    assert gamma_poly(3, 4, 1).is_zero()


@given(unit_q(), st.integers(0, 12))
def test_q_number_poly_matches_numeric(qv, n):
    assert q_number_poly(n).eval({"q": qv}) == q_number(n, qv)


@pytest.mark.parametrize("n", range(1, 11))
def test_hhs(n):
    for k in range(1, n + 1):
        for j in range(1, k + 1):
            c = verify_HHs(n, k, j)
            assert c.ok, c.dump()


@pytest.mark.parametrize("n", range(1, 9))
def test_hh0(n):
    for k in range(1, n + 1):
        for j in range(1, k + 1):
            c = verify_HH0(n, k, j)
            assert c.ok, c.dump()


def test_index_checks():
    with pytest.raises(ValueError):
        verify_HHs(2, 3, 1)
    with pytest.raises(ValueError):
        verify_boundary_gammas(0)
    with pytest.raises(ValueError):
        verify_delta_claim(2, 1, 1)


@pytest.mark.parametrize("n", range(0, 7))
def test_h2_t_cancellation(n):
    for k in range(n + 1):
        c = verify_H2_t_cancellation(n, k)
        assert c.ok, c.dump()
        assert h2_polynomial(n, k).degree("t") <= 1


@given(
    rationals(1, 3, 6),
    rationals(0, 2, 6),
    rationals(0, 1, 6),
    unit_q(6),
    rationals(-2, 2, 6),
    rationals(0, 2, 6),
    rationals(0, 3, 6),
    st.integers(0, 5),
)
def test_h2_vanishes_on_actual_polynomials(eta, theta, tau, qv, x, s, t, n):
    p = Params(eta, theta, tau, qv)
    ps = eval_nonmonic_p(p, n + 1, x, s)
    vals = {"q": qv, "v": 1 / eta, "theta": theta, "w": eta * tau, "s": s, "t": t, "x": x}
    vals.update({f"p{m}": ps[m] for m in range(n + 2)})
    for k in range(n + 1):
        assert h2_polynomial(n, k).eval(vals) == 0


def test_h2_negative_control():
    # wrong time in the seed breaks the identity
    p = Params(F(3, 2), F(1, 3), F(2, 7), F(3, 5))
    x, s = F(2, 9), F(4, 5)
    ps = eval_nonmonic_p(p, 4, x, s + 1)
    vals = {"q": p.q, "v": 1 / p.eta, "theta": p.theta, "w": p.eta * p.tau, "s": s, "t": 1, "x": x}
    vals.update({f"p{m}": ps[m] for m in range(5)})
    assert any(h2_polynomial(3, k).eval(vals) != 0 for k in range(4))


@pytest.mark.parametrize("k", range(1, 7))
def test_boundary_gammas(k):
    certs = verify_boundary_gammas(k)
    assert certs
    for c in certs:
        assert c.ok, c.dump()


def test_pascal_and_splitting():
    for k in range(1, 21):
        for j in range(0, k + 1):
            if 1 <= j <= k - 1:
                assert verify_pascal(k, j, F(3, 7))
            assert verify_splitting(k, j).ok


@pytest.mark.parametrize("k", range(1, 5))
def test_delta_claim(k):
    for r in range(k + 1):
        for n in range(k, 9):
            c = verify_delta_claim(k, r, n)
            assert c.ok, c.dump()


def test_certificate_reports_failure():
    c = Certificate("demo", (1,), q - 1)
    assert not c.ok
    assert c.dump().startswith("demo(1,)")
    assert "q" in c.dump()
