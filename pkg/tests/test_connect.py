from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from qproj.connect import (
    beta_bar,
    beta_bar_expansion,
    beta_by_recurrence,
    beta_closed_form,
    delta_apply,
    delta_factor_check,
    gamma,
    growth_bound,
    growth_constant,
    product_formula_check,
    solve_inversion,
    zero_evaluation_check,
)
from qproj.family import DomainError, Params, atom_candidate, aux_coeff_row, coeff_row, eval_monic_p, eval_nonmonic_p, eval_Q
from qproj.qcore import q_binomial, q_number

from strategies import rationals, standard_params, unit_q

P0 = Params(1, F(1, 2), F(3, 10), F(7, 10))


@given(st.lists(rationals(-5, 5, 20), min_size=21, max_size=21), unit_q())
def test_recurrence_matches_closed_form(seed, q):
    table = beta_by_recurrence(seed, q, 20)
    for n in range(21):
        assert table[n, 0] == seed[n]
        for k in range(n + 1):
            assert table[n, k] == beta_closed_form(seed, q, n, k)
    assert table[3, 5] == 0 and table[3, -1] == 0


def test_constant_seed_q1():
    # seed 1 at q = 1: beta_{n,k} = C(n,k) sum_j C(k,j) = C(n,k) 2^k
    table = beta_by_recurrence([F(1)] * 11, 1, 10)
    for n in range(11):
        for k in range(n + 1):
            assert table[n, k] == q_binomial(n, k, 1) * 2**k


@given(standard_params(), rationals(), rationals(0, 4))
def test_beta11(p, x, s):
    seed = eval_nonmonic_p(p, 1, x, s).values
    assert beta_by_recurrence(seed, p.q, 1)[1, 1] == 1 + p.eta * x


def test_gamma():
    q = F(2, 5)
    assert gamma(3, 2, 1, q) == q_number(3, q) * q_number(2, q)
    assert gamma(3, 4, 1, q) == 0 and gamma(3, 2, 3, q) == 0
    for n in range(8):
        for k in range(n + 1):
            for j in range(k + 1):
                expected = q_binomial(n, k, q) * q_binomial(k, j, q) * q ** ((k - j) * (k - j - 1) // 2)
                assert gamma(n, k, j, q) == expected


@given(standard_params(), rationals(), rationals(0, 4))
def test_product_formula(p, x, s):
    assert product_formula_check(p, 0, x, s)[:2] == (1, 1)
    lhs, rhs, ok = product_formula_check(p, 1, x, s)
    assert ok and lhs == 1 + p.eta * x
    for k in range(2, 16):
        assert product_formula_check(p, k, x, s)[2]


@pytest.mark.parametrize("p", [P0, Params(2, 0, F(3, 10), F(1, 2)), Params(1, 2, 1, 1)])
def test_zero_evaluation(p):
    for s in (F(2, 5), F(3)):
        for k in range(7):
            for n in range(k, 16):
                lhs, rhs, ok = zero_evaluation_check(p, k, n, s)
                assert ok, (k, n)
        assert all(zero_evaluation_check(p, 0, n, s)[0] == (-1) ** n for n in range(31))


def test_zero_evaluation_k1_is_product_formula():
    s = F(2, 5)
    x1 = atom_candidate(P0, 1, s)
    assert zero_evaluation_check(P0, 1, 1, s)[0] == product_formula_check(P0, 1, x1, s)[0]


def test_zero_evaluation_domain():
    with pytest.raises(DomainError):
        zero_evaluation_check(Params(1, 0, 0, 0), 1, 2, 1)


@pytest.mark.parametrize("p", [P0, Params(1, 2, 1, 1)])
def test_beta_vanishes_at_lower_zeros(p):
    s = F(3, 4)
    for j in range(10):
        x = atom_candidate(p, j, s)
        table = beta_by_recurrence(eval_nonmonic_p(p, 10, x, s).values, p.q, 10)
        for k in range(j + 1, 11):
            for n in range(k, 11):
                assert table[n, k] == 0


@given(standard_params(), rationals(), rationals(0, 4))
def test_diagonal_is_product(p, x, s):
    table = beta_by_recurrence(eval_nonmonic_p(p, 8, x, s).values, p.q, 8)
    prod = F(1)
    for n in range(9):
        assert table[n, n] == prod
        prod *= aux_coeff_row(p, n, x, 0, s).A_n / coeff_row(p, n, 0).a_n


def test_delta_examples():
    q = F(1, 3)
    assert delta_apply([F(1)] * 5, q, 1, 3) == 1 - q
    for k in range(1, 6):
        y = [q_binomial(n, k, q) if n >= k else F(0) for n in range(15)]
        assert all(delta_apply(y, q, k, n) == 1 for n in range(k, 15))
        for r in range(1, k + 1):
            y = [q_binomial(n, k - r, q) * q ** (r * n) if n >= k - r else F(0) for n in range(15)]
            assert all(delta_apply(y, q, k, n) == 0 for n in range(k, 15))
    with pytest.raises(ValueError):
        delta_apply([1, 2], q, 3, 1)


@given(st.lists(rationals(), min_size=12, max_size=12), st.integers(1, 5))
def test_delta_factorization(seq, k):
    assert delta_factor_check(seq, F(1, 2), k, 11)
    assert delta_factor_check(seq, F(1), k, 11)


@given(st.lists(rationals(), min_size=10, max_size=10), st.integers(1, 5))
def test_q1_delta_is_difference_power(seq, k):
    diff = list(seq)
    for _ in range(k):
        diff = [None] + [diff[n] - diff[n - 1] if diff[n - 1] is not None else None for n in range(1, len(diff))]
    for n in range(k, 10):
        assert delta_apply(seq, 1, k, n) == diff[n]


def test_inversion_q1_k1():
    sol = solve_inversion([F(5)], F(2), 1, 1)
    # p_n = (-1)^(n-1) (n + C_1) Pi_1 with p_0 = 5
    for n in range(10):
        assert sol.value(n) == (-1) ** (n - 1) * (n + sol.C[0]) * 2
    assert sol.value(0) == 5


@given(st.lists(rationals(-5, 5), min_size=5, max_size=5), unit_q().filter(lambda q: q > 0), st.integers(1, 5))
def test_inversion_reproduces_seed(seed, q, k):
    sol = solve_inversion(seed, F(3, 2), q, k)
    assert [sol.value(n) for n in range(k)] == seed[:k]


@pytest.mark.parametrize("p", [P0, Params(2, 0, F(3, 10), F(1, 2)), Params(1, 2, 1, 1)])
def test_inversion_extrapolates_at_atoms(p):
    s = F(2, 5)
    for k in range(5):
        x = atom_candidate(p, k, s)
        vals = eval_nonmonic_p(p, 15, x, s).values
        Pi = product_formula_check(p, k, x, s)[1]
        sol = solve_inversion(vals[:k], Pi, p.q, k)
        assert [sol.value(n) for n in range(16)] == list(vals)


def test_inversion_rejections():
    with pytest.raises(DomainError):
        solve_inversion([1], 1, 0, 1)
    with pytest.raises(DomainError):
        solve_inversion([1], 0, F(1, 2), 1)


def test_inversion_float_path():
    sol = solve_inversion([0.5, -1.25], 1.5, 0.7, 2)
    assert abs(sol.value(0) - 0.5) < 1e-12 and abs(sol.value(1) + 1.25) < 1e-12


@pytest.mark.parametrize("p", [P0, Params(2, 0, F(3, 10), F(1, 2)), Params(1, 2, 1, 1), Params(1, 0, F(3, 10), 1)])
def test_growth_bound_dominates(p):
    s = F(2, 5)
    for k in range(4):
        x = atom_candidate(p, k, s)
        vals = eval_nonmonic_p(p, 40, x, s).values
        for n in range(41):
            assert abs(float(vals[n])) <= growth_bound(p, k, s, n) * (1 + 1e-12)


def test_growth_bound_k0_and_q1_shape():
    p = Params(1, 2, 1, 1)
    assert growth_constant(p, 0, F(2, 5)) >= 1
    c = growth_constant(p, 2, F(2, 5))
    assert all(growth_bound(p, 2, F(2, 5), n) == c * n**2 for n in range(1, 30))


def test_naive_constant_is_not_a_bound():
    # q^{k(k+1)/2} |Pi_k| (1 + sum |C_r|) q^{-kn} is exceeded, so a larger constant is used
    p = P0
    s, k = F(2, 5), 3
    x = atom_candidate(p, k, s)
    vals = eval_nonmonic_p(p, 40, x, s).values
    Pi = product_formula_check(p, k, x, s)[1]
    sol = solve_inversion(vals[:k], Pi, p.q, k)
    naive = float(p.q) ** (k * (k + 1) // 2) * abs(float(Pi)) * (1 + sum(abs(float(c)) for c in sol.C))
    assert max(abs(float(vals[n])) * float(p.q) ** (k * n) / naive for n in range(41)) > 1


@given(standard_params(), rationals(), rationals(0, 3))
def test_beta_bar_first_column(p, x, s):
    bb = beta_bar(p, x, s, 12)
    assert [bb[n, 0] for n in range(13)] == list(eval_monic_p(p, 12, x, s).values)


@given(standard_params(), rationals(-1, 3), rationals(0, 2), rationals(0, 2))
def test_expansion_identity(p, x, s, dt):
    t = s + dt + F(1, 10)
    bb = beta_bar(p, x, s, 10)
    for i in range(20):
        y = F(i - 7, 3)
        Qb = eval_Q(p, 10, y, x, t, s).values
        pb = eval_monic_p(p, 10, y, t).values
        assert all(sum(bb[n, k] * Qb[k] for k in range(n + 1)) == pb[n] for n in range(11))


@pytest.mark.parametrize("k", range(4))
def test_beta_bar_on_zero_set(k):
    s = F(2, 5)
    x = atom_candidate(P0, k, s)
    bb = beta_bar(P0, x, s, 8)
    for t in (F(1), F(3)):
        Qb = eval_Q(P0, 8, F(1, 2), x, t, s).values
        pb = eval_monic_p(P0, 8, F(1, 2), t).values
        assert all(sum(bb[n, j] * Qb[j] for j in range(n + 1)) == pb[n] for n in range(9))


def test_beta_bar_t_independent():
    x, s = F(1, 3), F(2, 5)
    a = beta_bar_expansion(P0, x, s, F(1), 8)
    b = beta_bar_expansion(P0, x, s, F(7, 2), 8)
    assert a.rows == b.rows == beta_bar(P0, x, s, 8).rows


def test_beta_bar_requires_positive_eta():
    with pytest.raises(DomainError):
        beta_bar(Params(-1, 0, 0, 1), 0, 1, 3)
