"""Connection coefficients between the p and Q families and related calculus."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .family import (
    DomainError,
    Params,
    atom_candidate,
    aux_coeff_row,
    coeff_row,
    eval_monic_p,
    eval_nonmonic_p,
    monic_coefficients,
)
from .qcore import Scalar, q_binomial, q_factorial, q_number

__all__ = [
    "ConnectionTable",
    "InversionSolution",
    "SingularSystemError",
    "beta_bar",
    "beta_bar_expansion",
    "beta_by_recurrence",
    "beta_closed_form",
    "delta_apply",
    "delta_factor_check",
    "gamma",
    "growth_bound",
    "growth_constant",
    "product_formula_check",
    "solve_inversion",
    "zero_evaluation_check",
]


class SingularSystemError(ArithmeticError):
    """The inversion system has no unique solution."""


@dataclass(frozen=True)
class ConnectionTable:
    """Lower-triangular table ``beta[n][k]``, ``0 <= k <= n <= n_max``."""

    rows: tuple
    seed: tuple
    x: object = None
    s: object = None

    @property
    def n_max(self) -> int:
        return len(self.rows) - 1

    def __getitem__(self, nk):
        n, k = nk
        if k < 0 or k > n:
            return self.rows[0][0] * 0
        return self.rows[n][k]


def beta_by_recurrence(seed: Sequence, q, n_max: int) -> ConnectionTable:
    """Fill ``beta`` column by column from
    ``[k+1] beta_{n,k+1} = q^k [n-k] beta_{n,k} + [n] beta_{n-1,k}``."""
    if len(seed) < n_max + 1:
        raise ValueError("seed too short")
    zero = seed[0] * 0
    rows = [[seed[n]] + [zero] * n for n in range(n_max + 1)]
    for k in range(n_max):
        qk1 = q_number(k + 1, q)
        for n in range(k + 1, n_max + 1):
            rows[n][k + 1] = (q**k * q_number(n - k, q) * rows[n][k] + q_number(n, q) * rows[n - 1][k]) / qk1
    return ConnectionTable(tuple(tuple(r) for r in rows), tuple(seed[: n_max + 1]))


def beta_closed_form(seed: Sequence, q, n: int, k: int) -> Scalar:
    """``[n k]_q sum_j [k j]_q q^((k-j)(k-j-1)/2) seed_{n-j}``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    tot = sum(q_binomial(k, j, q) * q ** ((k - j) * (k - j - 1) // 2) * seed[n - j] for j in range(k + 1))
    return q_binomial(n, k, q) * tot


def gamma(n: int, k: int, j: int, q) -> Scalar:
    """``gamma_{n,k,j} = q^((k-j)(k-j-1)/2) [n]! / ([n-k]! [j]! [k-j]!)``, zero off range."""
    if not (0 <= j <= k <= n):
        return q * 0
    return (
        q ** ((k - j) * (k - j - 1) // 2)
        * q_factorial(n, q)
        / (q_factorial(n - k, q) * q_factorial(j, q) * q_factorial(k - j, q))
    )


def _prod_A_over_a(params: Params, k: int, x, s) -> Scalar:
    out = params.q * 0 + 1
    for j in range(k):
        out *= aux_coeff_row(params, j, x, 0, s).A_n / coeff_row(params, j, 0).a_n
    return out


def product_formula_check(params: Params, k: int, x, s):
    """Both sides of ``sum_j [k j] q^(...) p_{k-j}(x;s) = prod_{j<k} A_j(x,s)/a_j``.

    Returns ``(lhs, rhs, lhs == rhs)``.
    """
    p = eval_nonmonic_p(params, k, x, s).values
    q = params.q
    lhs = sum(q_binomial(k, j, q) * q ** ((k - j) * (k - j - 1) // 2) * p[k - j] for j in range(k + 1))
    rhs = _prod_A_over_a(params, k, x, s)
    return lhs, rhs, lhs == rhs


def zero_evaluation_check(params: Params, k: int, n: int, s):
    """Both sides of the evaluation of ``beta_{n,k}/[n k]`` at ``x = x_k(s)``.

    ``sum_j [k j] q^(...) p_{n-j}(x_k;s)`` against
    ``(-1)^(n-k) q^(-k(n-k)) prod_{j<k} A_j(x_k, s)/a_j``.
    """
    if not (params.eta > 0 and params.q > 0 and n >= k):
        raise DomainError("need eta > 0, q > 0, n >= k")
    q = params.q
    x = atom_candidate(params, k, s)
    p = eval_nonmonic_p(params, n, x, s).values
    lhs = sum(q_binomial(k, j, q) * q ** ((k - j) * (k - j - 1) // 2) * p[n - j] for j in range(k + 1))
    rhs = (-1) ** abs(n - k) * _prod_A_over_a(params, k, x, s) / q ** (k * (n - k))
    return lhs, rhs, lhs == rhs


def delta_apply(seq: Sequence, q, k: int, n: int) -> Scalar:
    """``(Delta_{q,k} y)_n = sum_j (-1)^j q^(j(j+1)/2) [k j]_q y_{n-j}``."""
    if n < k:
        raise ValueError("need n >= k")
    return sum((-1) ** j * q ** (j * (j + 1) // 2) * q_binomial(k, j, q) * seq[n - j] for j in range(k + 1))


def _r_apply(seq: Sequence, qj) -> list:
    # R = Delta_{q^j,1}: (R y)_n = y_n - q^j y_{n-1}, defined for n >= 1; index kept aligned
    return [None] + [seq[n] - qj * seq[n - 1] for n in range(1, len(seq))]


def _compose(seq: Sequence, powers: Sequence, q) -> list:
    cur = list(seq)
    for depth, j in enumerate(powers, start=1):
        nxt = _r_apply([v if v is not None else 0 for v in cur], q**j)
        cur = [None if n < depth else nxt[n] for n in range(len(nxt))]
    return cur


def delta_factor_check(seq: Sequence, q, k: int, n_max: int) -> bool:
    """Check ``Delta_{q,k} = R_1 ... R_k`` on ``seq`` and that the ``R_j`` commute."""
    if n_max < k:
        raise ValueError("need n_max >= k")
    seq = list(seq[: n_max + 1])
    direct = [delta_apply(seq, q, k, n) for n in range(k, n_max + 1)]
    fwd = _compose(seq, range(1, k + 1), q)[k:]
    rev = _compose(seq, range(k, 0, -1), q)[k:]
    return direct == fwd == rev


@dataclass(frozen=True)
class InversionSolution:
    """Constants of the general solution of ``Delta_{q,k} p = (-1)^k Pi_k``.

    ``p_n = (-1)^(n-k) q^(-nk) q^(k(k+1)/2) ([n k] + sum_r C_r q^(nr) [n k-r]) Pi_k``.
    """

    k: int
    q: object
    Pi_k: object
    C: tuple

    def value(self, n: int) -> Scalar:
        q, k = self.q, self.k
        tot = _binom0(n, k, q) + sum(c * q ** (n * r) * _binom0(n, k - r, q) for r, c in enumerate(self.C, start=1))
        return (-1) ** abs(n - k) * q ** (k * (k + 1) // 2) * tot * self.Pi_k / q ** (n * k)


def _binom0(n: int, k: int, q):
    return q_binomial(n, k, q) if 0 <= k <= n else q * 0


def _bareiss_solve(M: list, rhs: list) -> list:
    # M, rhs are Fractions; clear row denominators, then fraction-free elimination
    n = len(M)
    A = []
    for row, b in zip(M, rhs):
        lcm = 1
        for v in row + [b]:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        A.append([int(v * lcm) for v in row] + [int(b * lcm)])
    prev = 1
    for i in range(n):
        piv = next((r for r in range(i, n) if A[r][i] != 0), None)
        if piv is None:
            raise SingularSystemError("inversion system is singular")
        A[i], A[piv] = A[piv], A[i]
        for r in range(i + 1, n):
            for c in range(i + 1, n + 1):
                A[r][c] = (A[r][c] * A[i][i] - A[r][i] * A[i][c]) // prev
            A[r][i] = 0
        prev = A[i][i]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(A[i][n]) - sum(A[i][c] * x[c] for c in range(i + 1, n))
        x[i] = acc / A[i][i]
    return x


def _float_solve(M: list, rhs: list) -> list:
    import numpy as np

    try:
        return [float(v) for v in np.linalg.solve(np.array(M, dtype=float), np.array(rhs, dtype=float))]
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc


def solve_inversion(seed: Sequence, Pi_k, q, k: int) -> InversionSolution:
    """Fit ``C_1..C_k`` so the general solution reproduces ``seed[0..k-1]``.

    Any nonzero ``Pi_k`` is accepted (the formula is linear in it).
    """
    if q == 0:
        raise DomainError("solve_inversion needs q != 0")
    if Pi_k == 0:
        raise DomainError("Pi_k must be nonzero")
    if k == 0:
        return InversionSolution(0, q, Pi_k, ())
    M, rhs = [], []
    for n in range(k):
        M.append([q ** (n * r) * _binom0(n, k - r, q) for r in range(1, k + 1)])
        # [n k] = 0 for n < k
        rhs.append(seed[n] * (-1) ** abs(n - k) * q ** (n * k) / (q ** (k * (k + 1) // 2) * Pi_k))
    if isinstance(q, float) or any(isinstance(v, float) for v in rhs):
        C = _float_solve(M, rhs)
    else:
        C = _bareiss_solve([[Fraction(v) for v in row] for row in M], [Fraction(v) for v in rhs])
    return InversionSolution(k, q, Pi_k, tuple(C))


def _qbinom_bound(m: int, q) -> float:
    # sup_n [n m]_q: prod 1/(1-q^i) for q < 1
    out = 1.0
    for i in range(1, m + 1):
        out /= 1.0 - float(q) ** i
    return out


def growth_constant(params: Params, k: int, s) -> float:
    """A constant ``c_k(s)`` with ``|p_n(x_k(s); s)| <= c_k(s) q^(-kn)`` (``0 < q < 1``)
    or ``<= c_k(s) max(n, 1)^k`` (``q = 1``) for every ``n >= 0``.

    Built from the inversion solution seeded with ``p_0..p_{k-1}`` at
    ``x_k(s)``.
    """
    sol = _inversion_at_atom(params, k, s)
    q = params.q
    pref = float(q) ** (k * (k + 1) // 2) * abs(float(sol.Pi_k))
    if q == 1:
        return pref * (1.0 + sum(abs(float(c)) for c in sol.C))
    return pref * (_qbinom_bound(k, q) + sum(abs(float(c)) * _qbinom_bound(k - r, q) for r, c in enumerate(sol.C, 1)))


def _inversion_at_atom(params: Params, k: int, s) -> InversionSolution:
    x = atom_candidate(params, k, s)
    seed = eval_nonmonic_p(params, max(k - 1, 0), x, s).values
    return solve_inversion(seed, _prod_A_over_a(params, k, x, s), params.q, k)


def growth_bound(params: Params, k: int, s, n: int) -> float:
    """``c_k(s) q^(-kn)`` for ``0 < q < 1``, ``c_k(s) max(n, 1)^k`` for ``q = 1``."""
    c = growth_constant(params, k, s)
    if params.q == 1:
        return c * max(n, 1) ** k
    return c * float(params.q) ** (-k * n)


def beta_bar(params: Params, x, s, n_max: int) -> ConnectionTable:
    """Monic connection coefficients ``betabar_{n,k}(x, s)``.

    ``pbar_n(y;t) = sum_k betabar_{n,k}(x,s) Qbar_k(y;x,t,s)`` with
    ``betabar_{n,k} = beta_{n,k} prod_{j<n} a_j / prod_{j<k} A_j(x,s)``.
    On the zero set of the ``A_j`` the quotient is a removable singularity
    and the table is obtained from :func:`beta_bar_expansion` instead.
    """
    p = params
    if not p.eta > 0:
        raise DomainError("beta_bar requires eta > 0")
    x, s = p.scalar(x), p.scalar(s)
    prodA = [p.q * 0 + 1]
    proda = [p.q * 0 + 1]
    for j in range(n_max):
        prodA.append(prodA[-1] * aux_coeff_row(p, j, x, 0, s).A_n)
        proda.append(proda[-1] * coeff_row(p, j, 0).a_n)
    if any(v == 0 for v in prodA):
        return beta_bar_expansion(p, x, s, s + 1, n_max)
    seed = eval_nonmonic_p(p, n_max, x, s).values
    table = beta_by_recurrence(seed, p.q, n_max)
    rows = tuple(
        tuple(table.rows[n][k] * proda[n] / prodA[k] for k in range(n + 1)) for n in range(n_max + 1)
    )
    return ConnectionTable(rows, tuple(eval_monic_p(p, n_max, x, s).values), x, s)


def _monic_polys(diag: Sequence, lam: Sequence, n_max: int) -> list:
    # coefficient lists (ascending powers of y) from y P_n = P_{n+1} + diag_n P_n + lam_n P_{n-1}
    zero = diag[0] * 0
    polys = [[zero + 1]]
    prev = []
    for n in range(n_max):
        cur = polys[-1]
        nxt = [zero] + list(cur)
        for i, c in enumerate(cur):
            nxt[i] -= diag[n] * c
        for i, c in enumerate(prev):
            nxt[i] -= lam[n] * c
        prev = cur
        polys.append(nxt)
    return polys


def beta_bar_expansion(params: Params, x, s, t, n_max: int) -> ConnectionTable:
    """``betabar_{n,k}`` by expanding ``pbar_n(.;t)`` in the basis ``Qbar_k(.;x,t,s)``.

    Works on coefficient lists in ``y`` and needs no division by ``A_j``,
    so it is valid for every ``x``. The result does not depend on ``t``.
    """
    p = params
    x, s, t = p.scalar(x), p.scalar(s), p.scalar(t)
    N = n_max + 1
    diag, lam = monic_coefficients(p, t, N)
    pbar = _monic_polys(diag, lam, n_max)
    B, AC = [], [p.q * 0]
    for n in range(N):
        row = aux_coeff_row(p, n, x, t, s)
        B.append(row.B_n)
        if n > 0:
            AC.append(row.lambda_n)
    qbar = _monic_polys(B, AC, n_max)
    rows = []
    for n in range(N):
        rem = list(pbar[n])
        coef = [p.q * 0] * (n + 1)
        for k in range(n, -1, -1):
            c = rem[k]
            coef[k] = c
            if c:
                for i, v in enumerate(qbar[k]):
                    rem[i] -= c * v
        rows.append(tuple(coef))
    return ConnectionTable(tuple(rows), tuple(eval_monic_p(p, n_max, x, s).values), x, s)
