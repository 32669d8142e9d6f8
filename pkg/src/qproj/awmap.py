"""Correspondence with monic Askey-Wilson polynomials with ``d = 0``.

Only ``b + c`` and ``bc`` are stored, so arithmetic stays real even when
``b`` and ``c`` are complex conjugates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .family import DomainError, Params, coeff_row, eval_monic_p
from .qcore import Scalar, exact_sqrt

__all__ = [
    "AWParams",
    "EquivalenceReport",
    "aw_from_params",
    "aw_recurrence_row",
    "mu_squared",
    "shifted_equivalence_check",
]


@dataclass(frozen=True)
class AWParams:
    """Askey-Wilson data ``a, b + c, bc, d = 0`` and the scale ``alpha``.

    ``a_sq`` is always exact under the exact backend; ``a`` and ``alpha`` are
    exact only when their radicands are rational squares.
    """

    a: Scalar
    a_sq: Scalar
    b_plus_c: Scalar
    bc: Scalar
    alpha: Scalar
    alpha_A: Scalar
    alpha_C: Scalar
    q: Scalar
    d: int = 0

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in (self.a, self.alpha))


def _sqrt(value):
    if isinstance(value, Fraction):
        r = exact_sqrt(value)
        if r is not None:
            return r
    return math.sqrt(value)


def aw_from_params(params: Params, t) -> AWParams:
    """Solve for ``a, b + c, bc`` and ``alpha`` at time ``t``.

    Raises
    ------
    DomainError
        For ``q = 1``, ``eta = 0`` or a nonpositive radicand.
    """
    p = params
    if p.q == 1:
        raise DomainError("the Askey-Wilson map needs q < 1")
    if p.eta == 0:
        raise DomainError("the Askey-Wilson map needs eta != 0")
    t = p.scalar(t)
    u = (1 - p.q) * t + p.tau
    D = (1 - p.q) ** 2 + p.eta * p.theta * (1 - p.q) + p.eta**2 * p.tau
    if not (u > 0 and D > 0):
        raise DomainError("nonpositive radicand in the Askey-Wilson map")
    a_sq = p.eta**2 * u / D
    a = p.eta * _sqrt(u) / _sqrt(D)
    # a(b + c) = (eta theta (1-q) + 2 eta^2 tau) / D,  bc = tau / u
    a_bpc = (p.eta * p.theta * (1 - p.q) + 2 * p.eta**2 * p.tau) / D
    bc = p.tau / u
    alpha_A = D * a / (p.eta * (1 - p.q) ** 2)
    alpha_C = p.eta * u / ((1 - p.q) ** 2 * a)
    alpha = _sqrt(u) * _sqrt(D) / (1 - p.q) ** 2
    return AWParams(a, a_sq, a_bpc / a, bc, alpha, alpha_A, alpha_C, p.q)


def aw_recurrence_row(awp: AWParams, n: int) -> tuple:
    """``(A_n, C_n)`` of the Askey-Wilson recurrence with ``d = 0``.

    ``A_n = (1 - ab q^n)(1 - ac q^n)/a`` and ``C_n = a (1 - q^n)(1 - bc q^(n-1))``,
    evaluated through ``b + c`` and ``bc``.
    """
    if awp.a == 0:
        raise ZeroDivisionError("a = 0")
    a, q = awp.a, awp.q
    qn = q**n
    A = (1 - a * awp.b_plus_c * qn + awp.a_sq * awp.bc * qn * qn) / a
    C = a * (1 - qn) * (1 - awp.bc * q ** (n - 1)) if n > 0 else a * 0
    return A, C


def mu_squared(params: Params, t, s) -> Scalar:
    """``((1-q)s + tau) / ((1-q)t + tau)``."""
    p = params
    t, s = p.scalar(t), p.scalar(s)
    den = (1 - p.q) * t + p.tau
    if den == 0:
        raise DomainError("mu^2 undefined for q = 1 and tau = 0")
    return ((1 - p.q) * s + p.tau) / den


@dataclass(frozen=True)
class EquivalenceReport:
    """Residuals of the shifted monic recurrence against Askey-Wilson data."""

    max_residual: float
    coefficient_residual: float
    residuals: tuple


def shifted_equivalence_check(params: Params, t, n_max: int, points=None) -> EquivalenceReport:
    """Check ``rbar_n(x) = pbar_n(x - 1/eta; t)`` obeys the Askey-Wilson monic recurrence.

    ``x rbar_n = rbar_{n+1} + alpha(A_n + C_n) rbar_n + alpha^2 A_{n-1} C_n rbar_{n-1}``
    is evaluated at ``points`` (default five values in ``[1/eta, 1/eta + 2]``).
    Residuals are relative to ``1 + |x rbar_n|``. ``coefficient_residual``
    compares ``b_n + 1/eta`` and ``lambda_n`` to the Askey-Wilson
    coefficients, relative to ``1 + |value|``.
    """
    p = params
    if not p.eta > 0:
        raise DomainError("shifted_equivalence_check needs eta > 0")
    awp = aw_from_params(p, t)
    if points is None:
        points = [1 / p.eta + p.scalar(k) / 2 for k in range(5)]
    rows = [aw_recurrence_row(awp, n) for n in range(n_max + 1)]
    coef = 0.0
    for n in range(n_max + 1):
        r = coeff_row(p, n, t)
        A, C = rows[n]
        coef = max(coef, float(abs(r.b_n + 1 / p.eta - awp.alpha * (A + C)) / (1 + abs(r.b_n))))
        if n > 0:
            lam_aw = awp.alpha**2 * rows[n - 1][0] * C
            coef = max(coef, float(abs(r.lambda_n - lam_aw) / (1 + abs(r.lambda_n))))
    res = []
    for x in points:
        rb = eval_monic_p(p, n_max + 1, x - 1 / p.eta, t).values
        worst = 0.0
        for n in range(n_max + 1):
            A, C = rows[n]
            rhs = rb[n + 1] + awp.alpha * (A + C) * rb[n]
            if n > 0:
                rhs += awp.alpha**2 * rows[n - 1][0] * C * rb[n - 1]
            worst = max(worst, float(abs(x * rb[n] - rhs) / (1 + abs(x * rb[n]))))
        res.append(worst)
    return EquivalenceReport(max(res), coef, tuple(res))
