"""Recurrence coefficients and evaluation of the p, p-bar, Q, Q-bar families.

All functions are pure. Scalars follow :mod:`qproj.qcore`: every argument
must share the backend of the :class:`Params` it is used with (integers
are neutral).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .qcore import Backend, Scalar, backend_of, coerce, q_number

__all__ = [
    "AuxCoeffRow",
    "CoeffRow",
    "DomainError",
    "Params",
    "PolySequence",
    "Reparam",
    "SupportIndex",
    "ZeroPivotError",
    "atom_candidate",
    "aux_coeff_row",
    "aux_monic_coefficients",
    "coeff_row",
    "eval_Q",
    "eval_monic_p",
    "eval_nonmonic_p",
    "k_star",
    "monic_coefficients",
    "reparam",
    "sign_flip",
]


class DomainError(ValueError):
    """Arguments outside the domain where a formula is defined."""


class ZeroPivotError(ArithmeticError):
    """A recurrence needed to divide by an exactly vanishing coefficient."""

    def __init__(self, index: int, what: str = "pivot"):
        super().__init__(f"zero {what} at index {index}")
        self.index = index


@dataclass(frozen=True)
class Params:
    """The parameters ``(eta, theta, tau, q)`` of the family.

    Integers are promoted to Fraction. Floats select the float backend;
    mixing floats and Fractions raises ``MixedBackendError``.
    """

    eta: Scalar
    theta: Scalar
    tau: Scalar
    q: Scalar

    def __post_init__(self):
        backend = backend_of(self.eta, self.theta, self.tau, self.q)
        for name in ("eta", "theta", "tau", "q"):
            object.__setattr__(self, name, coerce(getattr(self, name), backend))
        if self.tau < 0:
            raise DomainError(f"tau must be >= 0, got {self.tau}")
        if not 0 <= self.q <= 1:
            raise DomainError(f"q must lie in [0, 1], got {self.q}")

    @property
    def backend(self) -> Backend:
        return Backend.FLOAT if isinstance(self.q, float) else Backend.EXACT

    @property
    def standard(self) -> bool:
        """True iff ``eta * theta >= 0``."""
        return self.eta * self.theta >= 0

    def scalar(self, value) -> Scalar:
        """Bring ``value`` into this backend (ints only cross over)."""
        return coerce(value, self.backend)

    def as_float(self) -> "Params":
        return Params(float(self.eta), float(self.theta), float(self.tau), float(self.q))


@dataclass(frozen=True)
class CoeffRow:
    """Coefficients ``a_n, b_n(t), c_n(t)`` and ``lambda_n = a_{n-1} c_n(t)``.

    ``a_n`` and ``c_n`` are ``None`` when ``eta = 0``.
    """

    n: int
    t: Scalar
    a_n: Optional[Scalar]
    b_n: Scalar
    c_n: Optional[Scalar]
    lambda_n: Scalar


@dataclass(frozen=True)
class AuxCoeffRow:
    """Coefficients ``A_n(x,s), B_n(x,t,s), C_n(t,s)`` and ``A_{n-1} C_n``."""

    n: int
    x: Scalar
    t: Scalar
    s: Scalar
    A_n: Optional[Scalar]
    B_n: Scalar
    C_n: Optional[Scalar]
    lambda_n: Scalar


@dataclass(frozen=True)
class PolySequence:
    """Values ``P_0(y), ..., P_n(y)`` of a polynomial family at one point."""

    values: tuple
    family: str

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _qm(n: int, q: Scalar) -> Scalar:
    # [n-1]_q where only n >= 1 is meaningful; callers multiply by [n]_q = 0 at n = 0
    return q_number(n - 1, q) if n > 0 else q * 0


def _a(p: Params, n: int) -> Scalar:
    Q = q_number(n, p.q)
    return 1 / p.eta + p.theta * Q + p.eta * p.tau * Q * Q


def _eta_a(p: Params, n: int) -> Scalar:
    # eta * a_n, finite at eta = 0
    Q = q_number(n, p.q)
    return 1 + p.eta * p.theta * Q + p.eta * p.eta * p.tau * Q * Q


def _b(p: Params, n: int, t: Scalar) -> Scalar:
    if n == 0:
        return p.q * 0
    Q = q_number(n, p.q)
    return (t * p.eta + p.theta + (Q + _qm(n, p.q)) * p.eta * p.tau) * Q


def _c_over_eta(p: Params, n: int, t: Scalar) -> Scalar:
    if n == 0:
        return p.q * 0
    return (t + p.tau * _qm(n, p.q)) * q_number(n, p.q)


def coeff_row(params: Params, n: int, t) -> CoeffRow:
    """Recurrence coefficients of ``p_n(.; t)`` at index ``n``.

    Examples
    --------
    >>> r = coeff_row(Params(1, 2, 3, 1), 2, 1)
    >>> (r.a_n, r.b_n, r.c_n)
    (Fraction(17, 1), Fraction(24, 1), Fraction(8, 1))
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    t = params.scalar(t)
    lam = _eta_a(params, n - 1) * _c_over_eta(params, n, t) if n > 0 else params.q * 0
    if params.eta == 0:
        return CoeffRow(n, t, None, _b(params, n, t), None, lam)
    c = params.eta * _c_over_eta(params, n, t)
    return CoeffRow(n, t, _a(params, n), _b(params, n, t), c, lam)


def monic_coefficients(params: Params, t, N: int) -> tuple[list, list]:
    """Return ``([b_0..b_{N-1}], [lambda_0..lambda_{N-1}])`` with ``lambda_0 = 0``."""
    t = params.scalar(t)
    b = [_b(params, n, t) for n in range(N)]
    lam = [params.q * 0] + [_eta_a(params, n - 1) * _c_over_eta(params, n, t) for n in range(1, N)]
    return b, lam


def eval_monic_p(params: Params, n_max: int, y, t) -> PolySequence:
    """Monic ``pbar_0(y;t), ..., pbar_{n_max}(y;t)`` by the three-term recurrence."""
    y, t = params.scalar(y), params.scalar(t)
    b, lam = monic_coefficients(params, t, n_max)
    return PolySequence(tuple(_run_monic(y, b, lam, n_max)), "p-monic")


def _run_monic(y, diag: Sequence, lam: Sequence, n_max: int) -> list:
    out = [y * 0 + 1]
    prev = y * 0
    for n in range(n_max):
        nxt = (y - diag[n]) * out[n] - lam[n] * prev
        prev = out[n]
        out.append(nxt)
    return out


def eval_nonmonic_p(params: Params, n_max: int, y, t) -> PolySequence:
    """Non-monic ``p_0(y;t), ..., p_{n_max}(y;t)``.

    Raises
    ------
    DomainError
        If ``eta = 0``.
    ZeroPivotError
        If some ``a_n`` with ``n < n_max`` vanishes.
    """
    if params.eta == 0:
        raise DomainError("non-monic polynomials need eta != 0")
    y, t = params.scalar(y), params.scalar(t)
    out = [y * 0 + 1]
    prev = y * 0
    for n in range(n_max):
        a = _a(params, n)
        if a == 0:
            raise ZeroPivotError(n, "a_n")
        c = params.eta * _c_over_eta(params, n, t)
        nxt = ((y - _b(params, n, t)) * out[n] - c * prev) / a
        prev = out[n]
        out.append(nxt)
    return PolySequence(tuple(out), "p")


def _aux(params: Params, n: int, x, t, s):
    p = params
    Q = q_number(n, p.q)
    qn = p.q**n
    B = _b(p, n, t) + qn * x
    if n > 0:
        B -= (1 + p.q) * p.q ** (n - 1) * p.eta * s * Q
    # eta * A_n and C_n / eta stay finite when eta = 0
    eta_A = _eta_a(p, n) + p.eta * qn * x - p.eta * p.eta * s * qn * Q
    C_over_eta = _c_over_eta(p, n, t) - (p.q ** (n - 1) * s * Q if n > 0 else 0)
    return eta_A, B, C_over_eta


def aux_coeff_row(params: Params, n: int, x, t, s) -> AuxCoeffRow:
    """Coefficients of the Q-family at index ``n``.

    ``A_n`` and ``C_n`` are ``None`` when ``eta = 0``; ``lambda_n`` is
    ``A_{n-1} C_n`` and always finite.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    x, t, s = (params.scalar(v) for v in (x, t, s))
    eta_A, B, C_e = _aux(params, n, x, t, s)
    lam = _aux(params, n - 1, x, t, s)[0] * C_e if n > 0 else params.q * 0
    if params.eta == 0:
        return AuxCoeffRow(n, x, t, s, None, B, None, lam)
    return AuxCoeffRow(n, x, t, s, eta_A / params.eta, B, params.eta * C_e, lam)


def aux_monic_coefficients(params: Params, x, t, s, N: int) -> tuple[list, list]:
    """Return ``([B_0..B_{N-1}], [A_{n-1} C_n for n < N])`` with entry 0 equal to 0."""
    x, t, s = (params.scalar(v) for v in (x, t, s))
    rows = [_aux(params, n, x, t, s) for n in range(N)]
    diag = [r[1] for r in rows]
    lam = [params.q * 0] + [rows[n - 1][0] * rows[n][2] for n in range(1, N)]
    return diag, lam


def eval_Q(params: Params, n_max: int, y, x, t, s, monic: bool = True) -> PolySequence:
    """Values of ``Q_n(y; x, t, s)`` (or the monic ``Qbar_n``) for ``n <= n_max``.

    Raises
    ------
    ZeroPivotError
        Non-monic only, when ``A_k(x, s) = 0``, i.e. ``x = x_k(s)``.
    """
    y = params.scalar(y)
    if monic:
        diag, lam = aux_monic_coefficients(params, x, t, s, n_max)
        return PolySequence(tuple(_run_monic(y, diag, lam, n_max)), "Q-monic")
    if params.eta == 0:
        raise DomainError("non-monic polynomials need eta != 0")
    out = [y * 0 + 1]
    prev = y * 0
    for n in range(n_max):
        r = aux_coeff_row(params, n, x, t, s)
        if r.A_n == 0:
            raise ZeroPivotError(n, "A_n")
        nxt = ((y - r.B_n) * out[n] - r.C_n * prev) / r.A_n
        prev = out[n]
        out.append(nxt)
    return PolySequence(tuple(out), "Q")


def atom_candidate(params: Params, n: int, s) -> Scalar:
    """The zero ``x_n(s)`` of ``x -> A_n(x, s)``.

    Raises
    ------
    DomainError
        If ``eta = 0``, or ``q = 0`` with ``n >= 1``.
    """
    p = params
    if p.eta == 0:
        raise DomainError("atom candidates need eta != 0")
    if p.q == 0 and n >= 1:
        raise DomainError("atom candidates x_n with n >= 1 are undefined at q = 0")
    s = p.scalar(s)
    Q = q_number(n, p.q)
    qn = p.q**n
    return ((s * p.eta * qn - p.theta) * Q - 1 / p.eta - p.eta * p.tau * Q * Q) / qn


@dataclass(frozen=True)
class SupportIndex:
    """``k_star`` and ``m_star``; ``None`` below threshold, ``math.inf`` if unbounded."""

    k_star: Optional[float]
    m_star: Optional[float]


def _threshold_ratio(p: Params, t):
    # ((1-q)^2 + (1-q) eta theta + eta^2 tau) / (eta^2 (t(1-q) + tau))
    num = (1 - p.q) ** 2 + (1 - p.q) * p.eta * p.theta + p.eta**2 * p.tau
    den = p.eta**2 * (t * (1 - p.q) + p.tau)
    return num, den


def k_star(params: Params, t) -> SupportIndex:
    """Index of the last atom of ``mu_t`` and the index of its maximal candidate.

    Requires ``eta > 0``. Both entries are ``None`` when
    ``t <= theta/eta + (1-q)/eta^2``.
    """
    p = params
    if not p.eta > 0:
        raise DomainError("k_star requires eta > 0")
    t = p.scalar(t)
    if not t > p.theta / p.eta + (1 - p.q) / p.eta**2:
        return SupportIndex(None, None)
    if p.q == 1:
        base = t - p.theta / p.eta
        if p.tau == 0:
            return SupportIndex(math.inf, math.inf)
        k = 0
        while base > 2 * p.tau * (k + 1):
            k += 1
        m = 0
        while base > p.tau * (2 * (m + 1) - 1):
            m += 1
        return SupportIndex(k, m)
    num, den = _threshold_ratio(p, t)
    k = 0
    while p.q ** (2 * (k + 1)) * den > num:
        k += 1
    if p.q == 0:
        return SupportIndex(k, 0)
    m = 0
    while p.q ** (2 * (m + 1) - 1) * den > num:
        m += 1
    return SupportIndex(k, m)


@dataclass(frozen=True)
class Reparam:
    """Parameters after absorbing ``(x, s)``, with the affine change of variable."""

    params: Params
    t: Scalar
    shift: Scalar
    scale: Scalar

    def map(self, y):
        """``y -> (y - x) / (1 + eta x)``."""
        return (y - self.shift) / self.scale


def reparam(params: Params, x, t, s) -> Reparam:
    """Rewrite ``Q_n(y; x, t, s)`` as ``p_n`` of new parameters at a mapped point.

    Raises
    ------
    DomainError
        If ``1 + eta x = 0`` or the new ``tau`` would be negative.
    """
    p = params
    x, t, s = (p.scalar(v) for v in (x, t, s))
    scale = 1 + p.eta * x
    if scale == 0:
        raise DomainError("1 + eta*x vanishes")
    theta2 = (p.theta - s * p.eta - (1 - p.q) * x) / scale
    tau2 = (p.tau + (1 - p.q) * s) / scale
    return Reparam(Params(p.eta, theta2, tau2, p.q), (t - s) / scale, x, scale)


def sign_flip(params: Params, x) -> tuple[Params, Scalar]:
    """``(eta, theta, x) -> (-eta, -theta, -x)``."""
    p = params
    return Params(-p.eta, -p.theta, p.tau, p.q), -p.scalar(x)
